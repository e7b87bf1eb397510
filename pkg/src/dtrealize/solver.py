"""Penalty-method search for floating assignments to a constraint system.

The search is a heuristic front end only: it proposes candidates with
positive margin which the caller rounds to rationals and re-checks with
exact arithmetic. Nothing here is trusted for correctness.

Loss: sum of squared equality residuals plus squared hinges on strict
inequalities (hinge target = margin; non-strict relations use margin 0).
All polynomials have degree <= 2, so the analytic gradient is evaluated
directly from the compiled term arrays.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .constraints import ConstraintSystem, MissingVariable, VarId
from .geometry import rationalize
from .plane_graph import PlaneTriangulation, tutte_embedding

DEFAULT_DENOMINATORS = (1, 4, 32, 256, 4096, 1 << 16, 1 << 24)


@dataclass(frozen=True)
class SolverConfig:
    margin: float | None = None          # None: per-flavor default
    max_iterations: int = 4000
    restarts: int = 8
    seed: int = 0
    initial_step: float = 1e-3
    stagnation_window: int = 200
    stagnation_rel: float = 1e-12
    time_budget: float | None = None     # seconds, None = unlimited
    denominators: tuple[int, ...] = DEFAULT_DENOMINATORS

    def __post_init__(self):
        if self.margin is not None and self.margin <= 0:
            raise ValueError("margin must be positive")
        if list(self.denominators) != sorted(self.denominators):
            raise ValueError("denominators must ascend")


@dataclass(frozen=True)
class SolveOutcome:
    status: str                          # "SATISFIED_FLOAT" | "EXHAUSTED"
    assignment: dict[VarId, float]
    min_margin: float
    iterations: int
    restart_index: int


# relation codes in the compiled form
_EQ, _GT, _LT, _GE, _LE = 0, 1, 2, 3, 4
_REL_CODE = {"=": _EQ, ">": _GT, "<": _LT, ">=": _GE, "<=": _LE}


class CompiledSystem:
    """Term-array form of a ConstraintSystem for vectorized evaluation."""

    def __init__(self, system: ConstraintSystem):
        self.system = system
        self.var_index = {v: i for i, v in enumerate(system.variables)}
        nv = len(system.variables)
        self.nv = nv
        rows, ia, ib, coefs = [], [], [], []
        for r, c in enumerate(system.constraints):
            for mono, coeff in c.poly:
                a = self.var_index[mono[0]] if len(mono) >= 1 else nv
                b = self.var_index[mono[1]] if len(mono) == 2 else nv
                rows.append(r)
                ia.append(a)
                ib.append(b)
                coefs.append(coeff)
        self.rows = np.asarray(rows, dtype=np.int64)
        self.ia = np.asarray(ia, dtype=np.int64)
        self.ib = np.asarray(ib, dtype=np.int64)
        self.coefs = np.asarray(coefs, dtype=np.float64)
        self.m = len(system.constraints)
        self.rel = np.asarray([_REL_CODE[c.relation] for c in system.constraints],
                              dtype=np.int64)
        self.is_eq = self.rel == _EQ
        self.n_eq = int(np.count_nonzero(self.is_eq))
        self.strict = (self.rel == _GT) | (self.rel == _LT)
        # orientation: signed slack = sign * value, positive means satisfied
        self.sign = np.where((self.rel == _LT) | (self.rel == _LE), -1.0, 1.0)

    def values(self, v: np.ndarray) -> np.ndarray:
        va = np.append(v, 1.0)
        tv = self.coefs * va[self.ia] * va[self.ib]
        return np.bincount(self.rows, weights=tv, minlength=self.m)

    def _loss_parts(self, v: np.ndarray, margin: float):
        vals = self.values(v)
        target = np.where(self.strict, margin, 0.0)
        slack = self.sign * vals
        hinge = np.maximum(0.0, target - slack)
        resid = np.where(self.is_eq, vals, 0.0)
        loss = float(np.dot(resid, resid) + np.dot(hinge, hinge))
        return loss, resid, hinge

    def loss(self, v: np.ndarray, margin: float) -> float:
        return self._loss_parts(v, margin)[0]

    def loss_grad(self, v: np.ndarray, margin: float) -> tuple[float, np.ndarray]:
        va = np.append(v, 1.0)
        loss, resid, hinge = self._loss_parts(v, margin)
        # d loss / d value per constraint
        dval = 2.0 * resid - 2.0 * hinge * self.sign
        w = dval[self.rows] * self.coefs
        grad_aug = np.bincount(self.ia, weights=w * va[self.ib], minlength=self.nv + 1)
        grad_aug += np.bincount(self.ib, weights=w * va[self.ia], minlength=self.nv + 1)
        return loss, grad_aug[: self.nv]

    def loss_implies_satisfied(self, v: np.ndarray, loss: float) -> bool:
        """Cheap filter for when a full satisfied() check could succeed.

        Zero loss means every hinge and equality residual vanished, which is
        satisfaction outright; with equalities present the tolerance of
        satisfied() admits tiny positive losses too.
        """
        if loss == 0.0:
            return True
        if not self.n_eq:
            return False
        scale = max(1.0, float(np.max(np.abs(v))) ** 2) if v.size else 1.0
        return loss <= self.n_eq * (1e-9 * scale) ** 2

    def satisfied(self, v: np.ndarray, margin: float) -> tuple[bool, float]:
        vals = self.values(v)
        scale = max(1.0, float(np.max(np.abs(v))) ** 2) if v.size else 1.0
        eq_ok = np.all(np.abs(vals[self.is_eq]) <= 1e-9 * scale)
        slack = self.sign * vals
        target = np.where(self.strict, margin, 0.0)
        ineq = ~self.is_eq
        ok = bool(eq_ok and np.all(slack[ineq] >= target[ineq]))
        strict_margin = float(np.min(slack[self.strict])) if np.any(self.strict) else math.inf
        return ok, strict_margin


def default_margin(system: ConstraintSystem, points: Sequence[tuple[float, float]]) -> float:
    if system.flavor == "CONSTSQU":
        return 1.0
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    area = max(1e-12, (max(xs) - min(xs)) * (max(ys) - min(ys)))
    return 1e-3 * area


def _incident_inner_faces(G: PlaneTriangulation) -> dict[tuple[int, int], list[tuple[int, int, int]]]:
    """Per edge, its incident inner faces (sorted, deterministic)."""
    chosen: dict[tuple[int, int], list[tuple[int, int, int]]] = {}
    for f in G.inner_faces():
        tri = tuple(sorted(f))
        for a in range(3):
            e = tuple(sorted((f[a], f[(a + 1) % 3])))
            chosen.setdefault(e, []).append(tri)
    for faces in chosen.values():
        faces.sort()
    return chosen


def _float_circumcenter(a, b, c) -> tuple[float, float] | None:
    d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
    if d == 0:
        return None
    a2 = a[0] * a[0] + a[1] * a[1]
    b2 = b[0] * b[0] + b[1] * b[1]
    c2 = c[0] * c[0] + c[1] * c[1]
    ux = (a2 * (b[1] - c[1]) + b2 * (c[1] - a[1]) + c2 * (a[1] - b[1])) / d
    uy = (a2 * (c[0] - b[0]) + b2 * (a[0] - c[0]) + c2 * (b[0] - a[0])) / d
    return ux, uy


def initialize(G: PlaneTriangulation, system: ConstraintSystem,
               config: SolverConfig,
               points: Sequence[tuple[float, float]] | None = None) -> dict[VarId, float]:
    """Starting assignment: scaled Tutte points plus circumcenter witnesses.

    ``points`` overrides the Tutte placement (warm starts)."""
    if points is None:
        points = tutte_embedding(G, polygon_radius=1.0)
    pts = [(float(x), float(y)) for x, y in points]

    mind = min(math.dist(pts[i], pts[j])
               for i in range(len(pts)) for j in range(i + 1, len(pts)))
    if mind <= 0:
        mind = 1e-9
    target = 10.0 if system.flavor == "CONSTSQU" else 1.0
    if mind < target:
        s = target / mind
        pts = [(x * s, y * s) for x, y in pts]

    values: dict[VarId, float] = {}
    for i, (x, y) in enumerate(pts, start=1):
        values[("px", i)] = x
        values[("py", i)] = y

    # Witness centers start strictly inside the feasible wedge for each edge:
    # a face circumcenter lies ON the opposite vertex's exclusion boundary,
    # so interior edges use the midpoint of the two incident circumcenters
    # and outer-cycle edges push outward along the perpendicular bisector.
    faces = _incident_inner_faces(G)
    for i, j in G.edge_pairs():
        pi, pj = pts[i - 1], pts[j - 1]
        mx, my = (pi[0] + pj[0]) / 2, (pi[1] + pj[1]) / 2
        incident = faces.get((i, j), [])
        centers = []
        for tri in incident:
            cc = _float_circumcenter(*(pts[v - 1] for v in tri))
            if cc is not None:
                centers.append(cc)
        if len(centers) >= 2:
            cx = (centers[0][0] + centers[1][0]) / 2
            cy = (centers[0][1] + centers[1][1]) / 2
        elif len(centers) == 1:
            # push outward from the incident face's circumcenter: along that
            # ray every other point's exclusion gap grows linearly, so any
            # positive push is feasible for an exactly realizing placement
            tri = incident[0]
            a = next(v for v in tri if v not in (i, j))
            pa = pts[a - 1]
            ex, ey = pj[0] - pi[0], pj[1] - pi[1]
            nx, ny = -ey, ex
            norm = math.hypot(nx, ny) or 1.0
            nx, ny = nx / norm, ny / norm
            if nx * (pa[0] - mx) + ny * (pa[1] - my) > 0:
                nx, ny = -nx, -ny
            push = math.hypot(ex, ey)
            cx, cy = centers[0][0] + push * nx, centers[0][1] + push * ny
        else:
            cx, cy = mx, my
        values[("cx", i, j)] = cx
        values[("cy", i, j)] = cy
        if ("r", i, j) in system.variables:
            values[("r", i, j)] = math.dist((cx, cy), pi) + 2.0
    return values


def penalty(system: ConstraintSystem, assignment: dict[VarId, float],
            margin: float) -> tuple[float, dict[VarId, float]]:
    """Loss and analytic gradient of the penalty at a floating assignment."""
    for v in system.variables:
        if v not in assignment:
            raise MissingVariable(v)
    comp = CompiledSystem(system)
    vec = np.asarray([assignment[v] for v in system.variables], dtype=np.float64)
    loss, grad = comp.loss_grad(vec, margin)
    return loss, {v: float(grad[i]) for i, v in enumerate(system.variables)}


def solve(system: ConstraintSystem, config: SolverConfig,
          G: PlaneTriangulation | None = None,
          initial_points: Sequence[tuple[float, float]] | None = None) -> SolveOutcome:
    """Deterministic penalty descent with seeded restarts.

    ``G`` enables the structured initialization; without it the start is
    seeded random.
    """
    comp = CompiledSystem(system)
    t0 = time.monotonic()

    def start_vector(restart: int) -> np.ndarray:
        rng = np.random.default_rng(config.seed + restart)
        if G is not None:
            values = initialize(G, system, config, points=initial_points)
            vec = np.asarray([values[v] for v in system.variables], dtype=np.float64)
            if restart > 0:
                jitter = 10.0 ** ((restart % 4) - 1)
                point_mask = np.asarray(
                    [v[0] in ("px", "py") for v in system.variables])
                vec = vec + jitter * rng.standard_normal(len(vec)) * point_mask
                vec = vec + 0.1 * jitter * rng.standard_normal(len(vec)) * ~point_mask
            return vec
        return 100.0 * rng.standard_normal(comp.nv)

    margin = config.margin
    if margin is None:
        if G is not None:
            probe = initialize(G, system, config, points=initial_points)
            probe_pts = [(probe[("px", i)], probe[("py", i)])
                         for i in range(1, max(v[1] for v in system.variables
                                               if v[0] == "px") + 1)]
            margin = default_margin(system, probe_pts)
        else:
            margin = 1.0 if system.flavor == "CONSTSQU" else 1e-3

    best_vec: np.ndarray | None = None
    best_loss = math.inf
    best_restart = 0
    total_iters = 0

    def finish(vec: np.ndarray, restart: int) -> SolveOutcome:
        mm = comp.satisfied(vec, margin)[1]
        return SolveOutcome("SATISFIED_FLOAT",
                            dict(zip(system.variables, map(float, vec))),
                            mm, total_iters, restart)

    for restart in range(config.restarts + 1):
        vec = start_vector(restart)
        loss = comp.loss(vec, margin)
        if comp.loss_implies_satisfied(vec, loss) and comp.satisfied(vec, margin)[0]:
            return finish(vec, restart)
        grad = comp.loss_grad(vec, margin)[1]
        # conjugate descent direction (Polak-Ribiere, reset on non-descent);
        # the initial trial step targets loss 0 along the direction and
        # backtracking keeps accepted losses strictly decreasing
        direction = -grad
        steepest = True
        window_start_loss = loss
        since_improve = 0
        for it in range(config.max_iterations):
            total_iters += 1
            if config.time_budget is not None and time.monotonic() - t0 > config.time_budget:
                break
            gd = float(grad @ direction)
            if gd >= 0:
                direction = -grad
                steepest = True
                gd = -float(grad @ grad)
                if gd == 0:
                    break
            alpha = -2.0 * loss / gd if gd < 0 else config.initial_step
            accepted = False
            for _ in range(40):
                cand = vec + alpha * direction
                closs = comp.loss(cand, margin)
                if closs < loss:
                    accepted = True
                    break
                alpha *= 0.5
            if not accepted:
                if steepest:
                    break
                direction = -grad
                steepest = True
                continue
            vec, loss = cand, closs
            if comp.loss_implies_satisfied(vec, loss) and comp.satisfied(vec, margin)[0]:
                return finish(vec, restart)
            new_grad = comp.loss_grad(vec, margin)[1]
            g2 = float(grad @ grad)
            beta = max(0.0, float(new_grad @ (new_grad - grad)) / g2) if g2 > 0 else 0.0
            direction = -new_grad + beta * direction
            steepest = False
            grad = new_grad
            # stagnation: tiny relative progress over a window; before giving
            # up, try growing the whole configuration (the systems tolerate
            # uniform upscaling far better than downscaling)
            since_improve += 1
            if since_improve >= config.stagnation_window:
                if window_start_loss - loss < config.stagnation_rel * max(1.0, window_start_loss):
                    kicked = False
                    for s in (1.5, 2.0, 4.0):
                        cand = vec * s
                        closs = comp.loss(cand, margin)
                        if closs < loss:
                            vec, loss = cand, closs
                            grad = comp.loss_grad(vec, margin)[1]
                            direction = -grad
                            steepest = True
                            kicked = True
                            break
                    if not kicked:
                        break
                window_start_loss = loss
                since_improve = 0
        if loss < best_loss:
            best_loss = loss
            best_vec = vec.copy()
            best_restart = restart
        if config.time_budget is not None and time.monotonic() - t0 > config.time_budget:
            break

    assert best_vec is not None
    mm = comp.satisfied(best_vec, margin)[1]
    return SolveOutcome("EXHAUSTED",
                        dict(zip(system.variables, map(float, best_vec))),
                        mm, total_iters, best_restart)


def round_candidates(assignment: dict[VarId, float],
                     config: SolverConfig) -> Iterator[dict[VarId, Fraction]]:
    """Exact rational candidates, one per denominator bound, ascending."""
    for d in config.denominators:
        yield {v: rationalize(x, d) for v, x in assignment.items()}
