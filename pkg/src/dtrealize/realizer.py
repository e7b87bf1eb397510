"""End-to-end realization: solve, round, exactly verify, certify, scale.

A result is only ever REALIZED when the integer points pass the full exact
certification chain against the independent Delaunay oracle; everything
before that is untrusted search. Failure to find a realization is reported
as UNKNOWN, never as a negative answer.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

from . import oracle
from .constraints import ConstraintSystem, VarId, build_const, build_constsqu, satisfied_exact
from .geometry import RatPoint, circumcenter, dist_sq, pt
from .plane_graph import (PlaneTriangulation, _canon_cycle, candidate_outer_faces,
                          reembed_with_outer_face, validate_triangulation)
from .solver import SolverConfig, _float_circumcenter, round_candidates, solve


@dataclass(frozen=True)
class RealizeConfig:
    solver: SolverConfig = field(default_factory=SolverConfig)
    allow_reflection: bool = True
    time_budget: float | None = None     # total seconds, split across faces


@dataclass(frozen=True)
class CertifyResult:
    ok: bool
    transcript: tuple[str, ...]
    failed_step: str | None = None
    detail: str = ""
    witness_centers: tuple[tuple[Fraction, Fraction], ...] = ()


@dataclass(frozen=True)
class RealizationCertificate:
    points: tuple[tuple[int, int], ...]
    outer_face: tuple[int, ...]
    witness_centers: tuple[tuple[Fraction, Fraction], ...]  # per sorted edge
    transcript: tuple[str, ...]


@dataclass(frozen=True)
class RealizationResult:
    status: str                          # REALIZED | UNKNOWN | INVALID_INPUT
    certificate: RealizationCertificate | None = None
    diagnostics: tuple = ()
    # the exact rational assignment that passed the robustified system, when
    # REALIZED came out of the solve/round path (None for direct placements)
    exact_assignment: dict | None = None


def scale_to_integers(points: Sequence[RatPoint]) -> list[tuple[int, int]]:
    """Clear denominators with the LCM of all coordinate denominators.

    Uniform positive scaling preserves both constraint satisfaction and the
    Delaunay edge set, so the integer set realizes whatever the rational
    one did.
    """
    beta = 1
    for p in points:
        beta = math.lcm(beta, p.x.denominator, p.y.denominator)
    return [(int(p.x * beta), int(p.y * beta)) for p in points]


def certify(G: PlaneTriangulation, f_star: Sequence[int],
            points: Sequence[tuple[int, int]],
            allow_reflection: bool = True) -> CertifyResult:
    """Exact verification that DT(points) is G with outer face f_star.

    Steps run in order; the first failure aborts with its step name.
    Witness discs are circumcircles of an incident Delaunay face per edge,
    re-derived here rather than taken from any solver output.
    """
    transcript: list[str] = []
    pts = [pt(x, y) for x, y in points]
    if len(pts) != G.n:
        return CertifyResult(False, tuple(transcript), "POINT_COUNT",
                             f"{len(pts)} points for {G.n} vertices")

    report = oracle.general_position_check(pts)
    if not report.ok:
        return CertifyResult(False, tuple(transcript), "NOT_GENERAL_POSITION", str(report))
    transcript.append("general_position")

    dt = oracle.delaunay(pts)
    got = {tuple(sorted((a + 1, b + 1))) for a, b in dt.edges}
    want = set(G.edge_pairs())
    if got != want:
        missing = sorted(want - got)
        extra = sorted(got - want)
        return CertifyResult(False, tuple(transcript), "EDGE_MISMATCH",
                             f"missing={missing} extra={extra}")
    transcript.append("edge_set")

    hull = [i + 1 for i in dt.hull]
    target = list(f_star)
    if _canon_cycle(hull) == _canon_cycle(target):
        transcript.append("hull_cycle")
    elif allow_reflection and _canon_cycle(hull) == _canon_cycle(list(reversed(target))):
        transcript.append("hull_cycle_reflected")
    else:
        return CertifyResult(False, tuple(transcript), "HULL_MISMATCH",
                             f"hull={hull} outer={target}")

    # Witness discs per edge, derived from incident DT face circumcenters.
    # A face circumcircle itself touches the third face vertex, so the
    # center is moved strictly into the feasible part of the bisector:
    # midpoint of the two incident circumcenters for interior edges, or
    # pushed outward past the single circumcenter for hull edges.
    faces_of_edge: dict[tuple[int, int], list[tuple[int, int, int]]] = {}
    for f in dt.faces:
        for a in range(3):
            e = tuple(sorted((f[a], f[(a + 1) % 3])))
            faces_of_edge.setdefault(e, []).append(f)
    centers: list[tuple[Fraction, Fraction]] = []
    for i, j in G.edge_pairs():
        e = (i - 1, j - 1)
        tris = sorted(faces_of_edge[e])
        ccs = [circumcenter(pts[t[0]], pts[t[1]], pts[t[2]]) for t in tris]
        if len(ccs) >= 2:
            c = RatPoint((ccs[0].x + ccs[1].x) / 2, (ccs[0].y + ccs[1].y) / 2)
        else:
            pi, pj = pts[e[0]], pts[e[1]]
            a = next(v for v in tris[0] if v not in e)
            mx, my = (pi.x + pj.x) / 2, (pi.y + pj.y) / 2
            nx, ny = -(pj.y - pi.y), pj.x - pi.x
            if nx * (pts[a].x - mx) + ny * (pts[a].y - my) > 0:
                nx, ny = -nx, -ny
            c = RatPoint(ccs[0].x + nx, ccs[0].y + ny)
        r2 = dist_sq(c, pts[e[0]])
        if dist_sq(c, pts[e[1]]) != r2:
            return CertifyResult(False, tuple(transcript), "WITNESS_FAIL",
                                 f"edge ({i},{j}): endpoints not equidistant")
        for k in range(G.n):
            if k in e:
                continue
            if dist_sq(c, pts[k]) <= r2:
                return CertifyResult(False, tuple(transcript), "WITNESS_FAIL",
                                     f"edge ({i},{j}): point {k + 1} inside witness disc")
        centers.append((c.x, c.y))
    transcript.append("witness_discs")

    return CertifyResult(True, tuple(transcript), witness_centers=tuple(centers))


def repair_radii(system: ConstraintSystem,
                 values: dict[VarId, Fraction]) -> dict[VarId, Fraction]:
    """Re-pick each witness radius to fit its rounded points and center.

    The radius only appears squared against exact stencil distances, so any
    rational r with max(inclusion dist^2) <= r^2 < min(exclusion dist^2)
    restores the disc constraints; points and centers are left untouched.
    The exact evaluator remains the sole acceptance gate.
    """
    from .constraints import STENCIL

    out = dict(values)
    edges = sorted({(v[1], v[2]) for v in system.variables if v[0] == "r"})
    n = max(v[1] for v in system.variables if v[0] == "px")
    for i, j in edges:
        cx, cy = values[("cx", i, j)], values[("cy", i, j)]
        center = RatPoint(cx, cy)

        def d2(v: int, dx: int, dy: int) -> Fraction:
            return dist_sq(center, RatPoint(values[("px", v)] + dx,
                                            values[("py", v)] + dy))

        max_in = max(d2(v, dx, dy) for v in (i, j) for dx, dy in STENCIL)
        others = [k for k in range(1, n + 1) if k not in (i, j)]
        if not others:
            continue
        min_out = min(d2(k, dx, dy) for k in others for dx, dy in STENCIL)
        if max_in >= min_out:
            continue  # not repairable; exact evaluation will reject
        target = (max_in + min_out) / 2
        approx = math.sqrt(float(target))
        for denom in (10**3, 10**6, 10**9, 10**12, 10**15):
            r = Fraction(round(approx * denom), denom)
            if max_in <= r * r < min_out:
                out[("r", i, j)] = r
                break
    return out


def _float_radius(G: PlaneTriangulation, pts: Sequence[tuple[float, float]]) -> float:
    """Floating analog of the certified perturbation radius of a placement.

    One third of the minimum over pairwise distances, circumcircle
    clearances of inner faces, and point-to-outer-edge-line distances.
    Nonpositive when the placement does not realize G.
    """
    n = G.n
    d_n = min(math.dist(pts[a], pts[b]) for a in range(n) for b in range(a + 1, n))
    d_c = math.inf
    for f in G.inner_faces():
        cc = _float_circumcenter(*(pts[v - 1] for v in f))
        if cc is None:
            return 0.0
        rad = math.dist(cc, pts[f[0] - 1])
        for k in range(1, n + 1):
            if k not in f:
                d_c = min(d_c, math.dist(cc, pts[k - 1]) - rad)
    d_a = math.inf
    outer = G.outer_face
    for t in range(len(outer)):
        i, j = outer[t], outer[(t + 1) % len(outer)]
        pi, pj = pts[i - 1], pts[j - 1]
        ex, ey = pj[0] - pi[0], pj[1] - pi[1]
        length = math.hypot(ex, ey)
        if length == 0:
            return 0.0
        for k in range(1, n + 1):
            if k not in (i, j):
                pk = pts[k - 1]
                d_a = min(d_a, abs(ex * (pk[1] - pi[1]) - ey * (pk[0] - pi[0])) / length)
    return min(d_n, d_c, d_a) / 3.0


def _rescale_warm(H: PlaneTriangulation,
                  pts: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Uniformly upscale a realizing placement past unit-stencil robustness."""
    r = _float_radius(H, pts)
    if r <= 0:
        return pts
    s = max(1.0, 4.0 / r)
    return [(x * s, y * s) for x, y in pts]


def _warm_start(H: PlaneTriangulation, solver_cfg: SolverConfig) -> list[tuple[float, float]] | None:
    """Stage-1 placement: solve the cheap base system, then upscale.

    A base-system solution realizes H in floats at some tiny robustness
    radius; uniform scaling (which preserves base-system satisfaction)
    stretches that radius past the unit stencil, so the robustified system
    is typically satisfied immediately at the scaled points.
    """
    outcome = solve(build_const(H), solver_cfg, G=H)
    if outcome.status != "SATISFIED_FLOAT":
        return None
    pts = [(outcome.assignment[("px", i)], outcome.assignment[("py", i)])
           for i in range(1, H.n + 1)]
    if _float_radius(H, pts) <= 0:
        return None
    return _rescale_warm(H, pts)


def _points_from_values(values: dict[VarId, Fraction], n: int) -> list[RatPoint]:
    return [RatPoint(values[("px", i)], values[("py", i)]) for i in range(1, n + 1)]


def _realize_small(G: PlaneTriangulation, config: RealizeConfig) -> RealizationResult:
    if G.n == 3 and len(G.edge_pairs()) == 3:
        points = [(0, 0), (4, 0), (2, 3)]
        cert = certify(G, G.outer_face, points, config.allow_reflection)
        if not cert.ok:
            points = [(0, 0), (2, 3), (4, 0)]
            cert = certify(G, G.outer_face, points, config.allow_reflection)
        if cert.ok:
            return RealizationResult(
                "REALIZED",
                RealizationCertificate(tuple(points), tuple(G.outer_face),
                                       cert.witness_centers, cert.transcript))
    return RealizationResult("INVALID_INPUT",
                             diagnostics=(("TOO_SMALL", f"n = {G.n}"),))


def realize(G: PlaneTriangulation, config: RealizeConfig | None = None,
            warm_points: Sequence[tuple[float, float]] | None = None) -> RealizationResult:
    """Full pipeline over all candidate outer faces.

    ``warm_points`` seeds the solver with a known placement (testing aid)."""
    config = config or RealizeConfig()
    if G.n < 4:
        return _realize_small(G, config)
    report = validate_triangulation(G)
    if not report.ok:
        return RealizationResult(
            "INVALID_INPUT",
            diagnostics=tuple((v.rule, v.message) for v in report.violations))

    candidates = candidate_outer_faces(G)
    solver_cfg = config.solver
    if config.time_budget is not None:
        solver_cfg = replace(solver_cfg, time_budget=config.time_budget / len(candidates))

    diagnostics = []
    for face in candidates:
        H = reembed_with_outer_face(G, face)
        if warm_points is not None:
            warm = _rescale_warm(H, [(float(x), float(y)) for x, y in warm_points])
        else:
            warm = _warm_start(H, solver_cfg)
        system = build_constsqu(H)
        outcome = solve(system, solver_cfg, G=H, initial_points=warm)
        attempt = {"outer_face": list(H.outer_face), "solver_status": outcome.status,
                   "min_margin": outcome.min_margin}
        if outcome.status != "SATISFIED_FLOAT":
            diagnostics.append(attempt)
            continue
        for exact in round_candidates(outcome.assignment, solver_cfg):
            exact = repair_radii(system, exact)
            if not satisfied_exact(system, exact):
                continue
            rat_points = _points_from_values(exact, G.n)
            # the exact solution tolerates any half-box perturbation, so a
            # failed certification (typically an incidental collinearity or
            # cocircularity the system does not forbid) is retried under
            # small seeded rational jitters
            rng = random.Random(solver_cfg.seed)
            trials = [rat_points] + [
                [RatPoint(p.x + Fraction(rng.randrange(-499, 500), 1999),
                          p.y + Fraction(rng.randrange(-499, 500), 1999))
                 for p in rat_points]
                for _ in range(3)
            ]
            for trial in trials:
                int_points = scale_to_integers(trial)
                cert = certify(H, H.outer_face, int_points, config.allow_reflection)
                if cert.ok:
                    certificate = RealizationCertificate(
                        tuple(int_points), tuple(H.outer_face),
                        cert.witness_centers, cert.transcript)
                    return RealizationResult("REALIZED", certificate,
                                             tuple(diagnostics),
                                             exact_assignment=exact)
                attempt["certify_fail"] = cert.failed_step
        attempt["note"] = "no rounded candidate satisfied the exact system"
        diagnostics.append(attempt)
    return RealizationResult("UNKNOWN", diagnostics=tuple(diagnostics))
