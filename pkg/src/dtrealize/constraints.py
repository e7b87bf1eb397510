"""Polynomial constraint systems encoding Delaunay realizability.

Two flavors over a shared degree-<=2 integer polynomial IR:

* the base system: convex-position inequalities on the outer cycle plus,
  per edge, a witness-disc center with one equality and strict exclusion
  inequalities (coefficients stay in {-2..2});
* the square-robustified system: every point inequality is replicated over
  a 9-point unit stencil around each vertex, witness discs gain an explicit
  radius variable, and relations become <= / > so that exact satisfaction
  survives rounding to nearby rationals (coefficients stay in {-10..10}).

Systems are deterministic, exactly evaluable over Fraction, and exportable
to JSON (lossless) and SMT-LIB2 (QF_NRA) for external complete solvers.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .plane_graph import PlaneTriangulation

# A variable is a tuple: ("px", i) ("py", i) ("cx", i, j) ("cy", i, j)
# ("r", i, j), with i < j for edge variables.
VarId = tuple
# A polynomial is {monomial: int coeff}; a monomial is a sorted tuple of
# 0, 1 or 2 VarIds.
Poly = dict

# Unit stencil around each point: center first, then the four corners and
# four edge midpoints of the side-2 axis-aligned square.
STENCIL = (
    (0, 0),
    (-1, -1), (-1, 1), (1, -1), (1, 1),
    (-1, 0), (0, 1), (1, 0), (0, -1),
)

RELATIONS = ("=", ">", "<", ">=", "<=")


class MissingVariable(KeyError):
    pass


def _padd(a: Poly, b: Poly, sign: int = 1) -> Poly:
    out = dict(a)
    for m, c in b.items():
        c2 = out.get(m, 0) + sign * c
        if c2:
            out[m] = c2
        else:
            out.pop(m, None)
    return out


def _pmul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = tuple(sorted(ma + mb))
            if len(m) > 2:
                raise ValueError("degree above 2")
            c = out.get(m, 0) + ca * cb
            if c:
                out[m] = c
            else:
                out.pop(m, None)
    return out


def _lin(var: VarId, offset: int = 0) -> Poly:
    p: Poly = {(var,): 1}
    if offset:
        p[()] = offset
    return p


def _con_poly_sym(p0, p1, p2) -> Poly:
    """Orientation polynomial on symbolic points (pairs of linear polys)."""
    x0, y0 = p0
    x1, y1 = p1
    x2, y2 = p2
    out: Poly = {}
    for a, b, s in ((x2, y1, 1), (x2, y0, -1), (x0, y1, -1),
                    (x1, y2, -1), (x1, y0, 1), (x0, y2, 1)):
        out = _padd(out, _pmul(a, b), s)
    return out


# signed (x-index, y-index) pairs of the orientation form
_CON_PAIRS = ((2, 1, 1), (2, 0, -1), (0, 1, -1), (1, 2, -1), (1, 0, 1), (0, 2, 1))


def _con_poly_offsets(verts: tuple[int, int, int],
                      offs: tuple[tuple[int, int], ...]) -> Poly:
    """Orientation polynomial at stencil-shifted points, expanded directly.

    Equivalent to _con_poly_sym on (X_v + dx, Y_v + dy) but built in O(1)
    dictionary operations: the quadratic part is offset-independent and the
    shifts only contribute linear and constant corrections.
    """
    out: Poly = {}

    def add(mono: tuple, c: int) -> None:
        if not c:
            return
        c2 = out.get(mono, 0) + c
        if c2:
            out[mono] = c2
        else:
            del out[mono]

    for p, q, s in _CON_PAIRS:
        xp = ("px", verts[p])
        yq = ("py", verts[q])
        ap, _bp = offs[p]
        _aq, bq = offs[q]
        add(tuple(sorted((xp, yq))), s)
        add((xp,), s * bq)
        add((yq,), s * ap)
        add((), s * ap * bq)
    return out


@dataclass(frozen=True)
class Constraint:
    poly: tuple            # canonical: sorted tuple of (monomial, coeff)
    relation: str
    tag: tuple

    def poly_dict(self) -> Poly:
        return {m: c for m, c in self.poly}


def _freeze(p: Poly) -> tuple:
    return tuple(sorted(p.items()))


@dataclass(frozen=True)
class ConstraintSystem:
    variables: tuple[VarId, ...]
    constraints: tuple[Constraint, ...]
    flavor: str            # "CONST" | "CONSTSQU"
    graph_digest: str


def graph_digest(G: PlaneTriangulation) -> str:
    blob = json.dumps(
        {"n": G.n,
         "rotation": {str(u): G.rotation[u] for u in sorted(G.rotation)},
         "outer_face": list(G.outer_face)},
        sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def _point_vars(i: int) -> tuple[Poly, Poly]:
    return _lin(("px", i)), _lin(("py", i))


def _stencil_point(i: int, ell: int) -> tuple[Poly, Poly]:
    dx, dy = STENCIL[ell]
    return _lin(("px", i), dx), _lin(("py", i), dy)


def _variables(G: PlaneTriangulation, with_radius: bool) -> tuple[VarId, ...]:
    out: list[VarId] = []
    for i in range(1, G.n + 1):
        out.append(("px", i))
        out.append(("py", i))
    for i, j in G.edge_pairs():
        out.append(("cx", i, j))
        out.append(("cy", i, j))
        if with_radius:
            out.append(("r", i, j))
    return tuple(out)


def _outer_triples(outer: Sequence[int]):
    k = len(outer)
    for t in range(k):
        yield outer[t], outer[(t + 1) % k], outer[(t + 2) % k]


def _outer_pairs(outer: Sequence[int]):
    k = len(outer)
    for t in range(k):
        yield outer[t], outer[(t + 1) % k]


def build_const(G: PlaneTriangulation, interior_over_all: bool = True) -> ConstraintSystem:
    """Base system: convex outer cycle + witness-disc equalities/exclusions.

    ``interior_over_all`` quantifies the interior turn constraints over all
    vertices other than the two consecutive outer ones (the displayed
    condition); False restricts to non-outer vertices only.
    """
    cons: list[Constraint] = []
    for i, j, k in _outer_triples(G.outer_face):
        p = _con_poly_sym(_point_vars(i), _point_vars(j), _point_vars(k))
        cons.append(Constraint(_freeze(p), ">", ("CON_TURN", i, j, k)))
    outer_set = set(G.outer_face)
    for i, j in _outer_pairs(G.outer_face):
        for k in range(1, G.n + 1):
            if k in (i, j):
                continue
            if not interior_over_all and k in outer_set:
                continue
            p = _con_poly_sym(_point_vars(i), _point_vars(k), _point_vars(j))
            cons.append(Constraint(_freeze(p), "<", ("CON_INTERIOR", i, j, k)))

    for i, j in G.edge_pairs():
        xi, yi = _point_vars(i)
        xj, yj = _point_vars(j)
        cx, cy = _lin(("cx", i, j)), _lin(("cy", i, j))
        # Xi^2 - Xj^2 + Yi^2 - Yj^2 - 2 Cx Xi - 2 Cy Yi + 2 Cx Xj + 2 Cy Yj = 0
        eq = _pmul(xi, xi)
        eq = _padd(eq, _pmul(xj, xj), -1)
        eq = _padd(eq, _pmul(yi, yi))
        eq = _padd(eq, _pmul(yj, yj), -1)
        eq = _padd(eq, _pmul(cx, xi), -2)
        eq = _padd(eq, _pmul(cy, yi), -2)
        eq = _padd(eq, _pmul(cx, xj), 2)
        eq = _padd(eq, _pmul(cy, yj), 2)
        cons.append(Constraint(_freeze(eq), "=", ("DIS_EQ", i, j)))
        for k in range(1, G.n + 1):
            if k in (i, j):
                continue
            xk, yk = _point_vars(k)
            ex = _pmul(xk, xk)
            ex = _padd(ex, _pmul(xi, xi), -1)
            ex = _padd(ex, _pmul(yk, yk))
            ex = _padd(ex, _pmul(yi, yi), -1)
            ex = _padd(ex, _pmul(cx, xk), -2)
            ex = _padd(ex, _pmul(cy, yk), -2)
            ex = _padd(ex, _pmul(cx, xi), 2)
            ex = _padd(ex, _pmul(cy, yi), 2)
            cons.append(Constraint(_freeze(ex), ">", ("DIS_EXCL", i, j, k)))

    return ConstraintSystem(_variables(G, False), tuple(cons), "CONST", graph_digest(G))


def build_constsqu(G: PlaneTriangulation) -> ConstraintSystem:
    """Square-robustified system with unit stencils and radius variables.

    Stencil offsets are substituted symbolically, so no point variables are
    added: only (cx, cy, r) per edge beyond the base coordinates.
    """
    cons: list[Constraint] = []
    nine = range(len(STENCIL))
    for i, j, k in _outer_triples(G.outer_face):
        for li in nine:
            for lj in nine:
                for lk in nine:
                    p = _con_poly_offsets((i, j, k),
                                          (STENCIL[li], STENCIL[lj], STENCIL[lk]))
                    cons.append(Constraint(_freeze(p), ">",
                                           ("CONSQU_TURN", i, j, k, li, lj, lk)))
    for i, j in _outer_pairs(G.outer_face):
        for k in range(1, G.n + 1):
            if k in (i, j):
                continue
            for li in nine:
                for lk in nine:
                    for lj in nine:
                        p = _con_poly_offsets((i, k, j),
                                              (STENCIL[li], STENCIL[lk], STENCIL[lj]))
                        cons.append(Constraint(_freeze(p), "<",
                                               ("CONSQU_INTERIOR", i, j, k, li, lk, lj)))

    for i, j in G.edge_pairs():
        CX, CY, R = ("cx", i, j), ("cy", i, j), ("r", i, j)

        def disc_poly(v: int, ell: int) -> Poly:
            # |Z - C|^2 - R^2 with Z = (X_v + a, Y_v + b), expanded directly
            a, b = STENCIL[ell]
            X, Y = ("px", v), ("py", v)
            p: Poly = {
                (X, X): 1, (Y, Y): 1, (CX, CX): 1, (CY, CY): 1, (R, R): -1,
                tuple(sorted((X, CX))): -2, tuple(sorted((Y, CY))): -2,
            }
            for var, c in ((X, 2 * a), (Y, 2 * b), (CX, -2 * a), (CY, -2 * b)):
                if c:
                    p[(var,)] = c
            if a or b:
                p[()] = a * a + b * b
            return p

        for v in (i, j):
            for ell in nine:
                cons.append(Constraint(_freeze(disc_poly(v, ell)), "<=",
                                       ("DISSQU_IN", i, j, v, ell)))
        for k in range(1, G.n + 1):
            if k in (i, j):
                continue
            for ell in nine:
                cons.append(Constraint(_freeze(disc_poly(k, ell)), ">",
                                       ("DISSQU_OUT", i, j, k, ell)))

    return ConstraintSystem(_variables(G, True), tuple(cons), "CONSTSQU", graph_digest(G))


# --- evaluation ---------------------------------------------------------

@dataclass(frozen=True)
class ConstraintEval:
    tag: tuple
    relation: str
    residual: Fraction
    satisfied: bool


@dataclass(frozen=True)
class EvaluationReport:
    satisfied: bool
    results: tuple[ConstraintEval, ...]
    min_strict_margin: Fraction | None

    def failures(self) -> list[ConstraintEval]:
        return [r for r in self.results if not r.satisfied]


def _holds(value: Fraction, relation: str) -> bool:
    if relation == "=":
        return value == 0
    if relation == ">":
        return value > 0
    if relation == "<":
        return value < 0
    if relation == ">=":
        return value >= 0
    return value <= 0


def eval_poly(poly: tuple, values: Mapping[VarId, Fraction]) -> Fraction:
    total = Fraction(0)
    for mono, coeff in poly:
        term = Fraction(coeff)
        for var in mono:
            term *= values[var]
        total += term
    return total


def evaluate(system: ConstraintSystem, values: Mapping[VarId, Fraction]) -> EvaluationReport:
    """Exact per-constraint residuals and satisfaction under each relation."""
    missing = [v for v in system.variables if v not in values]
    if missing:
        raise MissingVariable(missing[0])
    results = []
    min_margin: Fraction | None = None
    for c in system.constraints:
        val = eval_poly(c.poly, values)
        ok = _holds(val, c.relation)
        results.append(ConstraintEval(c.tag, c.relation, val, ok))
        if c.relation in (">", "<"):
            margin = val if c.relation == ">" else -val
            if min_margin is None or margin < min_margin:
                min_margin = margin
    return EvaluationReport(all(r.satisfied for r in results), tuple(results), min_margin)


def satisfied_exact(system: ConstraintSystem, values: Mapping[VarId, Fraction]) -> bool:
    """Exact yes/no over a common denominator, avoiding Fraction per term.

    Clearing all values to integers scaled by the LCM denominator D turns
    each degree-<=2 polynomial into an integer combination (degree-1 terms
    pick up a factor D, constants D^2), and only the sign matters.
    """
    missing = [v for v in system.variables if v not in values]
    if missing:
        raise MissingVariable(missing[0])
    D = 1
    for v in system.variables:
        D = math.lcm(D, values[v].denominator)
    iv = {v: int(values[v] * D) for v in system.variables}
    D2 = D * D
    for c in system.constraints:
        total = 0
        for mono, coeff in c.poly:
            if len(mono) == 2:
                total += coeff * iv[mono[0]] * iv[mono[1]]
            elif len(mono) == 1:
                total += coeff * iv[mono[0]] * D
            else:
                total += coeff * D2
        rel = c.relation
        if rel == "=":
            ok = total == 0
        elif rel == ">":
            ok = total > 0
        elif rel == "<":
            ok = total < 0
        elif rel == ">=":
            ok = total >= 0
        else:
            ok = total <= 0
        if not ok:
            return False
    return True


# --- export -------------------------------------------------------------

SCHEMA_VERSION = 1


def _var_name(v: VarId) -> str:
    return "_".join(str(p) for p in v)


def system_to_json(system: ConstraintSystem) -> str:
    doc = {
        "schema": SCHEMA_VERSION,
        "flavor": system.flavor,
        "graph_digest": system.graph_digest,
        "variables": [list(v) for v in system.variables],
        "constraints": [
            {
                "tag": list(c.tag),
                "relation": c.relation,
                "terms": [[[list(v) for v in mono], coeff] for mono, coeff in c.poly],
            }
            for c in system.constraints
        ],
    }
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def system_from_json(text: str) -> ConstraintSystem:
    doc = json.loads(text)
    if doc.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema {doc.get('schema')!r}")
    variables = tuple(tuple(v) for v in doc["variables"])
    cons = tuple(
        Constraint(
            tuple((tuple(tuple(v) for v in mono), coeff) for mono, coeff in c["terms"]),
            c["relation"],
            tuple(c["tag"]),
        )
        for c in doc["constraints"]
    )
    return ConstraintSystem(variables, cons, doc["flavor"], doc["graph_digest"])


def _smt_int(n: int) -> str:
    return str(n) if n >= 0 else f"(- {-n})"


def _smt_poly(poly: tuple) -> str:
    terms = []
    for mono, coeff in poly:
        factors = [_smt_int(coeff)] + [_var_name(v) for v in mono]
        terms.append(factors[0] if len(factors) == 1 else "(* " + " ".join(factors) + ")")
    if not terms:
        return "0"
    if len(terms) == 1:
        return terms[0]
    return "(+ " + " ".join(terms) + ")"


def system_to_smtlib2(system: ConstraintSystem) -> str:
    lines = [
        "(set-logic QF_NRA)",
        f"; flavor {system.flavor} digest {system.graph_digest}",
    ]
    for v in system.variables:
        lines.append(f"(declare-const {_var_name(v)} Real)")
    for c in system.constraints:
        lines.append(f"; {c.tag}")
        lines.append(f"(assert ({c.relation} {_smt_poly(c.poly)} 0))")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"


def export_system(system: ConstraintSystem, fmt: str) -> str:
    if fmt == "json":
        return system_to_json(system)
    if fmt == "smt2":
        return system_to_smtlib2(system)
    raise ValueError(f"unknown export format {fmt!r}")
