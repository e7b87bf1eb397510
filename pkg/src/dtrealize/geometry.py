"""Exact rational plane geometry: the predicates every other module trusts.

All arithmetic here is over ``fractions.Fraction`` (arbitrary precision,
always canonical), so every predicate is exact. Floating point never enters
this module; callers bridge floats in via :func:`rationalize`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

Rat = Fraction


class GeometryError(ValueError):
    pass


class CollinearTriple(GeometryError):
    """Raised where a predicate needs three non-collinear points."""


class NonFinite(GeometryError):
    """Raised when a float to be rationalized is NaN or infinite."""


class AllCollinear(GeometryError):
    """Raised by convex_hull when no triangle exists in the input."""


class RatPoint(NamedTuple):
    x: Rat
    y: Rat


def pt(x, y) -> RatPoint:
    """Build a RatPoint from anything Fraction accepts (int, str "a/b", Fraction)."""
    return RatPoint(Fraction(x), Fraction(y))


def con_poly(p0: RatPoint, p1: RatPoint, p2: RatPoint) -> Rat:
    """Orientation form deciding the turn at p1 along p0 -> p1 -> p2.

    Positive means a right (clockwise) turn, negative a left turn,
    zero collinear.
    """
    x0, y0 = p0
    x1, y1 = p1
    x2, y2 = p2
    return x2 * y1 - x2 * y0 - x0 * y1 - x1 * y2 + x1 * y0 + x0 * y2


def dist_sq(p: RatPoint, q: RatPoint) -> Rat:
    return (p.x - q.x) ** 2 + (p.y - q.y) ** 2


def in_circle_sign(a: RatPoint, b: RatPoint, c: RatPoint, q: RatPoint) -> int:
    """Exact position of q relative to the circumcircle of {a, b, c}.

    Returns +1 strictly inside, 0 on the circle, -1 strictly outside.
    The result does not depend on the order of a, b, c.
    """
    orient = con_poly(a, b, c)
    if orient == 0:
        raise CollinearTriple(f"collinear triple {a}, {b}, {c}")
    # 3x3 determinant of lifted difference vectors; its sign times the
    # orientation sign of (a,b,c) is the in-circle test. With con_poly > 0
    # meaning clockwise, det > 0 for q inside when (a,b,c) is counterclockwise.
    ax, ay = a.x - q.x, a.y - q.y
    bx, by = b.x - q.x, b.y - q.y
    cx, cy = c.x - q.x, c.y - q.y
    det = (
        (ax * ax + ay * ay) * (bx * cy - cx * by)
        - (bx * bx + by * by) * (ax * cy - cx * ay)
        + (cx * cx + cy * cy) * (ax * by - bx * ay)
    )
    # con_poly > 0 is clockwise, i.e. negative ccw orientation.
    det = det if orient < 0 else -det
    if det > 0:
        return 1
    if det < 0:
        return -1
    return 0


def circumcenter(a: RatPoint, b: RatPoint, c: RatPoint) -> RatPoint:
    """Exact point equidistant from a, b and c."""
    d = 2 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y))
    if d == 0:
        raise CollinearTriple(f"collinear triple {a}, {b}, {c}")
    a2 = a.x * a.x + a.y * a.y
    b2 = b.x * b.x + b.y * b.y
    c2 = c.x * c.x + c.y * c.y
    ux = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d
    uy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d
    return RatPoint(ux, uy)


def rationalize(x: float, max_denominator: int) -> Rat:
    """Best rational approximation to x with denominator <= max_denominator."""
    if isinstance(x, float) and not math.isfinite(x):
        raise NonFinite(f"cannot rationalize {x!r}")
    return Fraction(x).limit_denominator(max_denominator)


class HullResult(NamedTuple):
    hull: list[int]          # input indices, clockwise, strictly convex
    collinear_dropped: list[int]  # indices on the hull boundary but not corners


def convex_hull(points: Sequence[RatPoint]) -> HullResult:
    """Exact convex hull; clockwise corner indices.

    Collinear boundary points are excluded from the cycle and reported in
    ``collinear_dropped`` (a general-position warning for callers).
    """
    if len(points) < 3:
        raise AllCollinear("need at least 3 points")
    order = sorted(range(len(points)), key=lambda i: points[i])
    # Monotone chain; con_poly <= 0 drops left turns and collinear runs.
    def chain(idx: Iterable[int]) -> list[int]:
        out: list[int] = []
        for i in idx:
            while len(out) >= 2 and con_poly(points[out[-2]], points[out[-1]], points[i]) <= 0:
                out.pop()
            out.append(i)
        return out

    upper = chain(order)          # left-to-right, right turns: upper chain
    lower = chain(reversed(order))
    hull = upper[:-1] + lower[:-1]
    if len(hull) < 3:
        raise AllCollinear("all points collinear")
    hull_set = set(hull)
    dropped = []
    m = len(hull)
    for i, p in enumerate(points):
        if i in hull_set:
            continue
        for k in range(m):
            a, b = points[hull[k]], points[hull[(k + 1) % m]]
            if con_poly(a, p, b) == 0 and min(a.x, b.x) <= p.x <= max(a.x, b.x) \
                    and min(a.y, b.y) <= p.y <= max(a.y, b.y):
                dropped.append(i)
                break
    return HullResult(hull, sorted(dropped))
