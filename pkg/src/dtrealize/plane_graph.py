"""Combinatorial plane triangulations: representation, validation, embedding.

A triangulation is given by its rotation system (counterclockwise neighbor
order per vertex) plus a designated outer face stored as a clockwise cycle.
Faces are always derived from the rotation system, never trusted from input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class PlaneGraphError(ValueError):
    pass


class AsymmetricEdge(PlaneGraphError):
    pass


class NotConnected(PlaneGraphError):
    pass


class FaceNotFound(PlaneGraphError):
    pass


def _canon_cycle(cycle: Sequence[int]) -> tuple[int, ...]:
    """Rotate a cycle so its smallest vertex comes first (orientation kept)."""
    k = cycle.index(min(cycle))
    return tuple(cycle[k:]) + tuple(cycle[:k])


def _same_cycle(a: Sequence[int], b: Sequence[int]) -> bool:
    return len(a) == len(b) and _canon_cycle(list(a)) == _canon_cycle(list(b))


def faces_from_rotation(rotation: dict[int, list[int]]) -> list[list[int]]:
    """All face cycles of the combinatorial embedding.

    The face permutation maps a dart (u, v) to (v, w) where w follows u in
    the counterclockwise rotation at v; each directed edge then lies on
    exactly one face orbit. With counterclockwise rotations the outer face
    orbit comes out clockwise and inner faces counterclockwise.
    """
    for u, nbrs in rotation.items():
        if len(set(nbrs)) != len(nbrs) or u in nbrs:
            raise PlaneGraphError(f"rotation at {u} has duplicates or a self-loop")
        for v in nbrs:
            if v not in rotation or u not in rotation[v]:
                raise AsymmetricEdge(f"dart ({u},{v}) has no reciprocal")
    _check_connected(rotation)

    succ = {u: {nbrs[i]: nbrs[(i + 1) % len(nbrs)] for i in range(len(nbrs))}
            for u, nbrs in rotation.items()}
    seen: set[tuple[int, int]] = set()
    faces: list[list[int]] = []
    for u in sorted(rotation):
        for v in rotation[u]:
            if (u, v) in seen:
                continue
            face = []
            a, b = u, v
            while (a, b) not in seen:
                seen.add((a, b))
                face.append(a)
                a, b = b, succ[b][a]
            faces.append(face)
    return faces


def _check_connected(rotation: dict[int, list[int]]) -> None:
    verts = list(rotation)
    if not verts:
        raise NotConnected("empty graph")
    stack, seen = [verts[0]], {verts[0]}
    while stack:
        u = stack.pop()
        for v in rotation[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    if len(seen) != len(verts):
        raise NotConnected(f"reached {len(seen)} of {len(verts)} vertices")


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str
    elements: tuple = ()


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...] = ()


@dataclass(frozen=True)
class PlaneTriangulation:
    """Vertices are labeled 1..n; outer_face is clockwise."""

    n: int
    rotation: dict[int, list[int]]
    outer_face: tuple[int, ...]

    @property
    def edges(self) -> frozenset[frozenset[int]]:
        return frozenset(frozenset((u, v)) for u in self.rotation for v in self.rotation[u])

    def edge_pairs(self) -> list[tuple[int, int]]:
        """Undirected edges as sorted (i, j) pairs, ordered."""
        return sorted(tuple(sorted(e)) for e in self.edges)

    @property
    def faces(self) -> list[list[int]]:
        """All face cycles including the outer one."""
        return faces_from_rotation(self.rotation)

    def inner_faces(self) -> list[list[int]]:
        return [f for f in self.faces if not _same_cycle(f, self.outer_face)]

    def is_maximal_planar(self) -> bool:
        return len(self.outer_face) == 3


def build_triangulation(n: int, rotation: dict[int, list[int]],
                        outer_face: Sequence[int]) -> PlaneTriangulation:
    """Construct with orientation normalization.

    If the supplied outer face appears reversed among the derived face
    cycles, the input is a mirror image: all rotations are flipped so the
    clockwise-outer-face convention holds.
    """
    faces = faces_from_rotation(rotation)
    outer = tuple(outer_face)
    if any(_same_cycle(f, outer) for f in faces):
        return PlaneTriangulation(n, {u: list(v) for u, v in rotation.items()}, outer)
    flipped = {u: list(reversed(v)) for u, v in rotation.items()}
    faces = faces_from_rotation(flipped)
    if any(_same_cycle(f, outer) for f in faces):
        return PlaneTriangulation(n, flipped, outer)
    raise PlaneGraphError("outer_face is not a face of the embedding")


def validate_triangulation(G: PlaneTriangulation) -> ValidationReport:
    """Check every structural invariant; failures become report entries."""
    v: list[Violation] = []
    labels = sorted(G.rotation)
    if labels != list(range(1, G.n + 1)):
        v.append(Violation("BAD_LABELS", f"vertex labels are not 1..{G.n}", tuple(labels)))
        return ValidationReport(False, tuple(v))
    if G.n < 4:
        v.append(Violation("TOO_SMALL", f"n = {G.n} < 4", (G.n,)))

    try:
        faces = G.faces
    except PlaneGraphError as e:
        v.append(Violation("BAD_ROTATION", str(e)))
        return ValidationReport(False, tuple(v))

    edges = G.edge_pairs()
    ne, nf = len(edges), len(faces)
    if G.n - ne + nf != 2:
        v.append(Violation("EULER", f"V - E + F = {G.n - ne + nf}, expected 2"))
    if not any(_same_cycle(f, G.outer_face) for f in faces):
        v.append(Violation("OUTER_FACE_NOT_A_FACE",
                           "designated outer face is not a face cycle",
                           tuple(G.outer_face)))
        return ValidationReport(False, tuple(v))

    for f in faces:
        if len(set(f)) != len(f):
            v.append(Violation("FACE_NOT_A_CYCLE", "face repeats a vertex", tuple(f)))
    for f in G.inner_faces():
        if len(f) != 3:
            v.append(Violation("NONTRIANGULAR_INNER_FACE",
                               f"inner face has {len(f)} vertices", tuple(f)))

    outer = set(G.outer_face)
    for u in labels:
        deg = len(G.rotation[u])
        if deg < 2:
            v.append(Violation("LOW_DEGREE", f"vertex {u} has degree {deg}", (u,)))
        elif deg == 2 and u not in outer:
            v.append(Violation("DEGREE2_INTERIOR",
                               f"degree-2 vertex {u} is not on the outer face", (u,)))

    for u in labels:
        rot = {x: [y for y in G.rotation[x] if y != u] for x in labels if x != u}
        if rot and not _is_connected_adj(rot):
            v.append(Violation("NOT_2_CONNECTED", f"vertex {u} is a cut vertex", (u,)))

    return ValidationReport(not v, tuple(v))


def _is_connected_adj(adj: dict[int, list[int]]) -> bool:
    verts = list(adj)
    stack, seen = [verts[0]], {verts[0]}
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == len(verts)


def candidate_outer_faces(G: PlaneTriangulation) -> list[list[int]]:
    """Outer faces worth trying for realization.

    A non-maximal triangulation fixes its own outer face; a maximal planar
    one may be realized with any face outside, so every face is a candidate
    (current outer face first).
    """
    if len(G.outer_face) >= 4:
        return [list(G.outer_face)]
    faces = G.faces
    out = [f for f in faces if _same_cycle(f, G.outer_face)]
    out += [f for f in faces if not _same_cycle(f, G.outer_face)]
    return out


def reembed_with_outer_face(G: PlaneTriangulation, face: Sequence[int]) -> PlaneTriangulation:
    """Same rotation system, new outer face (maximal planar graphs only).

    The face orbits of the rotation system are unchanged by re-rooting, so
    only the designated outer cycle moves.
    """
    for f in G.faces:
        if _same_cycle(f, face) or _same_cycle(f, list(reversed(face))):
            if _same_cycle(f, G.outer_face):
                return G
            return PlaneTriangulation(G.n, G.rotation, tuple(f))
    raise FaceNotFound(f"{list(face)} is not a face of the triangulation")


def tutte_embedding(G: PlaneTriangulation, polygon_radius: float = 1.0,
                    rng: np.random.Generator | None = None) -> list[tuple[float, float]]:
    """Barycentric embedding used only as solver initialization.

    Outer vertices go on a regular polygon in clockwise order; interior
    vertices solve the neighbor-average linear system. On a singular system
    we fall back to random placement inside the polygon, since downstream
    correctness never depends on this being planar.
    """
    outer = list(G.outer_face)
    k = len(outer)
    pos: dict[int, tuple[float, float]] = {}
    for t, u in enumerate(outer):
        # decreasing angle = clockwise in standard orientation
        ang = math.pi / 2 - 2 * math.pi * t / k
        pos[u] = (polygon_radius * math.cos(ang), polygon_radius * math.sin(ang))

    interior = [u for u in sorted(G.rotation) if u not in pos]
    if not interior:
        return [pos[u] for u in range(1, G.n + 1)]

    idx = {u: i for i, u in enumerate(interior)}
    m = len(interior)
    A = np.zeros((m, m))
    bx = np.zeros(m)
    by = np.zeros(m)
    for u in interior:
        i = idx[u]
        nbrs = G.rotation[u]
        A[i, i] = len(nbrs)
        for v in nbrs:
            if v in idx:
                A[i, idx[v]] -= 1.0
            else:
                bx[i] += pos[v][0]
                by[i] += pos[v][1]
    try:
        xs = np.linalg.solve(A, bx)
        ys = np.linalg.solve(A, by)
        residual = max(np.max(np.abs(A @ xs - bx)), np.max(np.abs(A @ ys - by)))
        if not np.isfinite(residual) or residual > 1e-10:
            raise np.linalg.LinAlgError("residual too large")
        for u in interior:
            pos[u] = (float(xs[idx[u]]), float(ys[idx[u]]))
    except np.linalg.LinAlgError:
        rng = rng or np.random.default_rng(0)
        for u in interior:
            r = 0.5 * polygon_radius * math.sqrt(rng.uniform())
            a = rng.uniform(0, 2 * math.pi)
            pos[u] = (r * math.cos(a), r * math.sin(a))
    return [pos[u] for u in range(1, G.n + 1)]
