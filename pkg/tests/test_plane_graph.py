"""Rotation systems, face traversal, validation, Tutte embedding."""

import math

import pytest

from dtrealize.geometry import con_poly, pt
from dtrealize.plane_graph import (AsymmetricEdge, FaceNotFound, NotConnected,
                                   PlaneGraphError, PlaneTriangulation, _same_cycle,
                                   build_triangulation, candidate_outer_faces,
                                   faces_from_rotation, reembed_with_outer_face,
                                   tutte_embedding, validate_triangulation)

# K4 with vertex 4 in the middle of triangle 1-2-3; outer face (1,3,2) clockwise.
K4_ROT = {1: [2, 4, 3], 2: [3, 4, 1], 3: [1, 4, 2], 4: [1, 2, 3]}
K4_OUTER = (1, 3, 2)


def k4():
    return build_triangulation(4, K4_ROT, K4_OUTER)


def fan5():
    rot = {1: [5, 4, 3, 2], 2: [3, 1], 3: [4, 2, 1], 4: [5, 3, 1], 5: [4, 1]}
    return build_triangulation(5, rot, (1, 2, 3, 4, 5))


def test_faces_from_rotation_k4():
    faces = faces_from_rotation(K4_ROT)
    assert len(faces) == 4
    canon = {tuple(sorted(f)) for f in faces}
    assert canon == {(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)}


def test_face_count_fan():
    G = fan5()
    assert len(G.faces) == 4          # 3 inner triangles + outer face
    assert len(G.inner_faces()) == 3
    assert sorted(len(f) for f in G.faces) == [3, 3, 3, 5]


def test_edges_and_pairs():
    G = k4()
    assert G.edge_pairs() == [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
    assert fan5().edge_pairs() == [(1, 2), (1, 3), (1, 4), (1, 5),
                                   (2, 3), (3, 4), (4, 5)]


def test_asymmetric_edge_raises():
    with pytest.raises(AsymmetricEdge):
        faces_from_rotation({1: [2], 2: []})


def test_disconnected_raises():
    with pytest.raises(NotConnected):
        faces_from_rotation({1: [2], 2: [1], 3: [4], 4: [3]})


def test_build_normalizes_reflection():
    mirrored = {u: list(reversed(v)) for u, v in K4_ROT.items()}
    G = build_triangulation(4, mirrored, K4_OUTER)
    report = validate_triangulation(G)
    assert report.ok
    # outer face must appear with the requested orientation among face cycles
    assert any(_same_cycle(f, K4_OUTER) for f in G.faces)


def test_build_rejects_non_face():
    with pytest.raises(PlaneGraphError):
        build_triangulation(4, K4_ROT, (1, 2, 4, 3))


def test_validate_good_instances():
    assert validate_triangulation(k4()).ok
    assert validate_triangulation(fan5()).ok


def test_validate_bad_labels():
    G = PlaneTriangulation(3, {1: [2, 5], 2: [5, 1], 5: [1, 2]}, (1, 2, 5))
    report = validate_triangulation(G)
    assert not report.ok
    assert report.violations[0].rule == "BAD_LABELS"


def test_validate_too_small():
    G = build_triangulation(3, {1: [2, 3], 2: [3, 1], 3: [1, 2]}, (1, 3, 2))
    report = validate_triangulation(G)
    rules = {v.rule for v in report.violations}
    assert "TOO_SMALL" in rules


def test_validate_nontriangular_inner_face():
    # plain 4-cycle: the inner face is a quadrilateral
    rot = {1: [2, 4], 2: [3, 1], 3: [4, 2], 4: [1, 3]}
    G = build_triangulation(4, rot, (1, 2, 3, 4))
    report = validate_triangulation(G)
    rules = {v.rule for v in report.violations}
    assert "NONTRIANGULAR_INNER_FACE" in rules


def test_validate_cut_vertex():
    # two triangles glued at vertex 1 (bowtie) - vertex 1 is a cut vertex
    rot = {1: [2, 3, 4, 5], 2: [3, 1], 3: [1, 2], 4: [5, 1], 5: [1, 4]}
    faces = faces_from_rotation(rot)
    outer = max(faces, key=len)
    G = PlaneTriangulation(5, rot, tuple(outer))
    report = validate_triangulation(G)
    rules = {v.rule for v in report.violations}
    assert "NOT_2_CONNECTED" in rules


def test_validate_outer_not_a_face():
    G = PlaneTriangulation(4, K4_ROT, (1, 2, 4, 3))
    report = validate_triangulation(G)
    assert not report.ok
    assert any(v.rule == "OUTER_FACE_NOT_A_FACE" for v in report.violations)


def test_candidate_outer_faces():
    # maximal planar: every face is a candidate, current outer first
    cands = candidate_outer_faces(k4())
    assert len(cands) == 4
    assert _same_cycle(cands[0], K4_OUTER)
    # longer outer face: fixed
    assert candidate_outer_faces(fan5()) == [[1, 2, 3, 4, 5]]


def test_reembed_with_outer_face():
    G = k4()
    other = next(f for f in G.faces if not _same_cycle(f, G.outer_face))
    H = reembed_with_outer_face(G, other)
    assert H.rotation == G.rotation
    assert _same_cycle(H.outer_face, other)
    assert validate_triangulation(H).ok
    with pytest.raises(FaceNotFound):
        reembed_with_outer_face(G, [1, 2, 4, 3])


def test_tutte_outer_polygon_clockwise():
    G = fan5()
    pos = tutte_embedding(G, polygon_radius=2.0)
    outer = list(G.outer_face)
    for u in outer:
        x, y = pos[u - 1]
        assert math.isclose(math.hypot(x, y), 2.0, rel_tol=1e-9)
    k = len(outer)
    for t in range(k):
        a, b, c = (pt(*map(lambda z: round(z, 9), pos[outer[(t + d) % k] - 1]))
                   for d in range(3))
        assert con_poly(a, b, c) > 0    # clockwise means right turns


def test_tutte_interior_barycentric():
    G = k4()
    pos = tutte_embedding(G)
    x4, y4 = pos[3]
    nx = sum(pos[v - 1][0] for v in G.rotation[4]) / 3
    ny = sum(pos[v - 1][1] for v in G.rotation[4]) / 3
    assert math.isclose(x4, nx, abs_tol=1e-9)
    assert math.isclose(y4, ny, abs_tol=1e-9)


def test_tutte_deterministic():
    G = fan5()
    assert tutte_embedding(G) == tutte_embedding(G)
