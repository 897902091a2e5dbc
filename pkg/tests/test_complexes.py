import numpy as np
import pytest

from diskflow.complexes import (
    TopologicalTriangulation,
    build_complex,
    csaszar_torus,
    euler_characteristic,
    from_vertex_triples,
    genus2_octagon,
    octagon_cone,
    pillow,
    subdivide,
    tetrahedron,
    two_triangle_torus,
    vertex_edge_incidence,
)
from diskflow.errors import DuplicateSide, SelfGluedSide, UnknownVertex, UnmatchedSide

from helpers import random_complex


def test_tetrahedron_counts():
    T = tetrahedron()
    assert (T.face_count, T.edge_count, T.vertex_count) == (4, 6, 4)
    assert euler_characteristic(T) == 2


def test_pillow_counts():
    T = pillow()
    assert (T.face_count, T.edge_count, T.vertex_count) == (2, 3, 3)
    assert T.chi == 2


def test_two_triangle_torus():
    T = two_triangle_torus()
    assert (T.vertex_count, T.chi) == (1, 0)


def test_csaszar_torus():
    T = csaszar_torus()
    assert (T.face_count, T.edge_count, T.vertex_count) == (14, 21, 7)
    assert T.chi == 0


def test_genus2_octagon():
    T = genus2_octagon()
    assert (T.face_count, T.edge_count, T.vertex_count) == (6, 9, 1)
    assert T.chi == -2


def test_octagon_cone():
    T = octagon_cone()
    assert (T.face_count, T.edge_count, T.vertex_count) == (8, 12, 2)
    assert T.chi == -2


def test_edge_face_relation():
    rng = np.random.default_rng(0)
    for F in (4, 6, 8, 10):
        T = random_complex(rng, F)
        assert 2 * T.edge_count == 3 * T.face_count
        assert sum(len(c) for c in T.corners_of_vertex) == 3 * T.face_count


def test_vertex_edge_incidence_tetrahedron():
    T = tetrahedron()
    for v in range(4):
        inc = vertex_edge_incidence(T, v)
        assert len(inc) == 3
        assert len(set(inc)) == 3


def test_vertex_edge_incidence_pillow():
    T = pillow()
    for v in range(3):
        assert len(vertex_edge_incidence(T, v)) == 2


def test_handshake():
    rng = np.random.default_rng(1)
    for T in (genus2_octagon(), octagon_cone(), random_complex(rng, 8)):
        total = sum(len(vertex_edge_incidence(T, v)) for v in range(T.vertex_count))
        assert total == 2 * T.edge_count


def test_unknown_vertex():
    with pytest.raises(UnknownVertex):
        vertex_edge_incidence(tetrahedron(), 99)


def test_unmatched_side():
    with pytest.raises(UnmatchedSide):
        build_complex(2, [((0, 0), (1, 0)), ((0, 1), (1, 2))])


def test_self_glued_side():
    with pytest.raises(SelfGluedSide):
        build_complex(2, [((0, 0), (0, 0)), ((0, 1), (1, 2)), ((0, 2), (1, 1))])


def test_duplicate_side():
    with pytest.raises(DuplicateSide):
        build_complex(
            2, [((0, 0), (1, 0)), ((0, 0), (1, 1)), ((0, 1), (1, 2))]
        )


def test_same_face_gluing_allowed():
    # two sides of one face glued to each other is legal
    T = build_complex(2, [((0, 0), (0, 1)), ((0, 2), (1, 0)), ((1, 1), (1, 2))])
    assert T.face_count == 2
    assert 2 * T.edge_count == 3 * T.face_count


def test_relabeling_invariance():
    rng = np.random.default_rng(2)
    T = random_complex(rng, 8)
    perm = rng.permutation(T.face_count)
    pairs = []
    for a, b in T.edges:
        fa, sa = divmod(a, 3)
        fb, sb = divmod(b, 3)
        pairs.append(((int(perm[fa]), sa), (int(perm[fb]), sb)))
    T2 = build_complex(T.face_count, pairs)
    assert T2.chi == T.chi
    assert T2.vertex_count == T.vertex_count


def test_serialization_roundtrip():
    for T in (tetrahedron(), genus2_octagon(), csaszar_torus()):
        T2 = TopologicalTriangulation.from_dict(T.to_dict())
        assert T2 == T
        assert (T2.face_count, T2.edge_count, T2.vertex_count) == (
            T.face_count,
            T.edge_count,
            T.vertex_count,
        )


def test_from_vertex_triples_rejects_ambiguity():
    with pytest.raises(ValueError):
        from_vertex_triples([(0, 1, 2), (0, 1, 3), (0, 1, 4)])  # pair (0,1) thrice


def test_from_vertex_triples_rejects_repeated_vertex():
    with pytest.raises(ValueError):
        from_vertex_triples([(0, 0, 1), (0, 1, 2)])


def test_subdivision_counts():
    for T, chi in ((tetrahedron(), 2), (genus2_octagon(), -2), (octagon_cone(), -2)):
        sub = subdivide(T)
        assert sub.complex.face_count == 4 * T.face_count
        assert sub.complex.chi == chi
        assert sub.complex.vertex_count == T.vertex_count + T.edge_count
        # every original edge owns two halves and two medials (one per side)
        assert sub.parent_edge.size == sub.complex.edge_count
        for e in range(T.edge_count):
            mine = sub.parent_edge == e
            assert (mine & ~sub.is_medial).sum() == 2
            assert (mine & sub.is_medial).sum() == 2
