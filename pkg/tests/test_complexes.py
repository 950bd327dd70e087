"""Core complex operations: face lattices, links, subdivisions, canonical forms."""

import itertools
import math
import random

import pytest

from morselab.complexes import (
    ComplexError,
    FacePoset,
    SimplicialComplex,
    face_poset,
    order_complex,
)

TRIANGLE = [[1, 2, 3]]
BD_TETRA = [[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]]
SOLID_TETRA = [[1, 2, 3, 4]]
OCTAHEDRON = [
    [1, 2, 5], [2, 3, 5], [3, 4, 5], [1, 4, 5],
    [1, 2, 6], [2, 3, 6], [3, 4, 6], [1, 4, 6],
]


def simplex_boundary(n):
    """Boundary of the n-simplex on vertices 1..n+1."""
    verts = list(range(1, n + 2))
    return [list(f) for f in itertools.combinations(verts, n)]


def test_triangle_f_vector():
    K = SimplicialComplex.from_facets(TRIANGLE)
    assert K.f_vector() == (3, 3, 1)
    assert K.dim == 2


def test_boundary_tetra_euler():
    K = SimplicialComplex.from_facets(BD_TETRA)
    assert K.euler_characteristic() == 2
    assert K.f_vector() == (4, 6, 4)


def test_duplicate_vertex_rejected():
    with pytest.raises(ComplexError):
        SimplicialComplex.from_facets([[1, 1, 2]])


def test_empty_input_rejected():
    with pytest.raises(ComplexError):
        SimplicialComplex.from_facets([])


def test_non_maximal_faces_dropped():
    K = SimplicialComplex.from_facets([[1, 2, 3], [1, 2], [3]])
    assert len(K.facets) == 1


def test_face_poset_counts():
    assert len(face_poset(SimplicialComplex.from_facets(TRIANGLE))) == 7
    assert len(face_poset(SimplicialComplex.from_facets(BD_TETRA))) == 14
    # oracle: number of proper nonempty subsets of a 5-set
    expected = sum(math.comb(5, k) for k in range(1, 5))
    K = SimplicialComplex.from_facets(simplex_boundary(4))
    assert len(face_poset(K)) == expected == 30


def test_face_poset_diamond_and_dd():
    P = face_poset(SimplicialComplex.from_facets(BD_TETRA))
    assert P.diamond_property()
    assert P.boundary_of_boundary_vanishes_mod2()


def test_link_of_vertex_in_bd_tetra():
    K = SimplicialComplex.from_facets(BD_TETRA)
    L = K.link(K.face_from_labels([1]))
    assert L.dim == 1
    assert L.f_vector() == (3, 3)
    assert L.euler_characteristic() == 0  # a 3-cycle


def test_link_of_edge_in_bd_tetra():
    K = SimplicialComplex.from_facets(BD_TETRA)
    L = K.link(K.face_from_labels([1, 2]))
    assert L.dim == 0 and len(L.facets) == 2


def test_link_of_non_face_errors():
    K = SimplicialComplex.from_facets(BD_TETRA)
    with pytest.raises(ComplexError):
        K.face_from_labels([1, 5])
    with pytest.raises(ComplexError):
        K.link((0, 9))


def test_star_deletion_removal():
    K = SimplicialComplex.from_facets(BD_TETRA)
    v = K.face_from_labels([1])
    assert len(K.star(v).facets) == 3
    assert K.deletion(v).f_vector() == (3, 3, 1)
    R = K.removal(K.face_from_labels([1, 2, 3]))
    assert R.f_vector() == (4, 6, 3)


def test_pseudomanifold_check():
    closed = SimplicialComplex.from_facets(BD_TETRA).pseudomanifold_check()
    assert closed.is_pseudo_manifold and closed.is_closed
    assert closed.boundary.is_empty()

    two = SimplicialComplex.from_facets([[1, 2, 3], [1, 2, 4]]).pseudomanifold_check()
    assert two.is_pseudo_manifold and not two.is_closed
    assert len(two.boundary.faces(1)) == 4

    three = SimplicialComplex.from_facets(
        [[1, 2, 3], [1, 2, 4], [1, 2, 5]]
    ).pseudomanifold_check()
    assert not three.is_pseudo_manifold
    assert three.max_ridge_degree == 3


def test_boundary_complex():
    solid = SimplicialComplex.from_facets(SOLID_TETRA)
    assert solid.boundary_complex().is_isomorphic(
        SimplicialComplex.from_facets(BD_TETRA)
    )
    assert SimplicialComplex.from_facets(BD_TETRA).boundary_complex().is_empty()
    tri = SimplicialComplex.from_facets(TRIANGLE)
    assert tri.boundary_complex().f_vector() == (3, 3)
    with pytest.raises(ComplexError):
        SimplicialComplex.from_facets([[1, 2, 3], [4, 5]]).boundary_complex()


def test_dual_graph():
    solid = SimplicialComplex.from_facets(SOLID_TETRA)
    assert sum(len(v) for v in solid.dual_graph().values()) == 0
    bd = SimplicialComplex.from_facets(BD_TETRA)
    adj = bd.dual_graph()
    assert all(len(v) == 3 for v in adj.values())  # K4
    pair = SimplicialComplex.from_facets([[1, 2, 3, 4], [2, 3, 4, 5]])
    assert sum(len(v) for v in pair.dual_graph().values()) == 2


def test_cone_and_suspension():
    bd = SimplicialComplex.from_facets(BD_TETRA)
    C = bd.cone(5)
    assert C.n_vertices == 5 and len(C.facets) == 4
    assert C.euler_characteristic() == 1
    with pytest.raises(ComplexError):
        bd.cone(1)
    cyc = SimplicialComplex.from_facets([[1, 2], [2, 3], [1, 3]])
    S = cyc.suspension()
    assert len(S.facets) == 6
    assert S.euler_characteristic() == 2


def test_sd_triangle():
    K = SimplicialComplex.from_facets(TRIANGLE)
    sd = K.barycentric_subdivision()
    assert sd.f_vector() == (7, 12, 6)
    assert len(sd.facets) == 6


def test_sd_bd_tetra_f_vector_via_chain_oracle():
    K = SimplicialComplex.from_facets(BD_TETRA)
    faces = K.all_faces()
    # oracle: count chains of lengths 1..3 in the face lattice directly
    n1 = len(faces)
    n2 = sum(
        1 for a, b in itertools.permutations(faces, 2) if set(a) < set(b)
    )
    n3 = sum(
        1
        for a, b, c in itertools.permutations(faces, 3)
        if set(a) < set(b) < set(c)
    )
    assert (n1, n2, n3) == (14, 36, 24)
    sd = K.barycentric_subdivision()
    assert sd.f_vector() == (14, 36, 24)
    assert sd.euler_characteristic() == K.euler_characteristic()


def test_order_complex_matches_sd():
    for facets in (TRIANGLE, BD_TETRA, SOLID_TETRA):
        K = SimplicialComplex.from_facets(facets)
        oc = order_complex(face_poset(K))
        assert oc.is_isomorphic(K.barycentric_subdivision())


def test_poset_json_round_trip():
    P = face_poset(SimplicialComplex.from_facets(BD_TETRA))
    Q = FacePoset.from_json(P.to_json())
    assert Q.poset_hash() == P.poset_hash()
    assert Q.cell_counts() == P.cell_counts()


def test_canonical_form_relabel_invariance():
    rng = random.Random(7)
    for facets in (BD_TETRA, OCTAHEDRON, [[1, 2, 3], [2, 3, 4], [3, 4, 5]]):
        K = SimplicialComplex.from_facets(facets)
        base = K.canonical_form()
        labels = list(K.labels)
        for _ in range(100):
            perm = labels[:]
            rng.shuffle(perm)
            mapping = dict(zip(labels, perm))
            assert K.relabeled(mapping).canonical_form() == base


def test_canonical_form_distinguishes():
    tri = SimplicialComplex.from_facets(TRIANGLE)
    path = SimplicialComplex.from_facets([[1, 2], [2, 3], [3, 4]])
    assert tri.canonical_form() != path.canonical_form()
    bd = SimplicialComplex.from_facets(BD_TETRA)
    octa = SimplicialComplex.from_facets(OCTAHEDRON)
    assert bd.canonical_form() != octa.canonical_form()
    relabeled = SimplicialComplex.from_facets([["a", "b", "c"], ["a", "b", "d"],
                                               ["a", "c", "d"], ["b", "c", "d"]])
    assert bd.is_isomorphic(relabeled)


def test_dual_graph_node_count_property():
    for facets in (TRIANGLE, BD_TETRA, OCTAHEDRON):
        K = SimplicialComplex.from_facets(facets)
        assert len(K.dual_graph()) == len(K.facets)
