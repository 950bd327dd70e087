"""Matchings, collapse searches, boundary-critical construction, inequalities."""

import itertools
import random

import pytest

from morselab.complexes import ComplexError, SimplicialComplex, face_poset
from morselab.homology import homology
from morselab.morse import (
    Budget,
    CollapseSequence,
    MatchingError,
    MorseMatching,
    boundary_critical_morse,
    collapse_depth,
    collapse_search,
    is_collapsible,
    is_endo_collapsible,
    matching_from_collapse,
    matching_to_function,
    pairs_from_function,
    validate_matching,
    verify_morse_inequalities,
)

TRIANGLE = [[1, 2, 3]]
BD_TETRA = [[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]]
SOLID_TETRA = [[1, 2, 3, 4]]
OCTAHEDRON = [
    [1, 2, 5], [2, 3, 5], [3, 4, 5], [1, 4, 5],
    [1, 2, 6], [2, 3, 6], [3, 4, 6], [1, 4, 6],
]
TORUS = [
    [1, 2, 4], [2, 4, 5], [2, 3, 5], [3, 5, 6], [3, 4, 6], [4, 6, 7],
    [4, 5, 7], [5, 7, 1], [5, 6, 1], [6, 1, 2], [6, 7, 2], [7, 2, 3],
    [7, 1, 3], [1, 3, 4],
]


def bd_simplex(n):
    verts = list(range(1, n + 2))
    return [list(f) for f in itertools.combinations(verts, n)]


def test_empty_matching_on_triangle():
    K = SimplicialComplex.from_facets(TRIANGLE)
    m = validate_matching(face_poset(K), [])
    assert len(m.critical) == 7
    assert m.c == [3, 3, 1]


def test_matching_rejects_repeated_cell():
    K = SimplicialComplex.from_facets(TRIANGLE)
    P = face_poset(K)
    with pytest.raises(MatchingError):
        validate_matching(P, [((1,), (1, 2)), ((1,), (1, 3))])


def test_matching_rejects_non_cover():
    K = SimplicialComplex.from_facets(SOLID_TETRA)
    P = face_poset(K)
    with pytest.raises(MatchingError):
        validate_matching(P, [((1,), (1, 2, 3))])


def test_matching_acyclicity_witness():
    # two matched pairs forming a closed V-path along a 4-cycle of the
    # octahedron equator
    K = SimplicialComplex.from_facets(OCTAHEDRON)
    P = face_poset(K)
    pairs = [((1, 2), (1, 2, 5)), ((2, 5), (2, 3, 5)),
             ((2, 3), (2, 3, 6)), ((2, 6), (1, 2, 6))]
    with pytest.raises(MatchingError) as exc:
        validate_matching(P, pairs)
    assert exc.value.witness_cycle


def test_solid_tetra_near_perfect_matching():
    K = SimplicialComplex.from_facets(SOLID_TETRA)
    res = collapse_search(K, "point")
    assert res.status == "found"
    assert len(res.sequence.pairs) == 7
    m = matching_from_collapse(K, res.sequence)
    assert m.c == [1, 0, 0, 0]


def test_collapse_search_onto_vertex_and_impossibility():
    K = SimplicialComplex.from_facets(SOLID_TETRA)
    res = collapse_search(K, "point")
    assert res.status == "found" and res.sequence.replay(K)
    S = SimplicialComplex.from_facets(BD_TETRA)
    res = collapse_search(S, "point", strategy="exhaustive")
    assert res.status == "impossible"


def test_collapse_sd_solid_tetra():
    K = SimplicialComplex.from_facets(SOLID_TETRA).barycentric_subdivision()
    res = collapse_search(K, "point")
    assert res.status == "found"
    assert res.sequence.replay(K)


def test_collapse_pairs_weakly_decreasing():
    K = SimplicialComplex.from_facets(SOLID_TETRA).barycentric_subdivision()
    res = collapse_search(K, "point")
    dims = [len(hi) - 1 for _, hi in res.sequence.pairs]
    assert dims == sorted(dims, reverse=True)


def test_collapse_sequence_json_round_trip():
    K = SimplicialComplex.from_facets(SOLID_TETRA)
    res = collapse_search(K, "point")
    seq2 = CollapseSequence.from_json(res.sequence.to_json())
    assert seq2 == res.sequence
    assert seq2.replay(K)


def test_matching_to_function_round_trip():
    K = SimplicialComplex.from_facets(BD_TETRA)
    m = boundary_critical_morse(K)
    f = matching_to_function(m)
    assert sorted(pairs_from_function(m.poset, f)) == sorted(m.pair_tags())
    # dimension function works for the empty matching
    P = face_poset(SimplicialComplex.from_facets(TRIANGLE))
    empty = validate_matching(P, [])
    fdim = {P.tags[c]: P.dims[c] for c in range(len(P))}
    assert pairs_from_function(P, fdim) == []
    f2 = matching_to_function(empty)
    assert pairs_from_function(P, f2) == []


def test_boundary_critical_morse_on_ball():
    cone = SimplicialComplex.from_facets(BD_TETRA).cone(9)
    m = boundary_critical_morse(cone)
    assert m.is_equatorial()
    assert m.c_int == [0, 0, 0, 1]
    assert m.boundary_critical


def test_boundary_critical_morse_polar_on_sphere():
    S = SimplicialComplex.from_facets(BD_TETRA)
    m = boundary_critical_morse(S)
    assert m.is_polar()
    assert m.c[0] == 1 and m.c[2] == 1


def test_boundary_critical_morse_pinned_facet():
    S = SimplicialComplex.from_facets(OCTAHEDRON)
    delta = S.face_from_labels([3, 4, 6])
    m = boundary_critical_morse(S, delta=delta)
    assert (3, 4, 6) in m.critical_of_dim(2)


def test_boundary_critical_morse_rejects_low_dim():
    path = SimplicialComplex.from_facets([[1, 2], [2, 3]])
    with pytest.raises(ComplexError):
        boundary_critical_morse(path)


def test_endo_single_simplex():
    K = SimplicialComplex.from_facets(SOLID_TETRA)
    res = is_endo_collapsible(K)
    assert res.status == "yes"
    assert res.sequence.pairs == ()
    assert res.matching.is_equatorial()


def test_endo_spheres():
    for n in (2, 3):
        S = SimplicialComplex.from_facets(bd_simplex(n))
        res = is_endo_collapsible(S)
        assert res.status == "yes"
        assert res.matching.is_polar()
        assert res.sequence.replay(S)


def test_endo_torus_obstruction():
    T = SimplicialComplex.from_facets(TORUS)
    res = is_endo_collapsible(T)
    assert res.status == "obstruction"
    assert res.obstruction.dim == 1


def test_collapse_depth_simplex():
    for n in (2, 3):
        K = SimplicialComplex.from_facets([list(range(1, n + 2))])
        cert = collapse_depth(K)
        assert cert.claimed == n
        assert cert.status == "exact_proved_by_obstruction"


def test_collapse_depth_sphere_is_dim():
    S = SimplicialComplex.from_facets(bd_simplex(3))
    cert = collapse_depth(S)
    assert cert.claimed == S.dim == 2
    S4 = SimplicialComplex.from_facets(bd_simplex(4))
    cert = collapse_depth(S4)
    assert cert.claimed == S4.dim == 3


def test_verify_morse_inequalities_torus():
    T = SimplicialComplex.from_facets(TORUS)
    m = boundary_critical_morse(T)
    rep = verify_morse_inequalities(T, m)
    assert rep.all_hold
    # beta_1 = 2 forces at least two critical edges
    assert m.c[1] >= 2


def test_verify_morse_inequalities_ball():
    B = SimplicialComplex.from_facets(BD_TETRA).cone(9)
    m = boundary_critical_morse(B)
    rep = verify_morse_inequalities(B, m)
    assert rep.all_hold
    for row in rep.relative:
        if row.k < B.dim:
            assert row.lhs == 0


def test_relative_form_requires_boundary_critical():
    B = SimplicialComplex.from_facets(SOLID_TETRA)
    res = collapse_search(B, "point")
    m = matching_from_collapse(B, res.sequence)
    assert not m.boundary_critical
    with pytest.raises(MatchingError):
        verify_morse_inequalities(B, m)


def test_euler_identity_fuzz():
    rng = random.Random(21)
    runs = 0
    while runs < 120:
        n = rng.randint(4, 7)
        facets = []
        for _ in range(rng.randint(2, 6)):
            k = rng.choice([2, 3, 3, 4])
            facets.append(rng.sample(range(n), min(k, n)))
        K = SimplicialComplex.from_facets(facets)
        res = collapse_search(K, "point", strategy="random", seed=runs, restarts=2)
        if res.sequence is None:
            res = collapse_search(K, "point")
        if res.sequence is None:
            runs += 1
            continue
        m = matching_from_collapse(K, res.sequence)
        chi = K.euler_characteristic()
        assert sum((-1) ** k * c for k, c in enumerate(m.c)) == chi
        runs += 1


def test_budget_exhaustion_is_indeterminate():
    S = SimplicialComplex.from_facets(bd_simplex(3))
    res = is_endo_collapsible(S, budget=1)
    assert res.status == "indeterminate"
    cert = collapse_depth(S, budget=1)
    assert cert.status == "indeterminate"


def test_collapsible_detection():
    K = SimplicialComplex.from_facets(SOLID_TETRA)
    assert is_collapsible(K).status == "yes"
    S = SimplicialComplex.from_facets(BD_TETRA)
    assert is_collapsible(S).status == "proved_not"


def test_certificate_round_trip_via_validate():
    S = SimplicialComplex.from_facets(BD_TETRA)
    m = boundary_critical_morse(S)
    cert = m.to_certificate()
    P = face_poset(S)
    assert cert["poset_hash"] == P.poset_hash()
    m2 = validate_matching(P, cert["pairs"])
    assert m2.c == m.c
