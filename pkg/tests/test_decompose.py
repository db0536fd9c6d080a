import random

import pytest

from fractotal.decompose import (
    ConstraintGraph,
    SparseParams,
    aux_conflict_graph,
    decompose,
    greedy_boundary,
    path_partition,
    strong_colour,
    ternary_sequence,
    validate_strong_colouring,
    validate_ternary,
    verify_sparse,
)
from fractotal.graphs import GraphError, generate, total_distance, two_factorize_even


def cycle_factor(n):
    g = generate("cycle", n=n)
    return g, two_factorize_even(g)[0]


# --- ternary sequences --------------------------------------------------


def test_ternary_base_cases():
    assert ternary_sequence(6) == [0, 1, 2, 0, 1, 2]
    assert ternary_sequence(7) == [0, 1, 0, 2, 0, 1, 2]
    assert ternary_sequence(8) == [0, 1, 0, 2, 1, 0, 1, 2]
    # base for m=9 gets one 201 block before the final symbol
    assert ternary_sequence(9) == [0, 1, 2, 0, 1, 2, 0, 1, 2]


def test_ternary_exhaustive_validation():
    for m in range(6, 501):
        seq = ternary_sequence(m)
        assert len(seq) == m
        assert validate_ternary(seq) == [], m


def test_ternary_relaxed_short():
    assert validate_ternary(ternary_sequence(3, strict=False)) == []
    assert validate_ternary(ternary_sequence(4, strict=False)) == []
    for m in (3, 4, 5):
        with pytest.raises(GraphError):
            ternary_sequence(m)
    with pytest.raises(GraphError):
        ternary_sequence(5, strict=False)  # provably no valid sequence


def test_ternary_validator_catches_violations():
    assert validate_ternary([0, 1, 2, 2]) != []
    assert validate_ternary([1, 0, 2]) != []
    assert validate_ternary([0, 1, 2, 0]) != []


# --- path partition -----------------------------------------------------


def test_path_partition_exact_division():
    ell = 8
    g, F = cycle_factor(3 * ell)
    (paths,) = path_partition(F, ell)
    assert [len(p.edges) for p in paths] == [ell] * 3
    all_edges = [e for p in paths for e in p.edges]
    assert set(all_edges) == set(F.edges) and len(all_edges) == 3 * ell


def test_path_partition_remainder_first():
    ell = 8
    g, F = cycle_factor(3 * ell + 1)
    (paths,) = path_partition(F, ell)
    assert [len(p.edges) for p in paths] == [1, ell, ell, ell]


def test_path_partition_too_short():
    g, F = cycle_factor(8)
    with pytest.raises(GraphError):
        path_partition(F, 8)


# --- strong colouring ---------------------------------------------------


def test_strong_colour_no_constraints():
    classes = [["a", "b"], ["c", "d"]]
    aux = {x: set() for cls in classes for x in cls}
    col = strong_colour(aux, classes, 2)
    assert validate_strong_colouring(aux, classes, col, 2) == []


def test_strong_colour_small_exhaustive():
    # two classes of two, a conflict edge inside each pairing across classes
    classes = [["a", "b"], ["c", "d"]]
    aux = {"a": {"c"}, "c": {"a"}, "b": set(), "d": set()}
    col = strong_colour(aux, classes, 2)
    assert validate_strong_colouring(aux, classes, col, 2) == []
    assert col["a"] != col["c"]


def test_strong_colour_impossible_is_detected():
    classes = [["a", "b"]]
    aux = {"a": {"b"}, "b": {"a"}}
    col = strong_colour(aux, classes, 2)  # must use both colours anyway
    assert col["a"] != col["b"]
    # three mutually adjacent elements in distinct classes, two colours
    classes = [["a"], ["b"], ["c"]]
    aux = {"a": {"b", "c"}, "b": {"a", "c"}, "c": {"a", "b"}}
    with pytest.raises(GraphError):
        strong_colour(aux, classes, 2)


def test_strong_colour_random_desk_instances():
    rng = random.Random(0)
    ell = 8
    g, F = cycle_factor(6 * ell)
    paths = path_partition(F, ell)[0]
    classes = [list(p.edges) for p in paths]
    aux = aux_conflict_graph(g, F, None)
    col = strong_colour(aux, classes, ell, rng=rng)
    assert validate_strong_colouring(aux, classes, col, ell) == []


# --- decomposition ------------------------------------------------------


@pytest.mark.parametrize("ell,strict", [(8, False), (96, True)])
def test_decompose_cycle(ell, strict):
    g, F = cycle_factor(6 * ell)
    sets = decompose(g, F, SparseParams(ell=ell, strict=strict), seed=1)
    assert len(sets) == 3 * ell
    union = set()
    for b in sets:
        assert b.report["passed"], (b.colour, b.symbol, b.report)
        assert not (union & b.edges)
        union |= b.edges
    assert union == set(F.edges)


def test_decompose_respects_constraint_graph():
    ell = 8
    g, F = cycle_factor(6 * ell)
    cyc = F.cycles[0]
    edges = F.cycle_edges(cyc)
    ex = [edges[0], edges[-1]]  # the two F-edges at one vertex
    ey = [edges[23], edges[24]]
    Q = ConstraintGraph([(a, b) for a in ex for b in ey])
    assert Q.max_degree() == 2
    sets = decompose(g, F, SparseParams(ell=ell, strict=False), Q=Q, seed=3)
    for b in sets:
        assert not (b.edges & set(ex) and b.edges & set(ey))
        assert b.report["q_independent"]["passed"]


def test_decompose_strict_needs_large_ell():
    g, F = cycle_factor(48)
    with pytest.raises(GraphError):
        decompose(g, F, SparseParams(ell=8, strict=True), seed=0)


def test_sparse_params_bound():
    SparseParams(ell=96, strict=True).check_bound(0)
    with pytest.raises(GraphError):
        SparseParams(ell=88, strict=True).check_bound(2)  # needs 89
    SparseParams(ell=89, strict=True).check_bound(2)


# --- verify_sparse ------------------------------------------------------


def test_verify_sparse_pass():
    ell = 6
    g, F = cycle_factor(6 * ell)
    edges = F.cycle_edges(F.cycles[0])
    B = [edges[0], edges[12], edges[24]]
    rep = verify_sparse(g, F, B, ell)
    assert rep["passed"], rep


def test_verify_sparse_distance_witness():
    g, F = cycle_factor(48)
    edges = F.cycle_edges(F.cycles[0])
    rep = verify_sparse(g, F, [edges[0], edges[1]], 8)
    assert not rep["four_distant"]["passed"]
    w = rep["four_distant"]["witness"]
    assert total_distance(g, w[0], w[1]) < 4


def test_verify_sparse_length_and_cycle_coverage():
    g, F = cycle_factor(48)
    edges = F.cycle_edges(F.cycles[0])
    rep = verify_sparse(g, F, [edges[0]], 8)
    assert not rep["two_per_cycle"]["passed"]
    # one cut on a 48-cycle leaves a 47-path: above 7*ell for ell=6
    rep = verify_sparse(g, F, [edges[0]], 6)
    assert not rep["components"]["passed"]
    assert rep["components"]["witness"][0] == "component-length"
    # a cycle with no boundary edge at all is flagged
    rep = verify_sparse(g, F, [], 6)
    assert not rep["components"]["passed"]
    assert rep["components"]["witness"][0] == "cycle-without-boundary"


def test_greedy_boundary_on_random_graph(random200, random200_factor):
    B = greedy_boundary(random200, random200_factor)
    for i, a in enumerate(B):
        for b in B[i + 1 :]:
            assert total_distance(random200, a, b) >= 4
    bset = set(B)
    for cyc in random200_factor.cycles:
        assert any(e in bset for e in random200_factor.cycle_edges(cyc))
