from __future__ import annotations

import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (
    all_simple_paths_metric,
    axiom_violations,
    brute_ultrametric,
    pairwise_distortion,
    random_graph,
    random_metric,
)
from urykit import (
    INFINITE,
    FiniteMetricSpace,
    InputError,
    PartialMap,
    WeightedGraph,
    distortion,
    is_ultrametric,
    path_completion,
    spectrum,
    validate_metric,
)


def space(*rows):
    return FiniteMetricSpace.from_rows(rows)


def test_singleton_is_valid():
    assert validate_metric(space([0])).ok


def test_triangle_violation_witness():
    report = validate_metric(space([0, 1, 3], [1, 0, 1], [3, 1, 0]))
    assert not report.ok
    assert [(v.axiom, v.witness) for v in report.violations] == [("triangle", (0, 1, 2))]


@pytest.mark.parametrize("seed", range(20))
def test_validate_matches_triple_loop(seed):
    rng = random.Random(seed)
    n = 6
    d = [[F(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d[i][j] = d[j][i] = F(rng.randint(1, 9))
    report = validate_metric(FiniteMetricSpace.from_rows(d))
    assert {(v.axiom, v.witness) for v in report.violations} == axiom_violations(d)


def test_asymmetry_and_zero_reported():
    report = validate_metric(space([0, 1], [2, 0]))
    assert ("symmetry", (0, 1)) in {(v.axiom, v.witness) for v in report.violations}
    report = validate_metric(space([0, 0], [0, 0]))
    assert [(v.axiom, v.witness) for v in report.violations] == [("positivity", (0, 1))]


@pytest.mark.parametrize("rows", [([0, 1], [1]), ([0, -1], [-1, 0])])
def test_malformed_matrix_is_input_error(rows):
    with pytest.raises(InputError):
        validate_metric(FiniteMetricSpace.from_rows(rows))


def test_floats_rejected():
    with pytest.raises(InputError):
        space([0.0, 1.5], [1.5, 0.0])


def test_path_single_edge():
    assert path_completion(WeightedGraph.from_edges(2, [(0, 1, 1)])).d[0][1] == 1


def test_path_shortcut():
    g = WeightedGraph.from_edges(3, [(0, 1, 1), (1, 2, 1), (0, 2, 5)])
    assert path_completion(g).d[0][2] == 2
    assert all_simple_paths_metric(g)[0][2] == 2


def test_path_keeps_shortest_edges():
    g = WeightedGraph.from_edges(3, [(0, 1, 2), (1, 2, 3), (0, 2, 4)])
    d = path_completion(g).d
    assert (d[0][1], d[1][2], d[0][2]) == (2, 3, 4)


def test_disconnected_graph_rejected():
    with pytest.raises(InputError, match="disconnected"):
        path_completion(WeightedGraph.from_edges(3, [(0, 1, 1)]))


@pytest.mark.parametrize("edges", [[(0, 0, 1)], [(0, 1, 0)], [(0, 1, -1)], [(0, 5, 1)]])
def test_bad_graph_rejected(edges):
    with pytest.raises(InputError):
        WeightedGraph.from_edges(2, edges)


@pytest.mark.parametrize("seed", range(30))
def test_path_completion_matches_simple_paths(seed):
    rng = random.Random(seed)
    g = random_graph(rng, rng.randint(2, 8))
    out = path_completion(g)
    assert [list(r) for r in out.d] == all_simple_paths_metric(g)
    assert validate_metric(out).ok


@pytest.mark.parametrize("seed", range(10))
def test_path_completion_idempotent(seed):
    rng = random.Random(seed)
    once = path_completion(random_graph(rng, 7))
    assert path_completion(WeightedGraph.complete(once)) == once


def test_path_completion_independent_of_vertex_order():
    rng = random.Random(3)
    g = random_graph(rng, 7)
    perm = list(range(7))
    rng.shuffle(perm)
    shuffled = WeightedGraph(7, {frozenset(perm[v] for v in pair): w for pair, w in g.edges.items()})
    a, b = path_completion(g), path_completion(shuffled)
    assert all(a.d[i][j] == b.d[perm[i]][perm[j]] for i in range(7) for j in range(7))


def test_identity_distortion_is_one():
    x = random_metric(random.Random(0), 5)
    assert distortion(PartialMap.identity(x)) == 1


def test_single_ratio():
    m = PartialMap(space([0, 1], [1, 0]), space([0, F(3, 2)], [F(3, 2), 0]), ((0, 0), (1, 1)))
    assert distortion(m) == F(3, 2)


def test_fewer_than_two_pairs():
    x = space([0, 1], [1, 0])
    assert distortion(PartialMap(x, x)) == 1
    assert distortion(PartialMap(x, x, ((0, 1),))) == 1


def test_collapse_on_pseudometric_is_infinite():
    x = space([0, 1], [1, 0])
    y = space([0, 0], [0, 0])
    assert distortion(PartialMap(x, y, ((0, 0), (1, 1)))) == INFINITE


def test_non_injective_map_rejected():
    x = space([0, 1], [1, 0])
    with pytest.raises(InputError):
        PartialMap(x, x, ((0, 0), (1, 0)))


@pytest.mark.parametrize("seed", range(20))
def test_distortion_matches_pair_loop(seed):
    rng = random.Random(seed)
    x, y = random_metric(rng, 6), random_metric(rng, 6)
    targets = list(range(6))
    rng.shuffle(targets)
    m = PartialMap(x, y, tuple(zip(range(6), targets)))
    assert distortion(m) == pairwise_distortion(x.d, y.d, m.pairs)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.sets(st.integers(0, 5)))
def test_distortion_monotone_under_restriction(seed, keep):
    rng = random.Random(seed)
    x, y = random_metric(rng, 6), random_metric(rng, 6)
    m = PartialMap(x, y, tuple((i, i) for i in range(6)))
    assert distortion(m.restrict(keep)) <= distortion(m)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_spectrum_band_under_bijection(seed):
    rng = random.Random(seed)
    x, y = random_metric(rng, 5), random_metric(rng, 5)
    m = PartialMap(x, y, tuple((i, i) for i in range(5)))
    lam = distortion(m) + F(1, 100)
    sx, sy = spectrum(x), spectrum(y)
    assert all(any(s / lam < t < lam * s for t in sy) for s in sx)
    assert all(any(t / lam < s < lam * t for s in sx) for t in sy)


def test_spectrum_examples():
    assert spectrum(space([0])) == []
    assert spectrum(space([0, 2, 2], [2, 0, 2], [2, 2, 0])) == [2]


def test_ultrametric_examples():
    assert is_ultrametric(space([0, 5], [5, 0]))
    assert not is_ultrametric(space([0, 3, 5], [3, 0, 4], [5, 4, 0]))


@pytest.mark.parametrize("seed", range(10))
def test_ultrametric_matches_brute_force(seed):
    x = random_metric(random.Random(seed), 5)
    assert is_ultrametric(x) == brute_ultrametric(x.d)
