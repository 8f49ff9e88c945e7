import itertools
import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from strataudit.complex import SimplicialComplex2D
from strataudit.constructions import example_triangle, lower_bound_complex, random_cycle_graph
from strataudit.geometry import TWO_PI, Arc, ArcSet, make_rng
from strataudit.sampling import (
    DirectionSet,
    UnhitStrataWarning,
    corpus_direction_set,
    corpus_distance,
    discrete_transform,
    epsilon_net,
    greedy_hitting_set,
    missed_rows_csv,
    missed_vertices,
    nested_random,
    transform_distance,
    uniform_grid,
    uniform_random,
)
from strataudit.stratification import coarse_stratification, observing_regions, stratum_representatives


def test_grid_pinned():
    g = uniform_grid(4)
    assert g.directions == (0.0, math.pi / 2, math.pi, 3 * math.pi / 2)
    assert uniform_grid(4, 0.1).directions[0] == 0.1
    with pytest.raises(ValueError):
        uniform_grid(0)


def test_direction_set_dedup_and_text():
    d = DirectionSet((0.5, 0.5, TWO_PI + 0.5, 1.0))
    assert d.directions == (0.5, 1.0)
    assert DirectionSet.from_text("# header\n" + d.to_text()) == d


def test_random_is_seeded():
    assert uniform_random(10, 3) == uniform_random(10, 3)
    assert uniform_random(10, 3) != uniform_random(10, 4)


def test_nested_random_is_nested():
    sets = nested_random((4, 8, 16), 9)
    assert set(sets[4]) <= set(sets[8]) <= set(sets[16])


@pytest.mark.parametrize("eps,k", [(1.0, 7), (math.pi / 2, 4), (TWO_PI / 3, 3), (0.01, 629)])
def test_epsilon_net_size(eps, k):
    assert len(epsilon_net(eps)) == k


@given(st.floats(1e-3, 3.0), st.floats(0, TWO_PI), st.floats(1.0001, 2.0))
def test_epsilon_net_hits_long_arcs(eps, start, factor):
    net = epsilon_net(eps)
    arc = Arc(start, min(eps * factor, TWO_PI))
    assert any(arc.contains(d) for d in net)


def test_lower_bound_grid_misses_apexes():
    lb = lower_bound_complex(3)
    miss = missed_vertices(lb.complex, uniform_grid(4), lb.regions)
    assert set(lb.apex_ids) <= miss
    S = coarse_stratification(lb.complex.vertices)
    assert missed_vertices(lb.complex, stratum_representatives(S), lb.regions) == set()


def test_missed_empty_region_counts():
    # seen from straight up, only the lowest corner of a filled triangle changes topology
    K = SimplicialComplex2D.build([(0, 0), (2, 1), (1, 3)], triangles=[(0, 1, 2)])
    assert missed_vertices(K, [math.pi / 2]) == {1, 2}


def test_greedy_hitting_set_covers():
    K = random_cycle_graph(8, make_rng(2))
    S = coarse_stratification(K.vertices)
    regs = observing_regions(K, S)
    chosen = greedy_hitting_set(regs, S)
    assert missed_vertices(K, chosen, regs) == set()
    assert len(chosen) <= len(S.cells)


def test_degenerate_direction_is_nudged():
    K = example_triangle()
    crit = coarse_stratification(K.vertices).critical_angles[0]
    with pytest.warns(UserWarning, match="degenerate"):
        T = discrete_transform(K, [crit], "pd")
    assert T.directions == [crit]


def test_corpus_distance_basic():
    rng = make_rng(5)
    A, B = random_cycle_graph(5, rng), random_cycle_graph(5, rng)
    P = corpus_direction_set([A, B])
    assert corpus_distance(A, A, P) == 0.0
    d = corpus_distance(A, B, P)
    assert d > 0 and d == corpus_distance(B, A, P)
    assert corpus_distance(A, B, P, "pd") > 0


def test_sparse_set_warns():
    rng = make_rng(6)
    A, B = random_cycle_graph(5, rng), random_cycle_graph(5, rng)
    with pytest.warns(UnhitStrataWarning):
        corpus_distance(A, B, [0.3])


def test_transform_distance_needs_same_directions():
    K = example_triangle()
    with pytest.raises(ValueError):
        transform_distance(discrete_transform(K, [0.1]), discrete_transform(K, [0.2]))


@given(st.integers(0, 2**31))
def test_missed_fraction_antitone_under_nesting(seed):
    K = random_cycle_graph(7, make_rng(seed))
    regs = observing_regions(K)
    sets = nested_random((4, 8, 16, 32), seed)
    counts = [len(missed_vertices(K, sets[k], regs)) for k in (4, 8, 16, 32)]
    assert counts == sorted(counts, reverse=True)


def test_missed_csv_header():
    text = missed_rows_csv([{"complex_id": "a", "k_or_eps": 4, "scheme": "grid", "seed": "",
                             "n0": 3, "missed_count": 1, "missed_fraction": 1 / 3}])
    assert text.splitlines()[0] == "complex_id,k_or_eps,scheme,seed,n0,missed_count,missed_fraction"
