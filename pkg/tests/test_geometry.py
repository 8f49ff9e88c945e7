import itertools
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from strataudit.geometry import (
    TWO_PI,
    Arc,
    ArcSet,
    DegenerateError,
    angular_distance,
    general_position_check,
    make_rng,
    min_pairwise_line_angle,
    normalize_angle,
    perturb,
    vertex_angle,
)

from conftest import gp_points

angles = st.floats(0.0, TWO_PI, exclude_max=True, allow_nan=False)
lengths = st.floats(1e-3, TWO_PI - 1e-3)
arcsets = st.lists(st.tuples(angles, lengths), max_size=4).map(
    lambda xs: ArcSet.of(Arc(a, l) for a, l in xs))


def brute_line_angle(P):
    P = np.asarray(P, float)
    D = [P[j] - P[i] for i, j in itertools.combinations(range(len(P)), 2)]
    best = math.inf
    for a, b in itertools.combinations(D, 2):
        c = abs(a[0] * b[1] - a[1] * b[0])
        d = abs(a @ b)
        best = min(best, math.atan2(c, d))
    return best


def test_normalize_angle():
    assert normalize_angle(-0.5) == pytest.approx(TWO_PI - 0.5)
    assert normalize_angle(TWO_PI) == 0.0
    assert normalize_angle(7.0) == pytest.approx(7.0 - TWO_PI)


def test_vertex_angle_right():
    assert vertex_angle((-1, 0), (0, 1), (1, 0)) == pytest.approx(math.pi / 2)


def test_general_position_flags():
    rep = general_position_check([(0, 0), (1, 1), (2, 2)])
    assert rep.collinear_triples == [(0, 1, 2)]
    rep = general_position_check([(0, 0), (1, 2), (1, 5)])
    assert (1, 2, "x") in rep.shared_coordinate_pairs
    assert not rep.collinear_triples
    assert general_position_check([(0, 0), (2, 1), (1, 3)]).ok


def test_perturb_pinned_seed7():
    out = perturb([(0, 0), (1, 1)], 0.01, 7)
    assert out[0].x == 0.002501909332093339
    assert out[0].y == 0.007944276019391511
    assert out == perturb([(0, 0), (1, 1)], 0.01, 7)


def test_perturb_bounds_and_errors():
    P = np.zeros((500, 2))
    Q = np.asarray(perturb(P, 0.01, 3))
    assert np.all(Q >= -0.01) and np.all(Q < 0.01)
    with pytest.raises(ValueError):
        perturb(P, 0.0, 1)


def test_min_line_angle_triangle():
    assert min_pairwise_line_angle([(0, 0), (2, 1), (1, 3)]) == pytest.approx(math.pi / 4, abs=1e-15)


def test_min_line_angle_parallel_raises():
    with pytest.raises(DegenerateError):
        min_pairwise_line_angle([(0, 0), (1, 0), (0, 1), (1, 1)])
    with pytest.raises(ValueError):
        min_pairwise_line_angle([(0, 0), (1, 0)])


@pytest.mark.parametrize("n", [3, 5, 8, 13])
def test_min_line_angle_matches_brute_force(n):
    rng = make_rng(n)
    for _ in range(5):
        P = gp_points(rng, n)
        assert min_pairwise_line_angle(P, chunk=7) == pytest.approx(brute_line_angle(P), abs=1e-14)


def test_arc_contains_is_open():
    a = Arc(1.0, 0.5)
    assert a.contains(1.2)
    assert not a.contains(1.0)
    assert not a.contains(1.5)
    w = Arc(6.0, 1.0)
    assert w.contains(0.1) and not w.contains(5.9)


def test_arc_rejects_bad_length():
    with pytest.raises(ValueError):
        Arc(0.0, 0.0)
    with pytest.raises(ValueError):
        Arc(0.0, 7.0)


def test_adjacent_arcs_merge():
    s = ArcSet.of([Arc(0.0, 1.0), Arc(1.0, 1.0)])
    assert len(s) == 1 and s.arcs[0].length == pytest.approx(2.0)
    assert ArcSet.of([Arc(0.0, math.pi), Arc(math.pi, math.pi)]).is_full


def test_half_circle():
    h = ArcSet.half_circle((0.0, 1.0))
    assert h.arcs[0].start == pytest.approx(0.0)
    assert h.measure() == pytest.approx(math.pi)
    assert h.contains(math.pi / 2) and not h.contains(3 * math.pi / 2)


def test_intersection_wrapping():
    a = ArcSet.of([Arc(5.5, 1.5)])
    b = ArcSet.of([Arc(6.0, 1.0)])
    i = a.intersect(b)
    assert i.measure() == pytest.approx(1.0)
    assert i.contains(0.0 + 1e-6)


@given(arcsets)
def test_complement_partitions_measure(A):
    assert A.measure() + A.complement().measure() == pytest.approx(TWO_PI, abs=1e-9)
    assert A.intersect(A.complement()).measure() < 1e-9


@given(arcsets, arcsets)
def test_inclusion_exclusion(A, B):
    lhs = A.union(B).measure()
    rhs = A.measure() + B.measure() - A.intersect(B).measure()
    assert lhs == pytest.approx(rhs, abs=1e-9)


@given(arcsets, arcsets, angles)
def test_pointwise_algebra(A, B, x):
    # keep away from endpoints, where open/closed conventions differ
    ends = [e for S in (A, B) for a in S.arcs for e in (a.start, a.end)]
    assume(all(angular_distance(x, e) > 1e-7 for e in ends))
    assert A.union(B).contains(x) == (A.contains(x) or B.contains(x))
    assert A.intersect(B).contains(x) == (A.contains(x) and B.contains(x))
    assert A.complement().contains(x) == (not A.contains(x))


@given(arcsets)
def test_canonical_form(A):
    arcs = A.arcs
    assert all(a.length > 0 for a in arcs)
    assert list(arcs) == sorted(arcs, key=lambda a: a.start)
    for a, b in itertools.combinations(arcs, 2):
        assert ArcSet((a,)).intersect(ArcSet((b,))).is_empty


def test_sample_lands_inside():
    A = ArcSet.of([Arc(1.0, 0.2), Arc(4.0, 0.3)])
    pts = A.sample(200, make_rng(0))
    assert all(A.contains(p) or any(abs(p - a.start) < 1e-12 for a in A.arcs) for p in pts)
    with pytest.raises(ValueError):
        ArcSet.empty().sample(1, make_rng(0))
