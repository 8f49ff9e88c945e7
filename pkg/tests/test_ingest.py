import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from strataudit.complex import validate
from strataudit.constructions import example_triangle, random_small_complex
from strataudit.geometry import make_rng
from strataudit.ingest import (
    Contour,
    GrayImage,
    GSCError,
    PipelineRejected,
    PNMError,
    binarize,
    contour_pipeline,
    douglas_peucker,
    extract_contours,
    extract_longest_contour,
    global_threshold,
    otsu_threshold,
    parse_pnm,
    randpts_corpus,
    random_cloud,
    read_gsc,
    write_gsc,
    write_pgm,
)


def disk(n=64, r=24):
    yy, xx = np.mgrid[:n, :n]
    return ((xx - n / 2 + 0.5) ** 2 + (yy - n / 2 + 0.5) ** 2 <= r * r).astype(int) * 255


def z_spike():
    A = np.zeros((60, 90), int)
    A[30:55, 5:40] = 1
    A[10:30, 20] = 1
    A[10, 20:60] = 1
    A[10:25, 60] = 1
    return A * 255


def brute_otsu(vals):
    vals = np.asarray(vals)
    best, arg = -1.0, None
    for t in range(256):
        lo, hi = vals[vals <= t], vals[vals > t]
        if not len(lo) or not len(hi):
            continue
        v = len(lo) * len(hi) * (lo.mean() - hi.mean()) ** 2
        if v > best + 1e-9:
            best, arg = v, t
    return arg


# -- PNM ---------------------------------------------------------------------

def test_p2_checker():
    img = parse_pnm(b"P2 2 2 255\n0 255 255 0\n")
    assert (img.width, img.height, img.maxval) == (2, 2, 255)
    assert img.pixels == (0, 255, 255, 0)


def test_p5_matches_p2():
    assert parse_pnm(b"P5 2 2 255\n" + bytes([0, 255, 255, 0])) == parse_pnm(b"P2 2 2 255\n0 255 255 0")


def test_header_comments():
    assert parse_pnm(b"P2\n# made by hand\n2 1\n9\n3 4\n").pixels == (3, 4)


def test_truncated_p5_reports_offset():
    with pytest.raises(PNMError) as e:
        parse_pnm(b"P5 2 2 255\n" + bytes([0, 255]))
    assert e.value.offset == 13


def test_bad_magic_and_header():
    with pytest.raises(PNMError):
        parse_pnm(b"P7 1 1")
    with pytest.raises(PNMError) as e:
        parse_pnm(b"P2 2 x 255\n")
    assert e.value.offset == 5


def test_bitmaps_are_bright():
    assert parse_pnm(b"P1 3 1\n1 0 1\n").pixels == (255, 0, 255)
    assert parse_pnm(b"P4 3 1\n" + bytes([0b10100000])).pixels == (255, 0, 255)


def test_pgm_round_trip():
    img = GrayImage.from_array(disk(16, 5))
    assert parse_pnm(write_pgm(img)) == img
    assert parse_pnm(write_pgm(img, binary=False)) == img


# -- Otsu --------------------------------------------------------------------

def test_otsu_two_values():
    img = GrayImage(10, 10, tuple([10] * 50 + [200] * 50))
    assert otsu_threshold(img) == 10


def test_otsu_constant_image_raises():
    with pytest.raises(ValueError):
        otsu_threshold(GrayImage(2, 2, (7, 7, 7, 7)))


def test_otsu_between_modes():
    rng = make_rng(0)
    vals = np.clip(np.concatenate([rng.normal(50, 10, 500), rng.normal(200, 10, 500)]), 0, 255).astype(int)
    t = otsu_threshold(GrayImage(1000, 1, tuple(vals.tolist())))
    assert 50 < t < 200
    assert t == brute_otsu(vals)


@given(st.lists(st.integers(0, 255), min_size=2, max_size=60).filter(lambda v: len(set(v)) > 1))
def test_otsu_matches_brute_force(vals):
    assert otsu_threshold(GrayImage(len(vals), 1, tuple(vals))) == brute_otsu(vals)


def test_global_threshold(tmp_path):
    a, b = tmp_path / "a.pgm", tmp_path / "b.pgm"
    a.write_bytes(write_pgm(GrayImage(10, 10, tuple([10] * 50 + [200] * 50))))
    b.write_bytes(write_pgm(GrayImage(10, 10, tuple([30] * 50 + [200] * 50))))
    mean, std = global_threshold([("x", a), ("y", b)])
    assert mean == 20.0 and std == 10.0


# -- contours ----------------------------------------------------------------

def test_single_pixel_contour():
    m = np.zeros((3, 3), bool)
    m[1, 1] = True
    c = extract_longest_contour(m)
    assert c.points == ((1.0, 1.0),) and not c.closed


def test_block_contour():
    m = np.zeros((4, 4), bool)
    m[1:3, 1:3] = True
    c = extract_longest_contour(m)
    assert len(c) == 4 and c.closed
    assert set(c.points) == {(1.0, 2.0), (2.0, 2.0), (1.0, 1.0), (2.0, 1.0)}


def test_longest_of_two_blobs():
    m = np.zeros((20, 20), bool)
    m[2:4, 2:4] = True
    m[8:18, 8:18] = True
    c = extract_longest_contour(m)
    assert len(extract_contours(m)) == 2
    assert min(p.x for p in c.points) == 8.0


def test_trace_is_8_adjacent():
    c = extract_longest_contour(disk() > 0)
    P = np.asarray(c.points)
    steps = np.abs(np.diff(np.vstack([P, P[:1]]), axis=0))
    assert steps.max() == 1.0 and (steps.sum(1) > 0).all()


def test_empty_mask_raises():
    with pytest.raises(ValueError):
        extract_longest_contour(np.zeros((4, 4), bool))


# -- Douglas-Peucker -----------------------------------------------------------

def test_dp_open_examples():
    c = Contour(((0, 0), (1, 0.05), (2, 0)), closed=False)
    assert douglas_peucker(c, 0.1).points == ((0, 0), (2, 0))
    assert douglas_peucker(c, 0.01).points == c.points


def _dist_to_polyline(p, Q, closed):
    segs = list(zip(Q, Q[1:] + (Q[:1] if closed else ())))
    best = math.inf
    for a, b in segs:
        a, b, q = map(np.asarray, (a, b, p))
        d = b - a
        t = 0.0 if d @ d == 0 else min(1.0, max(0.0, (q - a) @ d / (d @ d)))
        best = min(best, float(np.linalg.norm(q - a - t * d)))
    return best


@given(st.integers(0, 2**31), st.floats(0.0, 3.0), st.booleans())
def test_dp_tolerance_guarantee(seed, eps, closed):
    rng = make_rng(seed)
    n = int(rng.integers(3, 40))
    ang = np.sort(rng.uniform(0, 2 * np.pi, n))
    r = rng.uniform(5, 10, n)
    c = Contour(tuple(zip(r * np.cos(ang), r * np.sin(ang))), closed=closed)
    s = douglas_peucker(c, eps)
    assert set(s.points) <= set(c.points)
    assert all(_dist_to_polyline(p, s.points, closed) <= eps + 1e-9 for p in c.points)
    if eps == 0.0:
        assert s.points == c.points


# -- pipeline ----------------------------------------------------------------

def test_disk_pipeline_pinned():
    img = GrayImage.from_array(disk())
    K = contour_pipeline(img, 0.005, seed=1)
    assert validate(K).ok
    assert len(K.edges) == K.n_vertices == 16
    assert contour_pipeline(img, 0.001, seed=1).n_vertices == 56


def test_pipeline_deterministic():
    img = GrayImage.from_array(disk())
    assert contour_pipeline(img, 0.005, 3) == contour_pipeline(img, 0.005, 3)
    assert contour_pipeline(img, 0.005, 3) != contour_pipeline(img, 0.005, 4)


def test_self_overlap_rejected():
    img = GrayImage.from_array(z_spike())
    for seed in range(5):
        with pytest.raises(PipelineRejected) as e:
            contour_pipeline(img, 0.001, seed)
        assert e.value.reason == "self-overlap"


def test_empty_image_rejected():
    with pytest.raises(PipelineRejected) as e:
        contour_pipeline(GrayImage(4, 4, (0,) * 16), 0.005, 0)
    assert e.value.reason == "empty"


def test_binarize_strict():
    img = GrayImage(3, 1, (9, 10, 11))
    assert binarize(img, 10).tolist() == [[False, False, True]]


# -- corpora and .gsc ---------------------------------------------------------

def test_random_cloud_seeded():
    assert random_cloud(5, 1) == random_cloud(5, 1)
    assert all(0 <= p.x <= 10 and 0 <= p.y <= 10 for p in random_cloud(50, 2))


def test_randpts_sizes():
    corpus = list(randpts_corpus((3, 5), per_size=2))
    assert [c for c, _ in corpus] == ["randpts-3-0", "randpts-3-1", "randpts-5-0", "randpts-5-1"]
    assert [K.n_vertices for _, K in corpus] == [3, 3, 5, 5]


@given(st.integers(1, 9), st.integers(0, 2**31))
def test_gsc_round_trip(n, seed):
    K = random_small_complex(n, make_rng(seed))
    assert read_gsc(write_gsc(K)) == K


def test_gsc_errors():
    with pytest.raises(GSCError, match="face closure"):
        read_gsc("gsc 2\nv 0 0\nv 1 0\nv 0 1\nt 0 1 2\n")
    with pytest.raises(GSCError) as e:
        read_gsc("gsc 2\nv 0 zero\n")
    assert e.value.line == 2
    with pytest.raises(GSCError):
        read_gsc("gsc 3\n")
    assert read_gsc(write_gsc(example_triangle())) == example_triangle()
