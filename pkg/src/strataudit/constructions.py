"""Worked-example generators: the figure triangle, the linear lower-bound complex,
the lost-vertex pair, random cycle graphs, and a sampled Hausdorff distance."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .complex import SimplicialComplex2D, validate
from .geometry import Point2, general_position_check, make_rng, vertex_angle
from .stratification import ObservingRegion, coarse_stratification, observing_regions, min_stratum


class ConstructionError(RuntimeError):
    pass


def example_triangle() -> SimplicialComplex2D:
    """Filled triangle with y-order v1 < v2 < v3."""
    return SimplicialComplex2D.build([(0.0, 0.0), (2.0, 1.0), (1.0, 3.0)], triangles=[(0, 1, 2)])


@dataclass(frozen=True)
class LowerBoundComplex:
    complex: SimplicialComplex2D
    apex_ids: tuple[int, ...]
    epsilon_used: float
    delta_star: float
    regions: tuple[ObservingRegion, ...] = ()

    @property
    def n(self) -> int:
        return len(self.apex_ids)

    def apex_regions(self) -> list[ObservingRegion]:
        return [self.regions[v] for v in self.apex_ids]

    def disjoint(self) -> bool:
        regs = self.apex_regions()
        return all(a.region.intersect(b.region).is_empty for a, b in itertools.combinations(regs, 2))

    def report(self) -> dict:
        return {
            "n": self.n,
            "delta_star": self.delta_star,
            "epsilon_used": self.epsilon_used,
            "disjoint": self.disjoint(),
            "min_directions": self.n,
            "region_arcs": [
                {"vertex": r.vertex, "arcs": [[a.start, a.length] for a in r.region.arcs]}
                for r in self.apex_regions()
            ],
        }


def lower_bound_complex(n: int, verify: bool = True) -> LowerBoundComplex:
    """n thin filled triangles whose apexes have pairwise disjoint observing regions.

    Vertex ``k`` of the result is v_{k+1}; apexes are v_i for i in {2, 5, ..., 3n-1}.
    The apex offset above its chord is a quarter of the smallest gap between chord slopes.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    idx = [3 * j + 2 for j in range(n)]
    slopes = [1.0 + 1.0 / (2 * i) for i in idx]
    gaps = [abs(a - b) for a, b in itertools.combinations(slopes, 2)]
    delta_star = min(gaps) if gaps else 1.0 / (2 * idx[0])
    eps = delta_star / 4.0
    verts: list[Point2] = []
    tris = []
    apex = []
    for i in idx:
        base = len(verts)
        verts.append(Point2(float(i - 1), float(i - 1)))
        verts.append(Point2(float(i), i + 1.0 / (2 * i) + eps))
        verts.append(Point2(float(i + 1), i + 1 + 1.0 / i))
        tris.append((base, base + 1, base + 2))
        apex.append(base + 1)
    # base vertices (i-1, i-1) sit on the diagonal, so general position fails by design
    K = SimplicialComplex2D.build(verts, triangles=tris, degenerate=True)
    regions = tuple(observing_regions(K)) if verify else ()
    out = LowerBoundComplex(K, tuple(apex), eps, delta_star, regions)
    if verify and not out.disjoint():
        raise ConstructionError(f"apex observing regions overlap for n={n}: {out.report()['region_arcs']}")
    return out


@dataclass(frozen=True)
class LostVertexPair:
    K: SimplicialComplex2D
    K_prime: SimplicialComplex2D
    v_id: int
    u_id: int
    w_id: int
    theta: float
    predicted_hausdorff: float
    # distance from v to its projection on segment (u, w)
    projection_distance: float


def _point_segment_distance(p, a, b) -> float:
    p, a, b = (np.asarray(x, dtype=float) for x in (p, a, b))
    d = b - a
    L2 = float(d @ d)
    t = 0.0 if L2 == 0.0 else min(1.0, max(0.0, float((p - a) @ d) / L2))
    return float(np.linalg.norm(p - (a + t * d)))


def _simplex_intrudes(K: SimplicialComplex2D, sigma, center, radius) -> bool:
    P = K.coords
    if len(sigma) == 1:
        return float(np.linalg.norm(P[sigma[0]] - center)) < radius
    if len(sigma) == 2:
        return _point_segment_distance(center, P[sigma[0]], P[sigma[1]]) < radius
    a, b, c = (P[x] for x in sigma)
    if _point_in_triangle(center, a, b, c):
        return True
    return min(_point_segment_distance(center, p, q) for p, q in ((a, b), (b, c), (a, c))) < radius


def _point_in_triangle(p, a, b, c) -> bool:
    def cr(o, x, y):
        return (x[0] - o[0]) * (y[1] - o[1]) - (x[1] - o[1]) * (y[0] - o[0])
    d1, d2, d3 = cr(a, b, p), cr(b, c, p), cr(c, a, p)
    return (d1 >= 0 and d2 >= 0 and d3 >= 0) or (d1 <= 0 and d2 <= 0 and d3 <= 0)


def lost_vertex_pair(u, v, w, context: SimplicialComplex2D | None = None, tol: float = 1e-12) -> LostVertexPair:
    """K = context + path u-v-w; K' = context + segment u-w (v removed)."""
    u, v, w = (np.asarray(p, dtype=float) for p in (u, v, w))
    r_u, r_w = float(np.linalg.norm(u - v)), float(np.linalg.norm(w - v))
    if abs(r_u - r_w) > tol * max(1.0, r_w):
        raise ValueError(f"condition (b) violated: |u-v| = {r_u} but |w-v| = {r_w}")
    context = context or SimplicialComplex2D()
    base = context.n_vertices
    verts = list(context.vertices) + [Point2(*u), Point2(*v), Point2(*w)]
    # only collinearity matters for theta in (0, pi); shared coordinates just add
    # one more critical direction
    gp = general_position_check(verts)
    if gp.collinear_triples:
        raise ValueError(f"condition (a) violated: collinear vertices {gp.collinear_triples}")
    for sigma in context.simplices():
        if _simplex_intrudes(context, sigma, v, r_w):
            raise ValueError(f"condition (c) violated: simplex {sigma} meets the open ball around v")
    iu, iv, iw = base, base + 1, base + 2
    K = SimplicialComplex2D(
        tuple(verts), context.edges + ((iu, iv), (iv, iw)), context.triangles
    )
    Kp = SimplicialComplex2D(
        tuple(list(context.vertices) + [Point2(*u), Point2(*w)]),
        context.edges + ((iu, iu + 1),),
        context.triangles,
    )
    phi = vertex_angle(u, v, w)
    theta = math.pi - phi
    return LostVertexPair(K, Kp, iv, iu, iw, theta, r_w * math.cos(theta / 2.0), r_w * math.cos(phi / 2.0))


def random_isosceles_triple(rng: np.random.Generator, min_angle: float = 0.3, max_angle: float = math.pi - 0.3):
    """(u, v, w) with |u-v| = |w-v| and interior angle at v in [min_angle, max_angle]."""
    while True:
        v = rng.uniform(-5, 5, size=2)
        r = rng.uniform(0.5, 3.0)
        a = rng.uniform(0, 2 * math.pi)
        phi = rng.uniform(min_angle, max_angle)
        u = v + r * np.array([math.cos(a), math.sin(a)])
        w = v + r * np.array([math.cos(a + phi), math.sin(a + phi)])
        if not general_position_check([u, v, w]).collinear_triples:
            return tuple(u), tuple(v), tuple(w)


class HausdorffEstimate(NamedTuple):
    value: float
    error_bound: float


def _segments(K: SimplicialComplex2D):
    P = K.coords
    return [(P[a], P[b]) for a, b in K.edges]


def _distance_to_complex(Q: np.ndarray, K: SimplicialComplex2D) -> np.ndarray:
    P = K.coords
    best = np.full(len(Q), np.inf)
    if K.n_vertices:
        diff = Q[:, None, :] - P[None, :, :]
        best = np.minimum(best, np.sqrt((diff ** 2).sum(-1)).min(1))
    for a, b in _segments(K):
        d = b - a
        L2 = float(d @ d)
        t = np.clip((Q - a) @ d / L2, 0.0, 1.0)
        proj = a + t[:, None] * d
        best = np.minimum(best, np.linalg.norm(Q - proj, axis=1))
    for i, j, k in K.triangles:
        a, b, c = P[i], P[j], P[k]
        def cr(o, x):
            return (x[0] - o[0]) * (Q[:, 1] - o[1]) - (x[1] - o[1]) * (Q[:, 0] - o[0])
        d1, d2, d3 = cr(a, b), cr(b, c), cr(c, a)
        inside = ((d1 >= 0) & (d2 >= 0) & (d3 >= 0)) | ((d1 <= 0) & (d2 <= 0) & (d3 <= 0))
        best[inside] = 0.0
    return best


def _samples(K: SimplicialComplex2D, resolution: int) -> tuple[np.ndarray, float]:
    pts = [K.coords]
    longest = 0.0
    t = np.linspace(0.0, 1.0, resolution + 1)[:, None]
    for a, b in _segments(K):
        pts.append(a + t * (b - a))
        longest = max(longest, float(np.linalg.norm(b - a)))
    return np.vstack(pts), longest / resolution


def hausdorff_distance(K1: SimplicialComplex2D, K2: SimplicialComplex2D, resolution: int = 1000) -> HausdorffEstimate:
    """Symmetric Hausdorff distance between the underlying point sets.

    Sup over vertices and ``resolution`` uniform samples per edge (triangle edges
    included) of the exact distance to the other complex.
    """
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    if K1.n_vertices == 0 or K2.n_vertices == 0:
        raise ValueError("both complexes must be nonempty")
    Q1, e1 = _samples(K1, resolution)
    Q2, e2 = _samples(K2, resolution)
    value = max(float(_distance_to_complex(Q1, K2).max()), float(_distance_to_complex(Q2, K1).max()))
    return HausdorffEstimate(value, max(e1, e2))


def random_cycle_graph(n: int, rng: np.random.Generator, box: float = 10.0) -> SimplicialComplex2D:
    """Star-shaped simple polygon on ``n`` uniform points, as a cycle graph."""
    if n < 3:
        raise ValueError("a cycle graph needs at least 3 vertices")
    while True:
        P = rng.uniform(0.0, box, size=(n, 2))
        c = P.mean(0)
        ang = np.arctan2(P[:, 1] - c[1], P[:, 0] - c[0])
        P = P[np.argsort(ang)]
        K = SimplicialComplex2D.cycle([tuple(p) for p in P])
        if validate(K).ok:
            return K


def random_filled_triangle(rng: np.random.Generator, box: float = 10.0) -> SimplicialComplex2D:
    while True:
        P = rng.uniform(0.0, box, size=(3, 2))
        if general_position_check(P).ok:
            return SimplicialComplex2D.build([tuple(p) for p in P], triangles=[(0, 1, 2)])


def random_small_complex(n: int, rng: np.random.Generator, p_edge: float = 0.7, p_tri: float = 0.5) -> SimplicialComplex2D:
    """Random subcomplex of the Delaunay triangulation of ``n`` uniform points."""
    from scipy.spatial import Delaunay

    while True:
        P = rng.uniform(0.0, 10.0, size=(n, 2))
        if general_position_check(P).ok:
            break
    tris: list[tuple[int, ...]] = []
    edges: set[tuple[int, int]] = set()
    if n >= 3:
        for t in Delaunay(P).simplices:
            t = tuple(sorted(int(x) for x in t))
            if rng.uniform() < p_tri:
                tris.append(t)
            for e in itertools.combinations(t, 2):
                if rng.uniform() < p_edge:
                    edges.add(e)
    elif n == 2 and rng.uniform() < p_edge:
        edges.add((0, 1))
    return SimplicialComplex2D.build([tuple(p) for p in P], edges, tris)
