"""Geometric simplicial complexes in the plane and their lower-star filtrations."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .geometry import (
    COLLINEAR_TOL,
    DegenerateError,
    Point2,
    as_points,
    general_position_check,
    normalize_angle,
)

HEIGHT_TOL = 1e-12


class DegenerateDirectionError(DegenerateError):
    """Two vertices share a height in the requested direction."""

    def __init__(self, angle: float, pair: tuple[int, int]):
        self.angle = angle
        self.pair = pair
        super().__init__(f"vertices {pair[0]} and {pair[1]} tie in height at direction {angle!r}")


@dataclass(frozen=True)
class SimplicialComplex2D:
    """Vertices in the plane with edges (i<j) and triangles (i<j<k).

    ``degenerate`` marks complexes deliberately built outside general position.
    """

    vertices: tuple[Point2, ...] = ()
    edges: tuple[tuple[int, int], ...] = ()
    triangles: tuple[tuple[int, int, int], ...] = ()
    degenerate: bool = False

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(as_points(self.vertices)))
        object.__setattr__(self, "edges", tuple(sorted({tuple(sorted(map(int, e))) for e in self.edges})))
        object.__setattr__(self, "triangles", tuple(sorted({tuple(sorted(map(int, t))) for t in self.triangles})))

    @classmethod
    def build(cls, vertices, edges=(), triangles=(), close=True, degenerate=False) -> "SimplicialComplex2D":
        """Construct, adding missing triangle edges when ``close`` is set."""
        edges = set(tuple(sorted(e)) for e in edges)
        if close:
            for i, j, k in triangles:
                edges |= {tuple(sorted(p)) for p in ((i, j), (i, k), (j, k))}
        return cls(tuple(vertices), tuple(edges), tuple(triangles), degenerate)

    @classmethod
    def cycle(cls, points: Sequence) -> "SimplicialComplex2D":
        n = len(points)
        return cls(tuple(points), tuple((i, (i + 1) % n) for i in range(n)))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def coords(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float).reshape(-1, 2)

    def simplices(self):
        yield from ((i,) for i in range(self.n_vertices))
        yield from self.edges
        yield from self.triangles

    def neighbors(self, v: int) -> list[int]:
        return sorted({j for e in self.edges if v in e for j in e if j != v})

    def euler_characteristic(self) -> int:
        return self.n_vertices - len(self.edges) + len(self.triangles)

    def without_vertex(self, v: int) -> "SimplicialComplex2D":
        """Drop ``v`` with its cofaces and renumber the remaining vertices."""
        keep = [i for i in range(self.n_vertices) if i != v]
        new = {old: new for new, old in enumerate(keep)}
        return SimplicialComplex2D(
            tuple(self.vertices[i] for i in keep),
            tuple((new[a], new[b]) for a, b in self.edges if v not in (a, b)),
            tuple(tuple(new[x] for x in t) for t in self.triangles if v not in t),
            self.degenerate,
        )

    def __len__(self) -> int:
        return self.n_vertices + len(self.edges) + len(self.triangles)


@dataclass
class ValidationReport:
    face_closure: list[str] = field(default_factory=list)
    crossings: list[tuple[tuple[int, int], tuple[int, int]]] = field(default_factory=list)
    vertex_in_simplex: list[tuple[int, tuple]] = field(default_factory=list)
    collinear_triples: list[tuple[int, int, int]] = field(default_factory=list)
    shared_coordinate_pairs: list[tuple[int, int, str]] = field(default_factory=list)

    @property
    def is_simplicial(self) -> bool:
        return not (self.face_closure or self.crossings or self.vertex_in_simplex)

    @property
    def general_position(self) -> bool:
        return not (self.collinear_triples or self.shared_coordinate_pairs)

    @property
    def ok(self) -> bool:
        return self.is_simplicial and self.general_position

    def problems(self) -> list[str]:
        out = list(self.face_closure)
        out += [f"edges {a} and {b} intersect improperly" for a, b in self.crossings]
        out += [f"vertex {v} lies in simplex {s}" for v, s in self.vertex_in_simplex]
        out += [f"collinear vertices {t}" for t in self.collinear_triples]
        out += [f"vertices {a} and {b} share an {ax} coordinate" for a, b, ax in self.shared_coordinate_pairs]
        return out


def _orient(P, a, b, c) -> np.ndarray:
    return (P[b, 0] - P[a, 0]) * (P[c, 1] - P[a, 1]) - (P[b, 1] - P[a, 1]) * (P[c, 0] - P[a, 0])


def _crossing_edges(P: np.ndarray, edges: Sequence[tuple[int, int]]) -> list:
    if len(edges) < 2:
        return []
    E = np.asarray(edges)
    scale = max(1.0, float(np.abs(P).max())) ** 2
    eps = COLLINEAR_TOL * scale
    ia, ib = np.triu_indices(len(E), 1)
    a0, a1 = E[ia, 0], E[ia, 1]
    b0, b1 = E[ib, 0], E[ib, 1]
    shared = (a0 == b0) | (a0 == b1) | (a1 == b0) | (a1 == b1)
    d1 = _orient(P, a0, a1, b0)
    d2 = _orient(P, a0, a1, b1)
    d3 = _orient(P, b0, b1, a0)
    d4 = _orient(P, b0, b1, a1)
    clear = (np.abs(d1) > eps) & (np.abs(d2) > eps) & (np.abs(d3) > eps) & (np.abs(d4) > eps)
    proper = (d1 * d2 < 0) & (d3 * d4 < 0) & clear & ~shared
    bad = [(tuple(E[i]), tuple(E[j])) for i, j in zip(ia[proper], ib[proper])]
    # edges sharing a vertex overlap only when the other endpoints are collinear
    # and on the same side
    for i, j in zip(ia[shared], ib[shared]):
        e, f = E[i], E[j]
        common = set(e) & set(f)
        if len(common) != 1:
            continue
        c = common.pop()
        x = e[0] if e[1] == c else e[1]
        y = f[0] if f[1] == c else f[1]
        ux, uy = P[x] - P[c]
        vx, vy = P[y] - P[c]
        cr = ux * vy - uy * vx
        if abs(cr) <= eps and ux * vx + uy * vy > 0:
            bad.append((tuple(e), tuple(f)))
    return sorted(bad)


def _point_in_simplex(P: np.ndarray, K: SimplicialComplex2D) -> list:
    out = []
    n = len(P)
    scale = max(1.0, float(np.abs(P).max())) ** 2
    eps = COLLINEAR_TOL * scale
    idx = np.arange(n)
    for e in K.edges:
        a, b = P[e[0]], P[e[1]]
        d = b - a
        L2 = float(d @ d)
        W = P - a
        cr = np.abs(d[0] * W[:, 1] - d[1] * W[:, 0])
        along = W @ d
        hit = (cr <= eps * math.sqrt(L2)) & (along > 0.0) & (along < L2) & (idx != e[0]) & (idx != e[1])
        out.extend((int(v), e) for v in idx[hit])
    for t in K.triangles:
        i, j, k = t
        for v in range(n):
            if v in t:
                continue
            o1 = _orient(P, i, j, v)
            o2 = _orient(P, j, k, v)
            o3 = _orient(P, k, i, v)
            if (o1 > 0 and o2 > 0 and o3 > 0) or (o1 < 0 and o2 < 0 and o3 < 0):
                out.append((v, t))
    return out


def validate(K: SimplicialComplex2D) -> ValidationReport:
    """List face-closure violations, improper intersections and general-position failures."""
    rep = ValidationReport()
    n = K.n_vertices
    edge_set = set(K.edges)
    for e in K.edges:
        if e[0] == e[1] or not all(0 <= x < n for x in e):
            rep.face_closure.append(f"edge {e} has invalid endpoints")
    for t in K.triangles:
        if len(set(t)) != 3 or not all(0 <= x < n for x in t):
            rep.face_closure.append(f"triangle {t} has invalid vertices")
            continue
        for f in ((t[0], t[1]), (t[0], t[2]), (t[1], t[2])):
            if f not in edge_set:
                rep.face_closure.append(f"triangle {t} is missing edge {f}")
    if rep.face_closure:
        return rep
    P = K.coords
    rep.crossings = _crossing_edges(P, K.edges)
    rep.vertex_in_simplex = _point_in_simplex(P, K)
    gp = general_position_check(K.vertices)
    rep.collinear_triples = gp.collinear_triples
    rep.shared_coordinate_pairs = gp.shared_coordinate_pairs
    return rep


def _angle(s) -> float:
    return normalize_angle(float(s))


def heights(K: SimplicialComplex2D, s: float) -> np.ndarray:
    """Height ``cos(s) x + sin(s) y`` of every vertex, indexed by vertex id."""
    s = _angle(s)
    P = K.coords
    return math.cos(s) * P[:, 0] + math.sin(s) * P[:, 1]


def vertex_order(K: SimplicialComplex2D, s: float, h: np.ndarray | None = None) -> tuple[int, ...]:
    """Vertex ids sorted by height; raises on ties."""
    if h is None:
        h = heights(K, s)
    order = np.argsort(h, kind="stable")
    gaps = np.diff(h[order])
    if len(gaps) and gaps.min() <= HEIGHT_TOL:
        k = int(np.argmin(gaps))
        a, b = sorted((int(order[k]), int(order[k + 1])))
        raise DegenerateDirectionError(_angle(s), (a, b))
    return tuple(int(i) for i in order)


@dataclass(frozen=True)
class Filtration:
    """Simplices sorted by (value, dimension, index) with value = max vertex height."""

    direction: float
    simplices: tuple[tuple[int, ...], ...]
    values: tuple[float, ...]
    heights: tuple[float, ...]

    def __iter__(self):
        return iter(zip(self.simplices, self.values))

    def __len__(self) -> int:
        return len(self.simplices)

    def index(self) -> dict[tuple[int, ...], int]:
        return {s: i for i, s in enumerate(self.simplices)}

    def is_valid(self) -> bool:
        seen = set()
        for sigma in self.simplices:
            if len(sigma) > 1:
                faces = [sigma[:k] + sigma[k + 1:] for k in range(len(sigma))]
                if any(f not in seen for f in faces):
                    return False
            seen.add(sigma)
        return True


def lower_star_filtration(K: SimplicialComplex2D, s: float) -> Filtration:
    s = _angle(s)
    h = heights(K, s)
    vertex_order(K, s, h)
    keyed = []
    for v in range(K.n_vertices):
        keyed.append((h[v], 0, v, (v,)))
    for idx, e in enumerate(K.edges):
        keyed.append((max(h[e[0]], h[e[1]]), 1, idx, e))
    for idx, t in enumerate(K.triangles):
        keyed.append((max(h[t[0]], h[t[1]], h[t[2]]), 2, idx, t))
    keyed.sort(key=lambda r: r[:3])
    return Filtration(
        s,
        tuple(r[3] for r in keyed),
        tuple(float(r[0]) for r in keyed),
        tuple(float(x) for x in h),
    )


def filtration_order_equivalent(K: SimplicialComplex2D, s1: float, s2: float) -> bool:
    """True when both directions see the vertices in the same order."""
    return vertex_order(K, s1) == vertex_order(K, s2)
