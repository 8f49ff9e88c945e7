"""Persistence diagrams, Euler characteristic and Betti functions of lower-star filtrations.

Homology is over Z/2. Zero-persistence pairs (birth == death, i.e. created and
destroyed inside one lower star) are dropped; essential classes die at ``inf``.
"""
from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .complex import Filtration, SimplicialComplex2D, heights, lower_star_filtration, vertex_order

INF = math.inf
EQUAL_TOL = 1e-9


@dataclass(frozen=True)
class PersistenceDiagram:
    """Graded multiset of off-diagonal (dim, birth, death) points."""

    points: tuple[tuple[int, float, float], ...] = ()

    def __post_init__(self):
        pts = tuple(sorted((int(d), float(b), float(e)) for d, b, e in self.points))
        for d, b, e in pts:
            if not b < e:
                raise ValueError(f"diagram point ({b}, {e}) is not above the diagonal")
        object.__setattr__(self, "points", pts)

    def __iter__(self):
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def in_dim(self, dim: int) -> list[tuple[float, float]]:
        return [(b, e) for d, b, e in self.points if d == dim]

    def finite(self, dim: int) -> list[tuple[float, float]]:
        return [(b, e) for b, e in self.in_dim(dim) if e != INF]

    def essential(self, dim: int) -> list[float]:
        return sorted(b for b, e in self.in_dim(dim) if e == INF)

    @property
    def dims(self) -> list[int]:
        return sorted({d for d, _, _ in self.points})

    def to_json(self) -> dict:
        return {
            "points": [
                {"dim": d, "birth": b, "death": "inf" if e == INF else e} for d, b, e in self.points
            ]
        }

    @classmethod
    def from_json(cls, obj) -> "PersistenceDiagram":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(tuple(
            (p["dim"], float(p["birth"]), INF if p["death"] == "inf" else float(p["death"]))
            for p in obj["points"]
        ))


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous integer step function, zero before the first breakpoint."""

    breakpoints: tuple[tuple[float, int], ...] = ()

    def __post_init__(self):
        canon: list[tuple[float, int]] = []
        prev = 0
        for t, v in sorted((float(t), int(v)) for t, v in self.breakpoints):
            if canon and canon[-1][0] == t:
                canon.pop()
                prev = canon[-1][1] if canon else 0
            if v != prev:
                canon.append((t, v))
                prev = v
        object.__setattr__(self, "breakpoints", tuple(canon))

    @classmethod
    def from_jumps(cls, jumps: Iterable[tuple[float, int]]) -> "StepFunction":
        total: dict[float, int] = {}
        for t, dv in jumps:
            total[float(t)] = total.get(float(t), 0) + int(dv)
        bps, acc = [], 0
        for t in sorted(total):
            acc += total[t]
            bps.append((t, acc))
        return cls(tuple(bps))

    def __call__(self, t: float) -> int:
        k = bisect.bisect_right([b[0] for b in self.breakpoints], t)
        return self.breakpoints[k - 1][1] if k else 0

    @property
    def heights(self) -> list[float]:
        return [t for t, _ in self.breakpoints]

    @property
    def final_value(self) -> int:
        return self.breakpoints[-1][1] if self.breakpoints else 0

    def __sub__(self, other: "StepFunction") -> "StepFunction":
        ts = sorted(set(self.heights) | set(other.heights))
        return StepFunction(tuple((t, self(t) - other(t)) for t in ts))

    def to_json(self) -> dict:
        return {"breakpoints": [[t, v] for t, v in self.breakpoints]}

    @classmethod
    def from_json(cls, obj) -> "StepFunction":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(tuple((float(t), int(v)) for t, v in obj["breakpoints"]))


# ---------------------------------------------------------------------------
# persistence


def _find(parent: list[int], x: int) -> int:
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        parent[x], x = root, parent[x]
    return root


def filtration_pairs(F: Filtration) -> PersistenceDiagram:
    """Union-find for dimension 0, Z/2 column reduction of triangles for dimension 1."""
    h = F.heights
    parent = list(range(len(h)))
    pts: list[tuple[int, float, float]] = []
    positive: dict[int, float] = {}          # cycle-creating edge position -> value
    edge_pos: dict[tuple[int, int], int] = {}
    pivots: dict[int, set[int]] = {}
    for pos, (sigma, value) in enumerate(F):
        if len(sigma) == 2:
            edge_pos[sigma] = pos
            ra, rb = _find(parent, sigma[0]), _find(parent, sigma[1])
            if ra == rb:
                positive[pos] = value
                continue
            # elder rule: the younger component dies
            young, old = (ra, rb) if (h[ra], ra) > (h[rb], rb) else (rb, ra)
            parent[young] = old
            if h[young] < value:
                pts.append((0, h[young], value))
        elif len(sigma) == 3:
            a, b, c = sigma
            col = {edge_pos[(a, b)], edge_pos[(a, c)], edge_pos[(b, c)]}
            while col:
                low = max(col)
                if low not in pivots:
                    break
                col ^= pivots[low]
            if col:
                low = max(col)
                pivots[low] = col
                birth = positive[low]
                if birth < value:
                    pts.append((1, birth, value))
    for v in range(len(h)):
        if _find(parent, v) == v:
            pts.append((0, h[v], INF))
    for pos, value in positive.items():
        if pos not in pivots:
            pts.append((1, value, INF))
    return PersistenceDiagram(tuple(pts))


def naive_filtration_pairs(F: Filtration) -> PersistenceDiagram:
    """Standard reduction of the full boundary matrix; slow reference path."""
    index = F.index()
    cols: list[set[int]] = []
    for sigma in F.simplices:
        if len(sigma) == 1:
            cols.append(set())
        else:
            cols.append({index[sigma[:k] + sigma[k + 1:]] for k in range(len(sigma))})
    low_of: dict[int, int] = {}
    paired = set()
    pts = []
    for j, col in enumerate(cols):
        col = set(col)
        while col and max(col) in low_of:
            col ^= cols[low_of[max(col)]]
        cols[j] = col
        if col:
            i = max(col)
            low_of[i] = j
            paired.update((i, j))
            b, d = F.values[i], F.values[j]
            if b < d:
                pts.append((len(F.simplices[i]) - 1, b, d))
    for i, sigma in enumerate(F.simplices):
        if i not in paired and not cols[i]:
            pts.append((len(sigma) - 1, F.values[i], INF))
    return PersistenceDiagram(tuple(pts))


def persistence_diagram(K: SimplicialComplex2D, s: float) -> PersistenceDiagram:
    return filtration_pairs(lower_star_filtration(K, s))


def persistence_diagram_naive(K: SimplicialComplex2D, s: float) -> PersistenceDiagram:
    return naive_filtration_pairs(lower_star_filtration(K, s))


def euler_characteristic_function(K: SimplicialComplex2D, s: float) -> StepFunction:
    """chi(t) = #V - #E + #T of the lower-level set, accumulated at vertex heights."""
    F = lower_star_filtration(K, s)
    jumps = [(value, (-1) ** (len(sigma) - 1)) for sigma, value in F]
    return StepFunction.from_jumps(jumps)


def betti_from_diagram(D: PersistenceDiagram) -> tuple[StepFunction, StepFunction]:
    out = []
    for dim in (0, 1):
        jumps = []
        for b, e in D.in_dim(dim):
            jumps.append((b, 1))
            if e != INF:
                jumps.append((e, -1))
        out.append(StepFunction.from_jumps(jumps))
    return out[0], out[1]


def betti_functions(K: SimplicialComplex2D, s: float) -> tuple[StepFunction, StepFunction]:
    return betti_from_diagram(persistence_diagram(K, s))


DESCRIPTOR_TYPES = ("pd", "ecf")


def descriptor(K: SimplicialComplex2D, s: float, kind: str = "ecf"):
    if kind == "pd":
        return persistence_diagram(K, s)
    if kind == "ecf":
        return euler_characteristic_function(K, s)
    if kind == "betti":
        return betti_functions(K, s)
    raise ValueError(f"unknown descriptor type {kind!r}")


# ---------------------------------------------------------------------------
# distances


def _perfect_matching(adj: list[list[int]], n: int) -> bool:
    match_r: dict[int, int] = {}

    def augment(u: int, seen: set[int]) -> bool:
        for w in adj[u]:
            if w in seen:
                continue
            seen.add(w)
            if w not in match_r or augment(match_r[w], seen):
                match_r[w] = u
                return True
        return False

    return all(augment(u, set()) for u in range(n))


def _bottleneck_finite(A: Sequence[tuple[float, float]], B: Sequence[tuple[float, float]]) -> float:
    n, m = len(A), len(B)
    if n == 0 and m == 0:
        return 0.0
    N = n + m
    C = np.zeros((N, N))
    a = np.asarray(A, dtype=float).reshape(-1, 2)
    b = np.asarray(B, dtype=float).reshape(-1, 2)
    if n and m:
        C[:n, :m] = np.maximum(np.abs(a[:, None, 0] - b[None, :, 0]), np.abs(a[:, None, 1] - b[None, :, 1]))
    # rows n.. are diagonal slots for B's points, columns m.. for A's
    if n:
        C[:n, m:] = ((a[:, 1] - a[:, 0]) / 2.0)[:, None]
    if m:
        C[n:, :m] = ((b[:, 1] - b[:, 0]) / 2.0)[None, :]
    cands = np.unique(C)
    lo, hi = 0, len(cands) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        r = cands[mid]
        adj = [list(np.flatnonzero(C[i] <= r)) for i in range(N)]
        if _perfect_matching(adj, N):
            hi = mid
        else:
            lo = mid + 1
    return float(cands[lo])


def bottleneck_distance(D1: PersistenceDiagram, D2: PersistenceDiagram) -> float:
    """Exact bottleneck distance; ``inf`` when essential counts differ in some dimension."""
    best = 0.0
    for dim in sorted(set(D1.dims) | set(D2.dims)):
        e1, e2 = D1.essential(dim), D2.essential(dim)
        if len(e1) != len(e2):
            return INF
        if e1:
            best = max(best, max(abs(x - y) for x, y in zip(e1, e2)))
        best = max(best, _bottleneck_finite(D1.finite(dim), D2.finite(dim)))
    return best


def ecf_l1_distance(f: StepFunction, g: StepFunction) -> float:
    """Exact integral of |f - g|; ``inf`` when the final values differ."""
    if f.final_value != g.final_value:
        return INF
    ts = sorted(set(f.heights) | set(g.heights))
    total = []
    for t0, t1 in zip(ts, ts[1:]):
        total.append(abs(f(t0) - g(t0)) * (t1 - t0))
    return math.fsum(total)


def descriptor_distance(a, b, metric: str = "ecf_l1") -> float:
    if metric == "ecf_l1":
        return ecf_l1_distance(a, b)
    if metric == "bottleneck":
        return bottleneck_distance(a, b)
    raise ValueError(f"unknown descriptor distance {metric!r}")


def descriptor_equal(a, b, tol: float = EQUAL_TOL) -> bool:
    """Exact multiset / breakpoint equality with heights compared within ``tol``."""
    if type(a) is not type(b):
        raise TypeError("descriptors of different types")
    if isinstance(a, tuple):
        return all(descriptor_equal(x, y, tol) for x, y in zip(a, b))
    if isinstance(a, StepFunction):
        if len(a.breakpoints) != len(b.breakpoints):
            return False
        return all(abs(s - t) <= tol and v == w for (s, v), (t, w) in zip(a.breakpoints, b.breakpoints))
    if isinstance(a, PersistenceDiagram):
        if len(a) != len(b):
            return False
        for (d1, b1, e1), (d2, b2, e2) in zip(a.points, b.points):
            if d1 != d2 or abs(b1 - b2) > tol:
                return False
            if (e1 == INF) != (e2 == INF) or (e1 != INF and abs(e1 - e2) > tol):
                return False
        return True
    raise TypeError(f"not a descriptor: {type(a).__name__}")


def rank_diagram(D: PersistenceDiagram, K: SimplicialComplex2D, s: float) -> PersistenceDiagram:
    """Replace every height by the rank of the vertex carrying it."""
    h = heights(K, s)
    rank = {float(h[v]): r for r, v in enumerate(vertex_order(K, s, h))}
    return PersistenceDiagram(tuple(
        (d, float(rank[b]), INF if e == INF else float(rank[e])) for d, b, e in D.points
    ))
