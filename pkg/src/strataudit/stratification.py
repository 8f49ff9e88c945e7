"""Coarse stratification of the direction circle and per-vertex observing regions."""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .complex import SimplicialComplex2D, lower_star_filtration
from .descriptors import INF, PersistenceDiagram, filtration_pairs
from .geometry import (
    ANGLE_TOL,
    TWO_PI,
    Arc,
    ArcSet,
    as_points,
    normalize_angle,
)


class NearCoincidentCriticalsWarning(UserWarning):
    pass


@dataclass(frozen=True)
class CriticalDirection:
    angle: float
    pairs: tuple[tuple[int, int], ...]

    @property
    def simple(self) -> bool:
        return len(self.pairs) == 1


@dataclass(frozen=True, eq=False)
class Stratification:
    """Critical directions (0-strata) and the open cells between them.

    ``cells[i]`` starts at ``critical[i]`` and ends at ``critical[i + 1]``;
    ``orders[i]`` (a read-only int array row) is the vertex order seen from
    inside that cell.
    """

    critical: tuple[CriticalDirection, ...]
    cells: tuple[Arc, ...]
    orders: np.ndarray
    near_coincident: tuple[tuple[float, float], ...] = ()

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def critical_angles(self) -> list[float]:
        return [c.angle for c in self.critical]

    def cell_of(self, angle: float) -> int | None:
        """Index of the open cell containing ``angle``; None on a critical direction."""
        if len(self.critical) == 0:
            return 0
        angles = self.critical_angles
        a = normalize_angle(angle)
        k = int(np.searchsorted(angles, a, side="right")) - 1
        k %= len(angles)
        if self.cells[k].contains(a):
            return k
        return None


def _pair_normals(P: np.ndarray):
    n = len(P)
    iu, ju = np.triu_indices(n, 1)
    D = P[ju] - P[iu]
    if n > 1 and np.any((D[:, 0] == 0.0) & (D[:, 1] == 0.0)):
        raise ValueError("duplicate points")
    base = np.arctan2(D[:, 1], D[:, 0]) + 0.5 * math.pi
    return iu, ju, base


def critical_directions(V: Sequence, tol: float = ANGLE_TOL) -> list[CriticalDirection]:
    """Directions orthogonal to some vertex difference, merged within ``tol``."""
    P = np.asarray(as_points(V), dtype=float).reshape(-1, 2)
    if len(P) < 2:
        return []
    iu, ju, base = _pair_normals(P)
    angs = np.mod(np.concatenate([base, base + math.pi]), TWO_PI)
    angs[angs >= TWO_PI] = 0.0
    pairs = np.concatenate([np.stack([iu, ju], 1)] * 2)
    order = np.argsort(angs, kind="stable")
    angs, pairs = angs[order], pairs[order]
    # group runs of angles closer than tol; the wrap-around run joins the first
    new_group = np.concatenate([[True], np.diff(angs) > tol])
    starts = np.flatnonzero(new_group)
    ends = np.append(starts[1:], len(angs))
    plist = pairs.tolist()
    alist = angs.tolist()
    groups = [(alist[a], [tuple(pr) for pr in plist[a:b]]) for a, b in zip(starts.tolist(), ends.tolist())]
    if len(groups) > 1 and groups[0][0] + TWO_PI - float(angs[-1]) <= tol:
        a, prs = groups.pop()
        groups[0][1].extend(prs)
    return [CriticalDirection(a, tuple(sorted(prs))) for a, prs in groups]


def coarse_stratification(V: Sequence, tol: float = ANGLE_TOL) -> Stratification:
    P = np.asarray(as_points(V), dtype=float).reshape(-1, 2)
    crit = critical_directions(P, tol)
    if not crit:
        return Stratification((), (Arc(0.0, TWO_PI),), np.arange(len(P))[None, :])
    starts = np.array([c.angle for c in crit])
    gaps = np.diff(np.append(starts, starts[0] + TWO_PI))
    near = [(float(a), float(b)) for a, b, g in zip(starts, np.roll(starts, -1), gaps) if g <= 10 * tol]
    cells = [Arc(float(a), float(g)) for a, g in zip(starts, gaps)]
    mids = starts + 0.5 * gaps
    H = np.cos(mids)[:, None] * P[None, :, 0] + np.sin(mids)[:, None] * P[None, :, 1]
    order_arr = np.argsort(H, axis=1, kind="stable")
    order_arr.setflags(write=False)
    if near:
        warnings.warn(
            f"{len(near)} pairs of critical directions lie within {10 * tol:g} rad; "
            "the smallest cells carry an uncertainty of that size",
            NearCoincidentCriticalsWarning,
            stacklevel=2,
        )
    return Stratification(tuple(crit), tuple(cells), order_arr, tuple(near))


def min_stratum(S: Stratification) -> float:
    return min(c.length for c in S.cells)


def stratum_representatives(S: Stratification) -> list[float]:
    return [c.midpoint for c in S.cells]


def hits_all_strata(S: Stratification, directions: Iterable[float]) -> list[int]:
    """Cells containing none of ``directions`` (empty list: every cell is hit)."""
    hit = set()
    for d in directions:
        k = S.cell_of(d)
        if k is not None:
            hit.add(k)
    return [i for i in range(len(S.cells)) if i not in hit]


# ---------------------------------------------------------------------------
# observability


def observed_from_diagram(D: PersistenceDiagram, h: Sequence[float]) -> set[int]:
    at = {float(x): v for v, x in enumerate(h)}
    out = set()
    for _, b, e in D.points:
        out.add(at[b])
        if e != INF:
            out.add(at[e])
    return out


def observed_vertices(K: SimplicialComplex2D, s: float) -> set[int]:
    """Vertices whose height carries an off-diagonal birth or death."""
    F = lower_star_filtration(K, s)
    return observed_from_diagram(filtration_pairs(F), F.heights)


@dataclass(frozen=True)
class ObservingRegion:
    vertex: int
    region: ArcSet
    theta: float

    @property
    def measure(self) -> float:
        return self.region.measure()


def _theta(region: ArcSet) -> float:
    return max((a.length / 2.0 for a in region.arcs), default=0.0)


def observing_regions(K: SimplicialComplex2D, S: Stratification | None = None) -> list[ObservingRegion]:
    """Observing region of every vertex, by sweeping the cells once."""
    if S is None:
        S = coarse_stratification(K.vertices)
    per_vertex: list[list[Arc]] = [[] for _ in range(K.n_vertices)]
    for cell in S.cells:
        for v in observed_vertices(K, cell.midpoint):
            per_vertex[v].append(cell)
    out = []
    for v, arcs in enumerate(per_vertex):
        region = ArcSet.of(arcs)
        out.append(ObservingRegion(v, region, _theta(region)))
    return out


def observing_region(K: SimplicialComplex2D, v: int, S: Stratification | None = None) -> ObservingRegion:
    return observing_regions(K, S)[v]


def observing_region_degree_two(K: SimplicialComplex2D, v: int) -> ObservingRegion:
    """Closed form for a degree-two vertex: directions where it is a strict local max or min."""
    nb = K.neighbors(v)
    if len(nb) != 2:
        raise ValueError(f"vertex {v} has degree {len(nb)}, expected 2")
    if any(v in t for t in K.triangles):
        raise ValueError(f"vertex {v} has an incident triangle")
    P = K.coords
    u, w = P[nb[0]], P[nb[1]]
    pv = P[v]
    above = ArcSet.half_circle(pv - u).intersect(ArcSet.half_circle(pv - w))
    below = ArcSet.half_circle(u - pv).intersect(ArcSet.half_circle(w - pv))
    region = above.union(below)
    return ObservingRegion(v, region, _theta(region))


def theta_observability(K: SimplicialComplex2D, v: int, S: Stratification | None = None) -> float:
    return observing_region(K, v, S).theta


# ---------------------------------------------------------------------------
# CSV export


def strata_csv(S: Stratification) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["cell_index", "start_angle", "length", "vertex_order"])
    for i, (cell, order) in enumerate(zip(S.cells, S.orders)):
        w.writerow([i, repr(cell.start), repr(cell.length), " ".join(map(str, order.tolist()))])
    return buf.getvalue()


def regions_csv(regions: Iterable[ObservingRegion]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["vertex", "arc_start", "arc_length", "theta"])
    for r in regions:
        for a in r.region.arcs:
            w.writerow([r.vertex, repr(a.start), repr(a.length), repr(r.theta)])
    return buf.getvalue()
