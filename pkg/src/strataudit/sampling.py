"""Direction sets, missed-vertex analysis, discrete transforms and the corpus metric."""
from __future__ import annotations

import csv
import io
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .complex import DegenerateDirectionError, SimplicialComplex2D, vertex_order
from .descriptors import descriptor, descriptor_distance
from .geometry import ANGLE_TOL, TWO_PI, make_rng, normalize_angle
from .stratification import (
    ObservingRegion,
    Stratification,
    coarse_stratification,
    hits_all_strata,
    min_stratum,
    observing_regions,
)

log = logging.getLogger(__name__)


class UnhitStrataWarning(UserWarning):
    """A comparison direction set misses some cell, so positivity is not guaranteed."""


@dataclass(frozen=True)
class DirectionSet:
    directions: tuple[float, ...]
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        angs = sorted(normalize_angle(float(a)) for a in self.directions)
        dedup: list[float] = []
        for a in angs:
            if not dedup or a - dedup[-1] > ANGLE_TOL:
                dedup.append(a)
        if len(dedup) > 1 and dedup[0] + TWO_PI - dedup[-1] <= ANGLE_TOL:
            dedup.pop()
        object.__setattr__(self, "directions", tuple(dedup))

    def __iter__(self):
        return iter(self.directions)

    def __len__(self) -> int:
        return len(self.directions)

    def to_text(self) -> str:
        return "".join(f"{a!r}\n" for a in self.directions)

    @classmethod
    def from_text(cls, text: str) -> "DirectionSet":
        angs = [float(line) for line in text.splitlines() if line.strip() and not line.startswith("#")]
        return cls(tuple(angs), {"scheme": "explicit"})


def uniform_grid(k: int, phase: float = 0.0) -> DirectionSet:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return DirectionSet(
        tuple(phase + TWO_PI * i / k for i in range(k)),
        {"scheme": "grid", "k": k, "phase": phase},
    )


def uniform_random(k: int, seed: int) -> DirectionSet:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    angs = make_rng(seed).uniform(0.0, TWO_PI, size=k)
    return DirectionSet(tuple(angs), {"scheme": "random", "k": k, "seed": seed})


def nested_random(ks: Sequence[int], seed: int) -> dict[int, DirectionSet]:
    """Random direction sets with the smaller ones prefixes of the larger."""
    kmax = max(ks)
    angs = make_rng(seed).uniform(0.0, TWO_PI, size=kmax)
    return {k: DirectionSet(tuple(angs[:k]), {"scheme": "random", "k": k, "seed": seed}) for k in ks}


def epsilon_net(eps: float) -> DirectionSet:
    """Grid with spacing 2pi/ceil(2pi/eps): meets every open arc longer than ``eps``."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    k = max(1, math.ceil(TWO_PI / eps - 1e-12))
    ds = uniform_grid(k)
    return DirectionSet(ds.directions, {"scheme": "eps-net", "eps": eps, "k": k})


def missed_vertices(
    K: SimplicialComplex2D,
    directions: Iterable[float],
    regions: Sequence[ObservingRegion] | None = None,
) -> set[int]:
    """Vertices whose observing region contains none of ``directions``."""
    if regions is None:
        regions = observing_regions(K)
    dirs = list(directions)
    return {r.vertex for r in regions if not any(r.region.contains(d) for d in dirs)}


def greedy_hitting_set(regions: Sequence[ObservingRegion], S: Stratification) -> list[float]:
    """Cell midpoints chosen greedily until every nonempty region is hit (reporting only)."""
    todo = {r.vertex for r in regions if not r.region.is_empty}
    covers = []
    for cell in S.cells:
        m = cell.midpoint
        covers.append((m, {r.vertex for r in regions if r.region.contains(m)}))
    chosen = []
    while todo:
        m, hit = max(covers, key=lambda c: len(c[1] & todo))
        if not hit & todo:
            break
        chosen.append(m)
        todo -= hit
    return chosen


def _nudge(K: SimplicialComplex2D, s: float, S: Stratification | None) -> tuple[float, Stratification | None]:
    try:
        vertex_order(K, s)
        return s, S
    except DegenerateDirectionError:
        if S is None:
            S = coarse_stratification(K.vertices)
        # snap to the nearest cell midpoint
        mids = [c.midpoint for c in S.cells]
        best = min(mids, key=lambda m: min(abs(m - s), TWO_PI - abs(m - s)))
        warnings.warn(f"direction {s!r} is degenerate for the complex; using cell midpoint {best!r}")
        return best, S


@dataclass(frozen=True)
class DiscreteTransform:
    kind: str
    pairs: tuple[tuple[float, object], ...]

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def directions(self) -> list[float]:
        return [s for s, _ in self.pairs]

    def descriptors(self) -> list:
        return [d for _, d in self.pairs]


def discrete_transform(K: SimplicialComplex2D, directions: Iterable[float], kind: str = "ecf") -> DiscreteTransform:
    """One descriptor per direction; degenerate directions are nudged into a cell."""
    S = None
    pairs = []
    for s in directions:
        s_eval, S = _nudge(K, s, S)
        pairs.append((s, descriptor(K, s_eval, kind)))
    return DiscreteTransform(kind, tuple(pairs))


def corpus_direction_set(corpus: Sequence[SimplicialComplex2D]) -> DirectionSet:
    """epsilon-net at the smallest stratum size over the corpus."""
    if not corpus:
        raise ValueError("empty corpus")
    eps = min(min_stratum(coarse_stratification(K.vertices)) for K in corpus)
    return epsilon_net(eps)


DEFAULT_METRIC = {"ecf": "ecf_l1", "pd": "bottleneck"}


def corpus_distance(
    K1: SimplicialComplex2D,
    K2: SimplicialComplex2D,
    P: Iterable[float],
    kind: str = "ecf",
    metric: str | None = None,
    check: bool = True,
) -> float:
    """Sum over ``P`` of the descriptor distance between the two complexes."""
    P = list(P)
    metric = metric or DEFAULT_METRIC[kind]
    if check:
        for K in (K1, K2):
            if K.n_vertices >= 2 and hits_all_strata(coarse_stratification(K.vertices), P):
                warnings.warn("direction set misses a cell; positivity is not guaranteed", UnhitStrataWarning)
    T1 = discrete_transform(K1, P, kind)
    T2 = discrete_transform(K2, P, kind)
    return transform_distance(T1, T2, metric)


def transform_distance(T1: DiscreteTransform, T2: DiscreteTransform, metric: str = "ecf_l1") -> float:
    if T1.directions != T2.directions:
        raise ValueError("transforms use different direction sets")
    total = [descriptor_distance(a, b, metric) for a, b in zip(T1.descriptors(), T2.descriptors())]
    if any(math.isinf(x) for x in total):
        return math.inf
    return math.fsum(total)


MISSED_COLUMNS = ["complex_id", "k_or_eps", "scheme", "seed", "n0", "missed_count", "missed_fraction"]


def missed_rows_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=MISSED_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: r.get(k, "") for k in MISSED_COLUMNS})
    return buf.getvalue()
