"""Planar vector math, general-position checks, perturbation and circular arc sets.

Directions on the unit circle are plain floats (radians in ``[0, 2*pi)``).
Arcs are open; single points never live inside an :class:`ArcSet`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi
ANGLE_TOL = 1e-12
COLLINEAR_TOL = 1e-12


class DegenerateError(ValueError):
    """Input violates general position (ties, collinearity, parallel lines)."""


class Point2(NamedTuple):
    x: float
    y: float


def as_points(V: Iterable) -> list[Point2]:
    pts = [Point2(float(p[0]), float(p[1])) for p in V]
    for p in pts:
        if not (math.isfinite(p.x) and math.isfinite(p.y)):
            raise ValueError(f"non-finite coordinate in {p}")
    return pts


def normalize_angle(a: float) -> float:
    a = math.fmod(a, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    if a >= TWO_PI:
        a = 0.0
    return a


def unit(angle: float) -> tuple[float, float]:
    return math.cos(angle), math.sin(angle)


def angle_of(v) -> float:
    return normalize_angle(math.atan2(v[1], v[0]))


def ccw_gap(a: float, b: float) -> float:
    """Counterclockwise distance from angle ``a`` to angle ``b`` in [0, 2pi)."""
    return normalize_angle(b - a)


def angular_distance(a: float, b: float) -> float:
    g = ccw_gap(a, b)
    return min(g, TWO_PI - g)


def vertex_angle(u, v, w) -> float:
    """Interior angle at ``v`` of the path u-v-w, in [0, pi]."""
    a = (u[0] - v[0], u[1] - v[1])
    b = (w[0] - v[0], w[1] - v[1])
    return math.atan2(abs(a[0] * b[1] - a[1] * b[0]), a[0] * b[0] + a[1] * b[1])


def orientation(a, b, c) -> float:
    """Normalized cross product of (b - a, c - a); the sine of the angle at ``a``."""
    ux, uy = b[0] - a[0], b[1] - a[1]
    vx, vy = c[0] - a[0], c[1] - a[1]
    nu, nv = math.hypot(ux, uy), math.hypot(vx, vy)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return (ux * vy - uy * vx) / (nu * nv)


@dataclass(frozen=True)
class GeneralPositionReport:
    collinear_triples: list[tuple[int, int, int]] = field(default_factory=list)
    shared_coordinate_pairs: list[tuple[int, int, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.collinear_triples and not self.shared_coordinate_pairs

    def __bool__(self) -> bool:
        return self.ok


def _shared_coordinates(P: np.ndarray) -> list[tuple[int, int, str]]:
    out = []
    for axis, name in ((0, "x"), (1, "y")):
        order = np.argsort(P[:, axis], kind="stable")
        vals = P[order, axis]
        start = 0
        for k in range(1, len(order) + 1):
            if k == len(order) or vals[k] != vals[start]:
                group = sorted(int(i) for i in order[start:k])
                for a in range(len(group)):
                    for b in range(a + 1, len(group)):
                        out.append((group[a], group[b], name))
                start = k
    return sorted(out)


def _collinear_triples(P: np.ndarray, tol: float) -> list[tuple[int, int, int]]:
    # For each anchor i, sort line angles to later points; collinear triples
    # show up as near-equal angles modulo pi.
    n = len(P)
    found = set()
    for i in range(n - 2):
        D = P[i + 1:] - P[i]
        ang = np.mod(np.arctan2(D[:, 1], D[:, 0]), math.pi)
        order = np.argsort(ang)
        srt = ang[order]
        m = len(srt)
        # candidate pairs among sorted neighbours (with wrap at pi)
        for a in range(m):
            b = a + 1
            while b < a + m:
                gap = srt[b % m] - srt[a] + (math.pi if b >= m else 0.0)
                if gap > 4 * tol + 1e-15:
                    break
                j = i + 1 + int(order[a])
                k = i + 1 + int(order[b % m])
                if abs(orientation(P[i], P[j], P[k])) <= tol:
                    found.add(tuple(sorted((i, j, k))))
                b += 1
    return sorted(found)


def general_position_check(V: Sequence, tol: float = COLLINEAR_TOL) -> GeneralPositionReport:
    """Report every collinear triple and every pair sharing an x or y value."""
    P = np.asarray(as_points(V), dtype=float).reshape(-1, 2)
    if len(P) == 0:
        return GeneralPositionReport()
    return GeneralPositionReport(_collinear_triples(P, tol), _shared_coordinates(P))


def make_rng(seed: int) -> np.random.Generator:
    """The package-wide PRNG: numpy's PCG64 bit generator seeded with ``seed``."""
    return np.random.Generator(np.random.PCG64(seed))


def perturb(V: Sequence, magnitude: float, seed: int) -> list[Point2]:
    """Offset each coordinate by an independent uniform draw from [-magnitude, magnitude)."""
    if not magnitude > 0:
        raise ValueError(f"magnitude must be positive, got {magnitude}")
    P = np.asarray(as_points(V), dtype=float).reshape(-1, 2)
    rng = make_rng(seed)
    off = rng.uniform(-magnitude, magnitude, size=P.shape)
    # uniform() can round up onto the open upper end
    off = np.minimum(off, np.nextafter(magnitude, 0.0))
    return [Point2(float(x), float(y)) for x, y in P + off]


def min_pairwise_line_angle(V: Sequence, chunk: int = 2048) -> float:
    """Smallest angle between the lines spanned by two distinct difference vectors.

    Brute force over all pairs of vertex pairs. Raises :class:`DegenerateError`
    when two difference vectors are parallel.
    """
    P = np.asarray(as_points(V), dtype=float).reshape(-1, 2)
    n = len(P)
    if n < 3:
        raise ValueError("need at least 3 points")
    iu, ju = np.triu_indices(n, 1)
    D = P[ju] - P[iu]
    best = math.inf
    for lo in range(0, len(D), chunk):
        A = D[lo:lo + chunk]
        cross = np.abs(A[:, None, 0] * D[None, :, 1] - A[:, None, 1] * D[None, :, 0])
        dot = np.abs(A[:, None, 0] * D[None, :, 0] + A[:, None, 1] * D[None, :, 1])
        ang = np.arctan2(cross, dot)
        idx = np.arange(lo, lo + len(A))
        ang[np.arange(len(A)), idx] = np.inf
        best = min(best, float(ang.min()))
    if best <= ANGLE_TOL:
        raise DegenerateError("two difference vectors are parallel")
    return best


# ---------------------------------------------------------------------------
# circular arcs


@dataclass(frozen=True)
class Arc:
    """Open arc from ``start`` counterclockwise over ``length`` radians."""

    start: float
    length: float

    def __post_init__(self):
        if not 0.0 < self.length <= TWO_PI + ANGLE_TOL:
            raise ValueError(f"arc length must lie in (0, 2pi], got {self.length}")
        object.__setattr__(self, "start", normalize_angle(self.start))
        object.__setattr__(self, "length", min(self.length, TWO_PI))

    @property
    def end(self) -> float:
        return normalize_angle(self.start + self.length)

    @property
    def midpoint(self) -> float:
        return normalize_angle(self.start + 0.5 * self.length)

    @property
    def is_full(self) -> bool:
        return self.length >= TWO_PI - ANGLE_TOL

    def contains(self, angle: float) -> bool:
        if self.is_full:
            return True
        off = ccw_gap(self.start, angle)
        return 0.0 < off < self.length


def _to_intervals(arcs: Iterable[Arc]) -> list[tuple[float, float]]:
    out = []
    for a in arcs:
        if a.is_full:
            return [(0.0, TWO_PI)]
        hi = a.start + a.length
        if hi <= TWO_PI:
            out.append((a.start, hi))
        else:
            out.append((a.start, TWO_PI))
            out.append((0.0, hi - TWO_PI))
    return out


def _merge(intervals: list[tuple[float, float]], tol: float) -> list[tuple[float, float]]:
    ivs = sorted(iv for iv in intervals if iv[1] - iv[0] > tol)
    merged: list[list[float]] = []
    for lo, hi in ivs:
        if merged and lo <= merged[-1][1] + tol:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [(lo, hi) for lo, hi in merged]


def _from_intervals(ivs: list[tuple[float, float]], tol: float) -> tuple[Arc, ...]:
    ivs = _merge(ivs, tol)
    if not ivs:
        return ()
    if len(ivs) == 1 and ivs[0][0] <= tol and ivs[0][1] >= TWO_PI - tol:
        return (Arc(0.0, TWO_PI),)
    if len(ivs) > 1 and ivs[0][0] <= tol and ivs[-1][1] >= TWO_PI - tol:
        lo, _ = ivs[-1]
        first = ivs[0]
        ivs = ivs[1:-1] + [(lo, TWO_PI + first[1])]
    arcs = [Arc(lo, hi - lo) for lo, hi in ivs]
    return tuple(sorted(arcs, key=lambda a: a.start))


@dataclass(frozen=True)
class ArcSet:
    """Finite union of pairwise disjoint open arcs, kept in canonical form.

    Arcs sharing an endpoint are merged, so the algebra is exact up to finitely
    many points.
    """

    arcs: tuple[Arc, ...] = ()

    @classmethod
    def of(cls, arcs: Iterable[Arc], tol: float = ANGLE_TOL) -> "ArcSet":
        return cls(_from_intervals(_to_intervals(arcs), tol))

    @classmethod
    def full(cls) -> "ArcSet":
        return cls((Arc(0.0, TWO_PI),))

    @classmethod
    def empty(cls) -> "ArcSet":
        return cls(())

    @classmethod
    def half_circle(cls, normal) -> "ArcSet":
        """Directions ``s`` with ``s . normal > 0``."""
        return cls((Arc(angle_of(normal) - 0.5 * math.pi, math.pi),))

    def __iter__(self):
        return iter(self.arcs)

    def __len__(self) -> int:
        return len(self.arcs)

    @property
    def is_empty(self) -> bool:
        return not self.arcs

    @property
    def is_full(self) -> bool:
        return len(self.arcs) == 1 and self.arcs[0].is_full

    def measure(self) -> float:
        return math.fsum(a.length for a in self.arcs)

    def contains(self, angle: float) -> bool:
        return any(a.contains(angle) for a in self.arcs)

    def union(self, other: "ArcSet") -> "ArcSet":
        return ArcSet.of(self.arcs + other.arcs)

    def intersect(self, other: "ArcSet") -> "ArcSet":
        A, B = _to_intervals(self.arcs), _to_intervals(other.arcs)
        out = []
        for lo1, hi1 in A:
            for lo2, hi2 in B:
                lo, hi = max(lo1, lo2), min(hi1, hi2)
                if hi - lo > ANGLE_TOL:
                    out.append((lo, hi))
        return ArcSet(_from_intervals(out, ANGLE_TOL))

    def complement(self) -> "ArcSet":
        if not self.arcs:
            return ArcSet.full()
        if self.is_full:
            return ArcSet.empty()
        gaps = []
        arcs = self.arcs
        for a, b in zip(arcs, arcs[1:] + arcs[:1]):
            g = ccw_gap(a.end, b.start)
            if g > ANGLE_TOL:
                gaps.append(Arc(a.end, g))
        return ArcSet.of(gaps)

    def close_to(self, other: "ArcSet", tol: float = 1e-9) -> bool:
        """Same arcs with endpoints within ``tol`` radians."""
        if len(self) != len(other):
            return False
        return all(
            angular_distance(a.start, b.start) <= tol and abs(a.length - b.length) <= 2 * tol
            for a, b in zip(self.arcs, other.arcs)
        )

    def sample(self, k: int, rng: np.random.Generator) -> list[float]:
        """``k`` directions drawn uniformly (by measure) from the set."""
        if self.is_empty:
            raise ValueError("cannot sample from an empty arc set")
        lengths = np.array([a.length for a in self.arcs])
        pick = rng.choice(len(self.arcs), size=k, p=lengths / lengths.sum())
        offs = rng.uniform(0.0, 1.0, size=k)
        return [normalize_angle(self.arcs[i].start + o * self.arcs[i].length) for i, o in zip(pick, offs)]
