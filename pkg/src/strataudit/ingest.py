"""Corpus construction: random clouds, PNM images to simplified cycle graphs, and `.gsc` I/O."""
from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage

from .complex import SimplicialComplex2D, validate
from .geometry import Point2, general_position_check, make_rng, perturb

log = logging.getLogger(__name__)


class PNMError(ValueError):
    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} (byte offset {offset})")


class GSCError(ValueError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


class PipelineRejected(Exception):
    REASONS = ("collinear", "shared-coordinate", "self-overlap", "empty")

    def __init__(self, reason: str, detail: str = ""):
        assert reason in self.REASONS, reason
        self.reason = reason
        super().__init__(f"{reason}: {detail}" if detail else reason)


@dataclass(frozen=True)
class GrayImage:
    width: int
    height: int
    pixels: tuple[int, ...]
    maxval: int = 255

    def __post_init__(self):
        if len(self.pixels) != self.width * self.height:
            raise ValueError("pixel count does not match dimensions")

    @classmethod
    def from_array(cls, A, maxval: int = 255) -> "GrayImage":
        A = np.asarray(A, dtype=int)
        return cls(A.shape[1], A.shape[0], tuple(int(x) for x in A.ravel()), maxval)

    def array(self) -> np.ndarray:
        return np.asarray(self.pixels, dtype=np.int64).reshape(self.height, self.width)


# ---------------------------------------------------------------------------
# PNM


_WS = b" \t\r\n\v\f"


def _header_tokens(data: bytes, count: int) -> tuple[list[int], int]:
    """Read ``count`` integer header tokens after the magic number; return them and the payload offset."""
    pos = 2
    toks = []
    while len(toks) < count:
        while pos < len(data) and (data[pos] in _WS or data[pos] == ord("#")):
            if data[pos] == ord("#"):
                while pos < len(data) and data[pos] not in b"\r\n":
                    pos += 1
            else:
                pos += 1
        start = pos
        while pos < len(data) and data[pos] not in _WS and data[pos] != ord("#"):
            pos += 1
        if start == pos:
            raise PNMError("truncated header", start)
        tok = data[start:pos]
        if not tok.isdigit():
            raise PNMError(f"bad header token {tok!r}", start)
        toks.append(int(tok))
    return toks, pos


def parse_pnm(data: bytes) -> GrayImage:
    """Decode P1/P2/P4/P5. Bitmaps map 1 (black ink) to maxval so shapes are bright."""
    magic = data[:2]
    if magic not in (b"P1", b"P2", b"P4", b"P5"):
        raise PNMError(f"unsupported magic {magic!r}", 0)
    bitmap = magic in (b"P1", b"P4")
    toks, pos = _header_tokens(data, 2 if bitmap else 3)
    w, h = toks[0], toks[1]
    maxval = 1 if bitmap else toks[2]
    if w <= 0 or h <= 0 or not 0 < maxval < 65536:
        raise PNMError("invalid dimensions or maxval", pos)
    n = w * h
    if magic in (b"P1", b"P2"):
        body = data[pos:]
        if magic == b"P1":
            vals = [int(c) - 48 for c in body if c in b"01"]
        else:
            body = re.sub(rb"#[^\n]*", b"", body)
            vals = [int(t) for t in body.split()]
        if len(vals) < n:
            raise PNMError(f"expected {n} samples, found {len(vals)}", len(data))
        vals = vals[:n]
    else:
        pos += 1  # single whitespace byte before raster
        if magic == b"P5":
            bps = 1 if maxval < 256 else 2
            need = n * bps
            if len(data) - pos < need:
                raise PNMError(f"truncated raster: need {need} bytes", len(data))
            raw = np.frombuffer(data, dtype=np.uint8 if bps == 1 else ">u2", count=n, offset=pos)
            vals = raw.astype(int).tolist()
        else:
            row = (w + 7) // 8
            need = row * h
            if len(data) - pos < need:
                raise PNMError(f"truncated raster: need {need} bytes", len(data))
            raw = np.frombuffer(data, dtype=np.uint8, count=need, offset=pos).reshape(h, row)
            vals = np.unpackbits(raw, axis=1)[:, :w].ravel().astype(int).tolist()
    if bitmap:
        return GrayImage(w, h, tuple(255 * v for v in vals), 255)
    if max(vals, default=0) > maxval:
        raise PNMError("sample exceeds maxval", pos)
    return GrayImage(w, h, tuple(vals), maxval)


def write_pgm(img: GrayImage, binary: bool = True) -> bytes:
    head = f"P{5 if binary else 2}\n{img.width} {img.height}\n{img.maxval}\n".encode()
    if binary:
        dt = np.uint8 if img.maxval < 256 else ">u2"
        return head + np.asarray(img.pixels, dtype=dt).tobytes()
    rows = img.array()
    return head + "".join(" ".join(map(str, r)) + "\n" for r in rows).encode()


# ---------------------------------------------------------------------------
# thresholding


def otsu_threshold(img: GrayImage) -> int:
    """Threshold t (foreground is > t) maximizing between-class variance; smallest on ties."""
    A = img.array().ravel()
    if A.min() == A.max():
        raise ValueError("constant image has no Otsu threshold")
    hist = np.bincount(A, minlength=img.maxval + 1).astype(float)
    p = hist / hist.sum()
    levels = np.arange(len(p), dtype=float)
    w0 = np.cumsum(p)
    mu = np.cumsum(p * levels)
    mu_t = mu[-1]
    w1 = 1.0 - w0
    with np.errstate(divide="ignore", invalid="ignore"):
        sigma_b = (mu_t * w0 - mu) ** 2 / (w0 * w1)
    sigma_b[(w0 <= 0) | (w1 <= 1e-15)] = -1.0
    best = sigma_b.max()
    return int(np.flatnonzero(sigma_b >= best * (1 - 1e-12))[0])


def binarize(img: GrayImage, threshold: float) -> np.ndarray:
    return img.array() > threshold


def global_threshold(manifest: Sequence[tuple[str, Path]]) -> tuple[float, float]:
    """Mean and std of Otsu thresholds of the first image listed for each class."""
    first: dict[str, Path] = {}
    for cls, path in manifest:
        first.setdefault(cls, Path(path))
    ts = [otsu_threshold(parse_pnm(p.read_bytes())) for p in first.values()]
    return float(np.mean(ts)), float(np.std(ts))


def read_manifest(path: Path) -> list[tuple[str, Path]]:
    base = Path(path).parent
    out = []
    for line in Path(path).read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        cls, p = line.split("\t", 1)
        p = Path(p.strip())
        out.append((cls, p if p.is_absolute() else base / p))
    return out


# ---------------------------------------------------------------------------
# contours


@dataclass(frozen=True)
class Contour:
    points: tuple[Point2, ...]
    closed: bool = True

    def __len__(self) -> int:
        return len(self.points)

    def arc_length(self) -> float:
        P = np.asarray(self.points, dtype=float).reshape(-1, 2)
        if len(P) < 2:
            return 0.0
        seg = np.diff(P, axis=0)
        total = float(np.hypot(seg[:, 0], seg[:, 1]).sum())
        if self.closed:
            total += float(np.hypot(*(P[0] - P[-1])))
        return total


# clockwise on screen (row axis pointing down), starting west
_MOORE = [(0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1)]


def moore_trace(mask: np.ndarray, start: tuple[int, int]) -> list[tuple[int, int]]:
    """Outer border of the 8-connected blob containing ``start`` (its raster-first pixel).

    Moore-neighbour tracing with Jacob's stopping criterion: stop on re-entering
    the start pixel from the initial backtrack position.
    """
    H, W = mask.shape

    def fg(r, c):
        return 0 <= r < H and 0 <= c < W and mask[r, c]

    s = start
    back = (s[0], s[1] - 1)
    contour = [s]
    p, b = s, back
    first_state = None
    while True:
        k0 = _MOORE.index((b[0] - p[0], b[1] - p[1]))
        nxt = None
        for step in range(1, 9):
            dr, dc = _MOORE[(k0 + step) % 8]
            q = (p[0] + dr, p[1] + dc)
            if fg(*q):
                pr, pc = _MOORE[(k0 + step - 1) % 8]
                nxt, b = q, (p[0] + pr, p[1] + pc)
                break
        if nxt is None:
            return contour  # isolated pixel
        state = (p, nxt)
        if first_state is None:
            first_state = state
        elif state == first_state:
            return contour[:-1]
        p = nxt
        contour.append(p)


def extract_contours(mask: np.ndarray) -> list[Contour]:
    mask = np.asarray(mask, dtype=bool)
    labels, n = ndimage.label(mask, structure=np.ones((3, 3), dtype=int))
    H = mask.shape[0]
    out = []
    for lab in range(1, n + 1):
        rows, cols = np.nonzero(labels == lab)
        k = np.lexsort((cols, rows))[0]
        pix = moore_trace(labels == lab, (int(rows[k]), int(cols[k])))
        # x = column, y = image row flipped so shapes appear upright
        pts = tuple(Point2(float(c), float(H - 1 - r)) for r, c in pix)
        out.append(Contour(pts, closed=len(pts) >= 3))
    return out


def extract_longest_contour(mask: np.ndarray) -> Contour:
    cs = extract_contours(mask)
    if not cs:
        raise ValueError("image has no foreground pixels")
    return max(cs, key=lambda c: (c.arc_length(), len(c)))


def _seg_dist(P: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = b - a
    L2 = float(d @ d)
    if L2 == 0.0:
        return np.hypot(*(P - a).T)
    t = np.clip((P - a) @ d / L2, 0.0, 1.0)
    return np.hypot(*(P - (a + t[:, None] * d)).T)


def _dp_open(P: np.ndarray, eps: float) -> list[int]:
    keep = {0, len(P) - 1}
    stack = [(0, len(P) - 1)]
    while stack:
        i, j = stack.pop()
        if j <= i + 1:
            continue
        d = _seg_dist(P[i + 1:j], P[i], P[j])
        k = int(np.argmax(d))
        if d[k] > eps:
            m = i + 1 + k
            keep.add(m)
            stack += [(i, m), (m, j)]
    return sorted(keep)


def douglas_peucker(contour: Contour, epsilon: float) -> Contour:
    """Douglas-Peucker; closed contours are split at the point farthest from point 0."""
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    P = np.asarray(contour.points, dtype=float).reshape(-1, 2)
    if len(P) <= 2:
        return contour
    if not contour.closed:
        idx = _dp_open(P, epsilon)
    else:
        f = int(np.argmax(np.hypot(*(P - P[0]).T)))
        first = _dp_open(P[: f + 1], epsilon)
        ring = np.vstack([P[f:], P[:1]])
        second = [f + i for i in _dp_open(ring, epsilon)][1:-1]
        idx = first + second
    return Contour(tuple(contour.points[i] for i in idx), contour.closed)


def contour_pipeline(
    img: GrayImage,
    level: float = 0.005,
    seed: int = 0,
    threshold: float | None = None,
    magnitude: float = 0.01,
) -> SimplicialComplex2D:
    """Threshold, trace, simplify, perturb and clean one image into a cycle graph.

    Raises :class:`PipelineRejected` with a reason code when the result is unusable.
    """
    if threshold is None:
        threshold = 0
    mask = binarize(img, threshold)
    if not mask.any():
        raise PipelineRejected("empty", "no foreground after thresholding")
    c = extract_longest_contour(mask)
    s = c.arc_length()
    simp = douglas_peucker(c, level * s)
    if len(simp) < 3:
        raise PipelineRejected("empty", f"simplified contour has {len(simp)} points")
    pts = perturb(simp.points, magnitude, seed)
    gp = general_position_check(pts)
    if gp.collinear_triples:
        raise PipelineRejected("collinear", str(gp.collinear_triples[:3]))
    if gp.shared_coordinate_pairs:
        raise PipelineRejected("shared-coordinate", str(gp.shared_coordinate_pairs[:3]))
    K = SimplicialComplex2D.cycle(pts)
    rep = validate(K)
    if not rep.is_simplicial:
        raise PipelineRejected("self-overlap", "; ".join(rep.problems()[:3]))
    return K


def random_cloud(k: int, seed: int, box: float = 10.0) -> list[Point2]:
    """``k`` i.i.d. uniform points in [0, box]^2."""
    if k < 1:
        raise ValueError("k must be >= 1")
    P = make_rng(seed).uniform(0.0, box, size=(k, 2))
    return [Point2(float(x), float(y)) for x, y in P]


RANDPTS_SIZES = (3, 5, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100)


def randpts_corpus(sizes: Iterable[int] = RANDPTS_SIZES, per_size: int = 100, seed: int = 0):
    """Vertex-only complexes; cloud j of size k uses seed ``seed * 10**6 + k * 1000 + j``."""
    for k in sizes:
        for j in range(per_size):
            yield f"randpts-{k}-{j}", SimplicialComplex2D(tuple(random_cloud(k, seed * 10**6 + k * 1000 + j)))


# ---------------------------------------------------------------------------
# .gsc


def write_gsc(K: SimplicialComplex2D) -> bytes:
    lines = ["gsc 2"]
    lines += [f"v {p.x:.17g} {p.y:.17g}" for p in K.vertices]
    lines += [f"e {i} {j}" for i, j in K.edges]
    lines += [f"t {i} {j} {k}" for i, j, k in K.triangles]
    return ("\n".join(lines) + "\n").encode()


def read_gsc(data: bytes | str) -> SimplicialComplex2D:
    text = data.decode() if isinstance(data, bytes) else data
    verts, edges, tris = [], [], []
    header = False
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if not header:
            if tok != ["gsc", "2"]:
                raise GSCError(f"expected header 'gsc 2', got {line!r}", ln)
            header = True
            continue
        try:
            if tok[0] == "v" and len(tok) == 3:
                verts.append((float(tok[1]), float(tok[2])))
            elif tok[0] == "e" and len(tok) == 3:
                edges.append((int(tok[1]), int(tok[2])))
            elif tok[0] == "t" and len(tok) == 4:
                tris.append((int(tok[1]), int(tok[2]), int(tok[3])))
            else:
                raise GSCError(f"unrecognized record {line!r}", ln)
        except ValueError as exc:
            if isinstance(exc, GSCError):
                raise
            raise GSCError(f"bad number in {line!r}", ln) from exc
        if tok[0] in "et":
            ids = [int(x) for x in tok[1:]]
            if len(set(ids)) != len(ids) or any(x < 0 for x in ids):
                raise GSCError(f"invalid simplex {line!r}", ln)
    if not header:
        raise GSCError("missing header", 1)
    n = len(verts)
    K = SimplicialComplex2D(tuple(verts), tuple(edges), tuple(tris))
    es = set(K.edges)
    for e in K.edges:
        if max(e) >= n:
            raise GSCError(f"face closure: edge {e} references a missing vertex", 0)
    for t in K.triangles:
        for f in ((t[0], t[1]), (t[0], t[2]), (t[1], t[2])):
            if f not in es:
                raise GSCError(f"face closure: triangle {t} is missing edge {f}", 0)
    return K


def load_corpus(directory: Path) -> list[tuple[str, SimplicialComplex2D]]:
    return [(p.stem, read_gsc(p.read_bytes())) for p in sorted(Path(directory).glob("*.gsc"))]
