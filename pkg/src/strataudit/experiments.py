"""Experiment drivers: smallest-stratum scaling, uniform under-sampling, lower bound,
lost vertex; plus log-log regression and a dependency-free SVG scatter plot."""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .complex import SimplicialComplex2D
from .constructions import (
    hausdorff_distance,
    lost_vertex_pair,
    lower_bound_complex,
    random_cycle_graph,
    random_isosceles_triple,
)
from .descriptors import descriptor, descriptor_equal
from .geometry import make_rng
from .ingest import RANDPTS_SIZES, load_corpus, randpts_corpus
from .sampling import missed_rows_csv, missed_vertices, nested_random, uniform_grid
from .stratification import coarse_stratification, critical_directions, min_stratum, observing_regions

log = logging.getLogger(__name__)

TINY_STRATUM = 1e-5


@dataclass(frozen=True)
class RegressionFit:
    intercept: float
    slope: float
    r_squared: float
    n_points: int

    def predict(self, n0: float) -> float:
        return math.exp(self.intercept + self.slope * math.log(n0))


def loglog_fit(points: Iterable[tuple[float, float]]) -> RegressionFit:
    """Ordinary least squares of ln(m) on ln(n0)."""
    P = np.asarray(list(points), dtype=float).reshape(-1, 2)
    if len(P) < 2 or np.any(P <= 0):
        raise ValueError("need >= 2 points with positive coordinates")
    if len(np.unique(P[:, 0])) < 2:
        raise ValueError("need at least two distinct n0 values")
    x, y = np.log(P[:, 0]), np.log(P[:, 1])
    xm, ym = x.mean(), y.mean()
    sxx = float(((x - xm) ** 2).sum())
    slope = float(((x - xm) * (y - ym)).sum()) / sxx
    intercept = float(ym - slope * xm)
    resid = y - (intercept + slope * x)
    sst = float(((y - ym) ** 2).sum())
    r2 = 1.0 - float((resid ** 2).sum()) / sst if sst > 0 else 1.0
    return RegressionFit(intercept, slope, r2, len(P))


@dataclass
class ExperimentConfig:
    """JSON-backed experiment description. ``corpus`` is either
    ``{"directory": path}`` or ``{"generator": name, ...params}``."""

    name: str
    corpus: dict = field(default_factory=dict)
    sampling: dict = field(default_factory=dict)
    seed: int = 0
    output_dir: str = "out"
    workers: int = 1

    @classmethod
    def from_json(cls, path_or_obj) -> "ExperimentConfig":
        if isinstance(path_or_obj, (str, Path)) and Path(path_or_obj).exists():
            obj = json.loads(Path(path_or_obj).read_text())
        elif isinstance(path_or_obj, str):
            obj = json.loads(path_or_obj)
        else:
            obj = dict(path_or_obj)
        cfg = cls(**obj)
        d = cfg.corpus.get("directory")
        if d is not None and not Path(d).is_dir():
            raise FileNotFoundError(f"corpus directory {d} does not exist")
        return cfg

    @property
    def out(self) -> Path:
        p = Path(self.output_dir)
        p.mkdir(parents=True, exist_ok=True)
        return p


def build_corpus(source: dict, seed: int = 0) -> list[tuple[str, SimplicialComplex2D]]:
    if "directory" in source:
        return load_corpus(Path(source["directory"]))
    gen = source.get("generator", "randpts")
    if gen == "randpts":
        return list(randpts_corpus(source.get("sizes", RANDPTS_SIZES), source.get("per_size", 100), source.get("seed", seed)))
    if gen == "randpoly":
        rng = make_rng(source.get("seed", seed))
        out = []
        for n in source.get("sizes", (5, 10, 20)):
            for j in range(source.get("per_size", 5)):
                out.append((f"randpoly-{n}-{j}", random_cycle_graph(n, rng)))
        return out
    if gen == "lower_bound":
        return [(f"lower-bound-{n}", lower_bound_complex(n, verify=False).complex) for n in source.get("n", (3,))]
    raise ValueError(f"unknown corpus generator {gen!r}")


def _pmap(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(workers) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def _rows_csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(r[k]) if isinstance(r[k], float) else r[k]) for k in columns})
    return buf.getvalue()


# ---------------------------------------------------------------------------
# smallest stratum


def _min_stratum_row(item) -> dict:
    cid, K = item
    return {"complex_id": cid, "n0": K.n_vertices, "min_stratum": min_stratum(coarse_stratification(K.vertices))}


def experiment_min_stratum(cfg: ExperimentConfig, write: bool = True) -> tuple[list[dict], RegressionFit]:
    corpus = build_corpus(cfg.corpus or {"generator": "randpts"}, cfg.seed)
    if not corpus:
        raise ValueError("empty corpus")
    rows = _pmap(_min_stratum_row, corpus, cfg.workers)
    tiny = sum(r["min_stratum"] < TINY_STRATUM for r in rows)
    if tiny:
        log.warning("%d complexes have a smallest stratum below %g rad", tiny, TINY_STRATUM)
    fit = loglog_fit((r["n0"], r["min_stratum"]) for r in rows)
    if write:
        out = cfg.out
        (out / "min_stratum.csv").write_text(_rows_csv(rows, ["complex_id", "n0", "min_stratum"]))
        (out / "min_stratum_fit.json").write_text(json.dumps(asdict(fit), indent=2) + "\n")
        pts = [(r["n0"], r["min_stratum"]) for r in rows]
        (out / "min_stratum.svg").write_bytes(svg_scatter(pts, fit, "n0", "smallest stratum (rad)"))
    return rows, fit


# ---------------------------------------------------------------------------
# uniform under-sampling

DEFAULT_KS = (4, 8, 16, 32, 64)


def _miss_rows(args) -> list[dict]:
    (cid, K), ks, seeds, phase = args
    regions = observing_regions(K)
    rows = []
    n0 = K.n_vertices
    for k in ks:
        miss = missed_vertices(K, uniform_grid(k, phase), regions)
        rows.append({"complex_id": cid, "k_or_eps": k, "scheme": "grid", "seed": "",
                     "n0": n0, "missed_count": len(miss), "missed_fraction": len(miss) / n0})
    for seed in seeds:
        sets = nested_random(ks, seed)
        for k in ks:
            miss = missed_vertices(K, sets[k], regions)
            rows.append({"complex_id": cid, "k_or_eps": k, "scheme": "random", "seed": seed,
                         "n0": n0, "missed_count": len(miss), "missed_fraction": len(miss) / n0})
    return rows


def summarize_missed(rows: Sequence[dict]) -> list[dict]:
    """Mean missed fraction per (scheme, k, n0)."""
    acc: dict[tuple, list[float]] = {}
    for r in rows:
        acc.setdefault((r["scheme"], int(r["k_or_eps"]), int(r["n0"])), []).append(float(r["missed_fraction"]))
    return [
        {"scheme": s, "k": k, "n0": n0, "mean_missed_fraction": float(np.mean(v)), "count": len(v)}
        for (s, k, n0), v in sorted(acc.items())
    ]


def experiment_uniform_miss(cfg: ExperimentConfig, write: bool = True) -> list[dict]:
    corpus = build_corpus(cfg.corpus or {"generator": "randpoly"}, cfg.seed)
    ks = tuple(cfg.sampling.get("ks", DEFAULT_KS))
    n_seeds = cfg.sampling.get("n_seeds", 20)
    seeds = tuple(cfg.seed * 1000 + i for i in range(n_seeds))
    phase = float(cfg.sampling.get("phase", 0.0))
    chunks = _pmap(_miss_rows, [(item, ks, seeds, phase) for item in corpus], cfg.workers)
    rows = [r for c in chunks for r in c]
    if write:
        out = cfg.out
        (out / "missed.csv").write_text(missed_rows_csv(rows))
        summary = summarize_missed(rows)
        (out / "missed_summary.csv").write_text(
            _rows_csv(summary, ["scheme", "k", "n0", "mean_missed_fraction", "count"]))
    return rows


# ---------------------------------------------------------------------------
# lower bound


def experiment_lower_bound(cfg: ExperimentConfig, write: bool = True) -> dict:
    ns = cfg.corpus.get("n", list(range(1, 13)))
    reports = [lower_bound_complex(n).report() for n in ns]
    result = {"experiment": "lower_bound", "instances": reports}
    if write:
        (cfg.out / "lower_bound.json").write_text(json.dumps(result, indent=2) + "\n")
    return result


# ---------------------------------------------------------------------------
# lost vertex


def _off_region_directions(K: SimplicialComplex2D, region, k: int, rng, gap: float = 1e-9) -> list[float]:
    crit = np.array([c.angle for c in critical_directions(K.vertices)])
    comp = region.complement()
    out = []
    while len(out) < k:
        for s in comp.sample(k, rng):
            d = np.abs(crit - s)
            if np.min(np.minimum(d, 2 * math.pi - d)) > gap:
                out.append(s)
    return out[:k]


def _on_region_directions(region) -> list[float]:
    # quarter points: for isosceles triples the arc midpoints tie u and w
    return [a.start + f * a.length for a in region.arcs for f in (0.25, 0.75)]


def lost_vertex_check(u, v, w, rng, n_off: int = 64, resolution: int = 10_000) -> dict:
    pair = lost_vertex_pair(u, v, w)
    obs = observing_regions(pair.K)[pair.v_id].region
    H = hausdorff_distance(pair.K, pair.K_prime, resolution)
    off = _off_region_directions(pair.K, obs, n_off, rng)
    on = _on_region_directions(obs)
    verdict = {}
    for kind in ("pd", "ecf"):
        verdict[f"{kind}_equal_off_region"] = all(
            descriptor_equal(descriptor(pair.K, s, kind), descriptor(pair.K_prime, s, kind)) for s in off)
        verdict[f"{kind}_unequal_on_region"] = all(
            not descriptor_equal(descriptor(pair.K, s, kind), descriptor(pair.K_prime, s, kind)) for s in on)
    return {
        "u": list(map(float, u)), "v": list(map(float, v)), "w": list(map(float, w)),
        "theta": pair.theta,
        "predicted_hausdorff": pair.predicted_hausdorff,
        "projection_distance": pair.projection_distance,
        "computed_hausdorff": H.value,
        "sampling_bound": H.error_bound,
        "region_measure": obs.measure(),
        **verdict,
    }


CANONICAL_TRIPLE = ((-1.0, 0.0), (0.0, 1.0), (1.0, 0.0))


def experiment_lost_vertex(cfg: ExperimentConfig, write: bool = True) -> dict:
    rng = make_rng(cfg.seed)
    triples = cfg.corpus.get("triples")
    if triples is None:
        triples = [CANONICAL_TRIPLE] + [random_isosceles_triple(rng) for _ in range(cfg.corpus.get("n_random", 100))]
    resolution = int(cfg.sampling.get("resolution", 10_000))
    n_off = int(cfg.sampling.get("n_off", 64))
    checks = [lost_vertex_check(u, v, w, rng, n_off, resolution) for u, v, w in triples]
    result = {
        "experiment": "lost_vertex",
        "max_abs_error": max(abs(c["predicted_hausdorff"] - c["computed_hausdorff"]) for c in checks),
        "max_abs_error_projection": max(abs(c["projection_distance"] - c["computed_hausdorff"]) for c in checks),
        "max_sampling_bound": max(c["sampling_bound"] for c in checks),
        "triples": checks,
    }
    if write:
        (cfg.out / "lost_vertex.json").write_text(json.dumps(result, indent=2) + "\n")
    return result


EXPERIMENTS = {
    "min-stratum": experiment_min_stratum,
    "uniform-miss": experiment_uniform_miss,
    "lower-bound": experiment_lower_bound,
    "lost-vertex": experiment_lost_vertex,
}


# ---------------------------------------------------------------------------
# SVG


def svg_scatter(
    points: Sequence[tuple[float, float]],
    fit: RegressionFit | None = None,
    xlabel: str = "x",
    ylabel: str = "y",
    width: int = 480,
    height: int = 360,
) -> bytes:
    """Log-log scatter with an optional fitted power law; byte-identical for equal input."""
    P = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(P) == 0:
        raise ValueError("nothing to plot")
    if np.any(P <= 0):
        raise ValueError("log-log plot needs positive coordinates")
    lx, ly = np.log10(P[:, 0]), np.log10(P[:, 1])
    x0, x1 = math.floor(lx.min()), math.ceil(lx.max())
    y0, y1 = math.floor(ly.min()), math.ceil(ly.max())
    x1, y1 = max(x1, x0 + 1), max(y1, y0 + 1)
    ml, mr, mt, mb = 70, 20, 20, 50
    pw, ph = width - ml - mr, height - mt - mb

    def X(v):
        return ml + (v - x0) / (x1 - x0) * pw

    def Y(v):
        return mt + (y1 - v) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<defs><clipPath id="plot"><rect x="{ml}" y="{mt}" width="{pw}" height="{ph}"/></clipPath></defs>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for d in range(x0, x1 + 1):
        out.append(f'<text x="{X(d):.2f}" y="{mt + ph + 18}" font-size="11" text-anchor="middle">1e{d}</text>')
    for d in range(y0, y1 + 1):
        out.append(f'<text x="{ml - 6}" y="{Y(d) + 4:.2f}" font-size="11" text-anchor="end">1e{d}</text>')
    out.append(f'<text x="{ml + pw / 2:.2f}" y="{height - 10}" font-size="12" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="14" y="{mt + ph / 2:.2f}" font-size="12" text-anchor="middle" '
               f'transform="rotate(-90 14 {mt + ph / 2:.2f})">{escape(ylabel)}</text>')
    out.append('<g fill="steelblue" fill-opacity="0.5">')
    out.extend(f'<circle cx="{X(a):.2f}" cy="{Y(b):.2f}" r="2"/>' for a, b in zip(lx, ly))
    out.append("</g>")
    if fit is not None:
        # ln m = a + b ln n  =>  log10 m = a / ln 10 + b log10 n
        ya = fit.intercept / math.log(10) + fit.slope * x0
        yb = fit.intercept / math.log(10) + fit.slope * x1
        out.append(f'<line x1="{X(x0):.2f}" y1="{Y(ya):.2f}" x2="{X(x1):.2f}" y2="{Y(yb):.2f}" '
                   f'stroke="firebrick" stroke-width="1.5" clip-path="url(#plot)"/>')
        out.append(f'<text x="{ml + pw - 4}" y="{mt + 14}" font-size="11" text-anchor="end">'
                   f'ln m = {fit.intercept:.4f} {"-" if fit.slope < 0 else "+"} {abs(fit.slope):.4f} ln n0, '
                   f'r2 = {fit.r_squared:.3f}</text>')
    out.append("</svg>\n")
    return "\n".join(out).encode()
