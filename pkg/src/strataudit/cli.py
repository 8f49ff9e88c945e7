"""``strataudit`` command-line front end.

Exit codes: 0 success, 2 validation rejection, 1 any other error.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import __version__
from .complex import SimplicialComplex2D, validate
from .constructions import example_triangle, lost_vertex_pair, lower_bound_complex, random_cycle_graph
from .descriptors import descriptor
from .experiments import EXPERIMENTS, ExperimentConfig
from .geometry import make_rng
from .ingest import (
    GSCError,
    PipelineRejected,
    contour_pipeline,
    parse_pnm,
    random_cloud,
    read_gsc,
    write_gsc,
)
from .sampling import (
    DirectionSet,
    corpus_direction_set,
    corpus_distance,
    epsilon_net,
    uniform_grid,
    uniform_random,
)
from .stratification import coarse_stratification, observing_regions, regions_csv, strata_csv

log = logging.getLogger("strataudit")


class Rejected(Exception):
    pass


def _emit(text: str | bytes, output: str | None) -> None:
    if output in (None, "-"):
        sys.stdout.write(text.decode() if isinstance(text, bytes) else text)
    else:
        Path(output).write_bytes(text if isinstance(text, bytes) else text.encode())


def _load(path: str) -> SimplicialComplex2D:
    try:
        return read_gsc(Path(path).read_bytes())
    except GSCError as exc:
        if "face closure" in str(exc):
            raise Rejected(str(exc)) from exc
        raise


def _require_valid(K: SimplicialComplex2D) -> None:
    rep = validate(K)
    if not rep.is_simplicial:
        raise Rejected("; ".join(rep.problems()))


def cmd_stratify(a) -> None:
    K = _load(a.input)
    _emit(strata_csv(coarse_stratification(K.vertices)), a.output)


def cmd_observe(a) -> None:
    K = _load(a.input)
    _require_valid(K)
    _emit(regions_csv(observing_regions(K)), a.output)


def cmd_descriptors(a) -> None:
    K = _load(a.input)
    D = descriptor(K, a.direction, a.type)
    if a.type == "betti":
        obj = {"beta0": D[0].to_json(), "beta1": D[1].to_json()}
    else:
        obj = D.to_json()
    obj = {"direction": a.direction, "type": a.type, **obj}
    _emit(json.dumps(obj, indent=2) + "\n", a.output)


def cmd_sample(a) -> None:
    if a.scheme == "grid":
        ds = uniform_grid(a.k, a.phase)
    elif a.scheme == "random":
        ds = uniform_random(a.k, a.seed)
    elif a.scheme == "eps":
        ds = epsilon_net(a.eps)
    else:
        corpus = [_load(p) for p in a.input]
        ds = corpus_direction_set(corpus)
    _emit(ds.to_text(), a.output)


def cmd_ingest(a) -> None:
    img = parse_pnm(Path(a.input).read_bytes())
    try:
        K = contour_pipeline(img, a.level, a.seed, a.threshold)
    except PipelineRejected as exc:
        raise Rejected(f"image rejected: {exc}") from exc
    _emit(write_gsc(K), a.output)


def cmd_compare(a) -> None:
    K1, K2 = _load(a.input[0]), _load(a.input[1])
    if a.directions:
        P = DirectionSet.from_text(Path(a.directions).read_text())
    else:
        P = corpus_direction_set([K1, K2])
    d = corpus_distance(K1, K2, P, a.type, a.metric)
    _emit(json.dumps({"distance": "inf" if math.isinf(d) else d, "n_directions": len(P)}) + "\n", a.output)


def cmd_generate(a) -> None:
    if a.what == "triangle":
        K = example_triangle()
    elif a.what == "lower-bound":
        K = lower_bound_complex(a.n).complex
    elif a.what == "lost-vertex":
        pair = lost_vertex_pair((-1.0, 0.0), (0.0, 1.0), (1.0, 0.0))
        K = pair.K_prime if a.prime else pair.K
    elif a.what == "randpts":
        K = SimplicialComplex2D(tuple(random_cloud(a.n, a.seed)))
    else:
        K = random_cycle_graph(a.n, make_rng(a.seed))
    _emit(write_gsc(K), a.output)


def cmd_experiment(a) -> None:
    if a.config:
        cfg = ExperimentConfig.from_json(a.config)
    else:
        cfg = ExperimentConfig(a.name)
    cfg.name = a.name
    if a.output:
        cfg.output_dir = a.output
    if a.seed is not None:
        cfg.seed = a.seed
    result = EXPERIMENTS[a.name](cfg)
    if a.name == "min-stratum":
        rows, fit = result
        print(json.dumps({"n_complexes": len(rows), "slope": fit.slope, "intercept": fit.intercept,
                          "r_squared": fit.r_squared}))
    elif a.name == "uniform-miss":
        print(json.dumps({"rows": len(result)}))
    elif a.name == "lower-bound":
        inst = result["instances"]
        print(json.dumps({"n": [r["n"] for r in inst], "all_disjoint": all(r["disjoint"] for r in inst)}))
    else:
        print(json.dumps({k: v for k, v in result.items() if not isinstance(v, list)}))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="strataudit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("stratify", help="CSV of the coarse stratification of a complex's vertex set")
    s.add_argument("--input", required=True)
    s.add_argument("--output")
    s.set_defaults(func=cmd_stratify)

    s = sub.add_parser("observe", help="CSV of per-vertex observing regions")
    s.add_argument("--input", required=True)
    s.add_argument("--output")
    s.set_defaults(func=cmd_observe)

    s = sub.add_parser("descriptors", help="descriptor of a complex in one direction, as JSON")
    s.add_argument("--input", required=True)
    s.add_argument("--direction", type=float, required=True, help="radians")
    s.add_argument("--type", choices=("pd", "ecf", "betti"), default="pd")
    s.add_argument("--output")
    s.set_defaults(func=cmd_descriptors)

    s = sub.add_parser("sample", help="write a direction set, one angle (radians) per line")
    s.add_argument("--scheme", choices=("grid", "random", "eps", "corpus"), default="grid")
    s.add_argument("--k", type=int, default=16)
    s.add_argument("--phase", type=float, default=0.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--input", nargs="*", default=[], help=".gsc files for --scheme corpus")
    s.add_argument("--output")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("ingest", help="PNM image to a simplified cycle graph (.gsc)")
    s.add_argument("--input", required=True)
    s.add_argument("--level", type=float, default=0.005)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--threshold", type=float, default=None)
    s.add_argument("--output")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("compare", help="corpus distance between two complexes")
    s.add_argument("--input", nargs=2, required=True)
    s.add_argument("--directions", help="direction file; default: eps-net at the smaller min stratum")
    s.add_argument("--type", choices=("ecf", "pd"), default="ecf")
    s.add_argument("--metric", choices=("ecf_l1", "bottleneck"))
    s.add_argument("--output")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("generate", help="write a constructed complex as .gsc")
    s.add_argument("what", choices=("triangle", "lower-bound", "lost-vertex", "randpts", "cycle"))
    s.add_argument("--n", type=int, default=5)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--prime", action="store_true", help="lost-vertex: emit K' instead of K")
    s.add_argument("--output")
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("experiment", help="run an experiment end to end")
    s.add_argument("name", choices=sorted(EXPERIMENTS))
    s.add_argument("--config", help="JSON ExperimentConfig")
    s.add_argument("--output", help="output directory")
    s.add_argument("--seed", type=int)
    s.add_argument("--input", help="unused; corpus comes from the config")
    s.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except Rejected as exc:
        log.error("%s", exc)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.error("%s: %s", type(exc).__name__, exc)
        if args.verbose:
            raise
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
