"""Shared argument handling for the experiment scripts."""
from __future__ import annotations

import argparse
import logging

from strataudit.experiments import ExperimentConfig


def config_from_args(name: str, description: str, **defaults) -> ExperimentConfig:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--config", help="JSON ExperimentConfig; overrides the built-in defaults")
    p.add_argument("--output", default=f"out/{name}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    a = p.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    if a.config:
        cfg = ExperimentConfig.from_json(a.config)
    else:
        cfg = ExperimentConfig(name, **defaults)
    cfg.output_dir = a.output
    cfg.seed = a.seed
    cfg.workers = a.workers
    return cfg
