"""Fraction of vertices missed by uniform direction sets of fixed size."""
from _common import config_from_args

from strataudit.experiments import experiment_uniform_miss, summarize_missed

if __name__ == "__main__":
    cfg = config_from_args(
        "uniform-miss", __doc__,
        corpus={"generator": "randpoly", "sizes": [5, 10, 20, 40], "per_size": 10},
    )
    rows = experiment_uniform_miss(cfg)
    print(f"{'scheme':>7} {'k':>4} {'n0':>4}  mean missed fraction")
    for r in summarize_missed(rows):
        print(f"{r['scheme']:>7} {r['k']:>4} {r['n0']:>4}  {r['mean_missed_fraction']:.4f}")
