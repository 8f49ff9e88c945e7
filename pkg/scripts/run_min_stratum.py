"""Smallest stratum size versus vertex count on random point clouds, with a log-log fit."""
import time

from _common import config_from_args

from strataudit.experiments import experiment_min_stratum

if __name__ == "__main__":
    cfg = config_from_args("min-stratum", __doc__, corpus={"generator": "randpts"})
    t0 = time.perf_counter()
    rows, fit = experiment_min_stratum(cfg)
    print(f"{len(rows)} complexes in {time.perf_counter() - t0:.1f}s")
    print(f"log m = {fit.intercept:.5f} + ({fit.slope:.5f}) log n0   r^2 = {fit.r_squared:.4f}")
    print(f"wrote {cfg.out}/min_stratum.csv, min_stratum_fit.json, min_stratum.svg")
