"""Build the thin-triangle complexes for n = 1..12 and confirm the apex regions are disjoint."""
from _common import config_from_args

from strataudit.experiments import experiment_lower_bound

if __name__ == "__main__":
    cfg = config_from_args("lower-bound", __doc__)
    res = experiment_lower_bound(cfg)
    for r in res["instances"]:
        print(f"n={r['n']:>2}  delta*={r['delta_star']:.6f}  eps={r['epsilon_used']:.6f}  "
              f"disjoint={r['disjoint']}  directions needed >= {r['min_directions']}")
