"""Proportion of clustered robots at 1800 s for 30 robots per group, bollards on.

Runs g = 3 and g = 5 over ten seeds each (about half an hour per group count
on one core). The reference figures are 1.0000 and 0.9933.
"""

import argparse
import statistics

from swarmagg.controller import BEST_CONTROLLER
from swarmagg.harness import ScenarioConfig, map_jobs, run_trial


def pc_at_1800(cfg):
    return run_trial(cfg, BEST_CONTROLLER).at(1800)["pc"]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    for g in (3, 5):
        base = ScenarioConfig(g=g, n_per_group=30, bollards_enabled=True, duration_s=1800.0)
        pcs = map_jobs(pc_at_1800, [base.replace(seed=s) for s in range(args.seeds)], args.jobs)
        print(f"g={g}: mean pc@1800s {statistics.fmean(pcs):.4f}  per seed {' '.join(f'{p:.3f}' for p in pcs)}",
              flush=True)


if __name__ == "__main__":
    main()
