"""Checkpoint table for the g x r/g x bollards matrix.

    python3 scripts/validation_matrix.py --trials 10 --jobs 8      # all 200 trials
    python3 scripts/validation_matrix.py --groups 3 --per-group 10 --trials 3
"""

import argparse
from pathlib import Path

from swarmagg.controller import BEST_CONTROLLER, ControllerParams
from swarmagg.harness import MATRIX_GROUPS, MATRIX_PER_GROUP, run_validation_matrix


def ints(text):
    return tuple(int(x) for x in text.split(","))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("out/validation"))
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--groups", type=ints, default=MATRIX_GROUPS)
    ap.add_argument("--per-group", type=ints, default=MATRIX_PER_GROUP)
    ap.add_argument("--duration", type=float, default=2400.0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=None)
    ap.add_argument("--controller", type=ControllerParams.parse, default=BEST_CONTROLLER)
    args = ap.parse_args()

    report = run_validation_matrix(
        args.seed, args.trials, args.controller, jobs=args.jobs,
        groups=args.groups, per_group=args.per_group, duration_s=args.duration,
    )
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "validation_rows.csv").write_text(report.rows_csv())
    (args.out / "validation_summary.csv").write_text(report.summary_csv())

    cps = report.checkpoints
    print("g  r/g  bollards  " + "  ".join(f"pc@{c:g}" for c in cps) + "  steady_s")
    for c in report.configs:
        pcs = "  ".join(f"{c.stats[cp]['pc'][0]:7.4f}" for cp in cps)
        print(f"{c.g}  {c.n_per_group:3d}  {'on ' if c.bollards else 'off'}       {pcs}  {c.steady_time_s:g}")


if __name__ == "__main__":
    main()
