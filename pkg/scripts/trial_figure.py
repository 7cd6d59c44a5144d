"""Snapshots plus pc(t) and u(t) curves for a single trial.

    python3 scripts/trial_figure.py --seed 0 --groups 3 --per-group 25
"""

import argparse
from pathlib import Path

from swarmagg.controller import BEST_CONTROLLER, ControllerParams
from swarmagg.harness import ScenarioConfig, run_trial
from swarmagg.render import render_snapshot


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("out/figure"))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--groups", type=int, default=3)
    ap.add_argument("--per-group", type=int, default=25)
    ap.add_argument("--duration", type=float, default=2400.0)
    ap.add_argument("--no-bollards", action="store_true")
    ap.add_argument("--controller", type=ControllerParams.parse, default=BEST_CONTROLLER)
    ap.add_argument("--snapshots", default="0,300,600,900,1200,2400")
    args = ap.parse_args()

    cfg = ScenarioConfig(g=args.groups, n_per_group=args.per_group, duration_s=args.duration,
                         bollards_enabled=not args.no_bollards, seed=args.seed)
    times = [float(t) for t in args.snapshots.split(",")]
    res = run_trial(cfg, args.controller, snapshot_at_s=times,
                    on_snapshot=lambda s, w: render_snapshot(w, args.out / f"t{int(s):05d}s.svg", f"{s:g} s"))
    (args.out / "metrics.csv").write_text(res.metrics_csv(sample_every=10))

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    t = res.ticks * res.control_dt
    fig, (a, b) = plt.subplots(2, 1, sharex=True, figsize=(6, 4.5))
    a.plot(t, res.pc, lw=0.8)
    a.set_ylabel("pc")
    a.set_ylim(0, 1.02)
    b.plot(t, res.u, lw=0.8)
    b.set_ylabel("u")
    b.set_xlabel("time (s)")
    fig.tight_layout()
    fig.savefig(args.out / "curves.png", dpi=150)
    print(f"U = {res.cost:.4g}; wrote {args.out}")


if __name__ == "__main__":
    main()
