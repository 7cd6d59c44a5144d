"""Sweep (vl2, vr2) and plot ln mean U as a heatmap.

The full sweep (21 x 21 cells, 30 runs, 75 robots, 2400 s) takes days on one
core. The defaults here are the coarse desk version:

    python3 scripts/reproduce_heatmap.py --out out/heatmap
    python3 scripts/reproduce_heatmap.py --axis-step 0.1 --runs 30 --per-group 25 --duration 2400 --jobs 8

Interrupted sweeps resume from ``grid_runs.csv``. ``--plot-only`` redraws an
existing ``heatmap.csv``.
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from swarmagg.harness import ScenarioConfig
from swarmagg.synthesis import GridSpec, axis_from_step, best_controller, grid_search


def plot(heatmap_csv: Path, png: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with heatmap_csv.open() as fh:
        rows = list(csv.DictReader(fh))
    vl = sorted({float(r["vl2"]) for r in rows})
    vr = sorted({float(r["vr2"]) for r in rows})
    grid = np.full((len(vl), len(vr)), np.nan)
    for r in rows:
        grid[vl.index(float(r["vl2"])), vr.index(float(r["vr2"]))] = float(r["ln_mean_cost"])

    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    step_l = vl[1] - vl[0] if len(vl) > 1 else 1.0
    step_r = vr[1] - vr[0] if len(vr) > 1 else 1.0
    extent = (vr[0] - step_r / 2, vr[-1] + step_r / 2, vl[0] - step_l / 2, vl[-1] + step_l / 2)
    im = ax.imshow(grid, origin="lower", extent=extent, cmap="viridis", aspect="equal")
    ax.plot([-1, 1], [-1, 1], color="white", lw=0.8, ls="--")
    ax.set_xlabel("$v_{r2}$")
    ax.set_ylabel("$v_{l2}$")
    fig.colorbar(im, ax=ax, label="ln mean U")
    fig.tight_layout()
    fig.savefig(png, dpi=150)
    print(f"wrote {png}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("out/heatmap"))
    ap.add_argument("--axis-step", type=float, default=0.5)
    ap.add_argument("--runs", type=int, default=5)
    ap.add_argument("--groups", type=int, default=3)
    ap.add_argument("--per-group", type=int, default=10)
    ap.add_argument("--duration", type=float, default=1200.0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=None)
    ap.add_argument("--plot-only", action="store_true")
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    heat = args.out / "heatmap.csv"
    if not args.plot_only:
        spec = GridSpec(
            axis_values=axis_from_step(args.axis_step),
            runs_per_cell=args.runs,
            scenario=ScenarioConfig(g=args.groups, n_per_group=args.per_group, duration_s=args.duration),
        )
        res = grid_search(spec, args.seed, jobs=args.jobs, results_path=args.out / "grid_runs.csv")
        heat.write_text(res.heatmap_csv())
        print(f"best controller: {best_controller(res.cells)}  ln mean U {res.best.ln_mean_cost:.3f}")
    plot(heat, args.out / "heatmap.png")


if __name__ == "__main__":
    main()
