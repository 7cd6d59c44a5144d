"""Command-line entry point: ``swarmagg {trial,grid-search,validate,render,oracle}``.

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from swarmagg import __version__
from swarmagg.controller import BEST_CONTROLLER, ControllerParams
from swarmagg.harness import (
    MATRIX_GROUPS,
    MATRIX_PER_GROUP,
    ScenarioConfig,
    run_trial,
    run_validation_matrix,
)
from swarmagg.render import render_snapshot
from swarmagg.synthesis import GridSpec, axis_from_step, best_controller, grid_search
from swarmagg.world import world_from_json, world_to_json

SCENARIO_KEYS = {"g", "n_per_group", "arena_side", "bollards_enabled", "duration_s", "seed"}
GRID_KEYS = {"axis_values", "runs_per_cell", "fixed_prefix"}
OTHER_KEYS = {"jobs", "out_dir", "controller", "sample_every", "snapshots", "trials", "groups", "per_group",
              "axis_step", "max_cells"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _positive_float(text):
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return v


def _int_list(text):
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError(f"values must be >= 1, got {text!r}")
    return values


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _controller(text):
    try:
        return ControllerParams.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, help="base seed (default 0)")
    common.add_argument("--jobs", type=_positive_int, help="worker processes (default: all CPUs)")
    common.add_argument("--out-dir", type=Path, help="output directory (default: out/<command>)")
    common.add_argument("--config", type=Path, help="JSON file with config fields; flags override it")

    scenario = _Parser(add_help=False)
    scenario.add_argument("--groups", dest="g", type=_positive_int, help="number of groups g")
    scenario.add_argument("--per-group", dest="n_per_group", type=_positive_int, help="robots per group")
    scenario.add_argument("--arena-side", dest="arena_side", type=_positive_float, help="arena side in cm")
    scenario.add_argument("--duration", dest="duration_s", type=_positive_float, help="trial length in seconds")
    scenario.add_argument(
        "--bollards", dest="bollards_enabled", action=argparse.BooleanOptionalAction, default=None,
        help="place one reference bollard per group",
    )

    parser = _Parser(prog="swarmagg", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("trial", parents=[common, scenario], help="one seeded run")
    p.add_argument("--controller", type=_controller, help="six values, e.g. [-0.7,-1.0,1.0,-1.0,-0.7,-1.0]")
    p.add_argument("--sample-every", dest="sample_every", type=_positive_int, help="write every Nth cycle")
    p.add_argument("--snapshots", type=_float_list, help="comma-separated times (s) to render as SVG")

    p = sub.add_parser("grid-search", parents=[common, scenario], help="sweep (vl2, vr2)")
    p.add_argument("--axis-step", dest="axis_step", type=_positive_float, help="axis spacing (default 0.1)")
    p.add_argument("--runs", dest="runs_per_cell", type=_positive_int, help="runs per cell (default 30)")
    p.add_argument("--max-cells", dest="max_cells", type=_positive_int, help="stop after this many new cells")

    p = sub.add_parser("validate", parents=[common, scenario], help="g x r/g x bollards matrix")
    p.add_argument("--trials", type=_positive_int, help="trials per configuration (default 10)")
    p.add_argument("--group-counts", dest="groups", type=_int_list, help="default 3,5")
    p.add_argument("--per-group-counts", dest="per_group", type=_int_list, help="default 10,15,20,25,30")
    p.add_argument("--controller", type=_controller)

    p = sub.add_parser("render", parents=[common], help="world JSON -> SVG")
    p.add_argument("world", type=Path)
    p.add_argument("--output", type=Path, help="SVG path (default <out-dir>/<world stem>.svg)")

    p = sub.add_parser("oracle", parents=[common], help="cross-check metrics on a world JSON")
    p.add_argument("world", type=Path)
    return parser


def _merged(args) -> dict:
    """Config-file values overlaid by explicitly given flags."""
    values = {}
    if getattr(args, "config", None) is not None:
        try:
            doc = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"--config: cannot read {args.config}: {exc}")
        unknown = set(doc) - SCENARIO_KEYS - GRID_KEYS - OTHER_KEYS
        if unknown:
            raise UsageError(f"--config: unknown field(s) {sorted(unknown)}")
        values.update(doc)
    for key, v in vars(args).items():
        if v is not None and key not in ("config", "command"):
            values[key] = v
    return values


def _scenario(values: dict, **defaults) -> ScenarioConfig:
    fields = {**defaults, **{k: values[k] for k in SCENARIO_KEYS if k in values}}
    try:
        return ScenarioConfig(**fields)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid scenario: {exc}")


def _as_controller(v) -> ControllerParams:
    if v is None:
        return BEST_CONTROLLER
    if isinstance(v, ControllerParams):
        return v
    try:
        return ControllerParams.from_sequence(v) if isinstance(v, list) else ControllerParams.parse(str(v))
    except ValueError as exc:
        raise UsageError(f"--controller: {exc}")


@dataclass
class RunManifest:
    command: str
    argv: list
    config: dict
    seeds: list
    artifacts: list = field(default_factory=list)
    version: str = __version__
    started: str = ""
    finished: str = ""

    def write(self, out_dir: Path) -> Path:
        path = out_dir / "manifest.json"
        path.write_text(json.dumps(asdict(self), indent=2, default=_jsonable) + "\n")
        return path


def _jsonable(obj):
    if isinstance(obj, ControllerParams):
        return list(obj.as_tuple())
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(type(obj))


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class _Writer:
    """Single owner of everything a command writes into its output directory."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.artifacts: list[str] = []
        out_dir.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        p = self.out_dir / name
        p.parent.mkdir(parents=True, exist_ok=True)
        if name not in self.artifacts:
            self.artifacts.append(name)
        return p

    def text(self, name: str, content: str) -> Path:
        p = self.path(name)
        p.write_text(content)
        return p


def cmd_trial(values: dict, writer: _Writer, manifest: RunManifest) -> None:
    cfg = _scenario(values, seed=values.get("seed", 0))
    controller = _as_controller(values.get("controller"))
    sample_every = int(values.get("sample_every", 1))
    snapshots = values.get("snapshots") or []

    def snap(seconds, world):
        render_snapshot(world, writer.path(f"snapshots/t{int(round(seconds)):05d}s.svg"), title=f"{seconds:g} s")

    result = run_trial(cfg, controller, snapshot_at_s=snapshots, on_snapshot=snap, keep_world=True)
    writer.text("metrics.csv", result.metrics_csv(sample_every))
    writer.text("final_world.json", world_to_json(result.final_world))
    manifest.config = {**asdict(cfg), "controller": list(controller.as_tuple()), "sample_every": sample_every,
                       "snapshots": snapshots}
    manifest.seeds = [cfg.seed]
    last = len(result.d) - 1
    print(f"U = {result.cost!r}  final d = {result.d[last]:.3f} cm  u = {result.u[last]:.3f}  "
          f"pc = {result.pc[last]:.4f}  ({result.runtime_s:.1f} s)")


def cmd_grid_search(values: dict, writer: _Writer, manifest: RunManifest) -> None:
    scenario = _scenario(values)
    if "axis_values" in values:
        axis = tuple(float(v) for v in values["axis_values"])
    else:
        try:
            axis = axis_from_step(float(values.get("axis_step", 0.1)))
        except ValueError as exc:
            raise UsageError(f"--axis-step: {exc}")
    try:
        spec = GridSpec(
            fixed_prefix=tuple(values.get("fixed_prefix", (-0.7, -1.0, 1.0, -1.0))),
            axis_values=axis,
            runs_per_cell=int(values.get("runs_per_cell", 30)),
            scenario=scenario,
        )
    except ValueError as exc:
        raise UsageError(f"invalid grid: {exc}")
    base_seed = int(values.get("seed", 0))
    result = grid_search(
        spec, base_seed, jobs=values.get("jobs"), results_path=writer.path("grid_runs.csv"),
        max_cells=values.get("max_cells"),
    )
    writer.text("heatmap.csv", result.heatmap_csv())
    manifest.config = {
        **asdict(scenario), "seed": base_seed, "fixed_prefix": list(spec.fixed_prefix),
        "axis_values": list(spec.axis_values), "runs_per_cell": spec.runs_per_cell,
    }
    manifest.seeds = [base_seed + j for j in range(spec.runs_per_cell)]
    total = len(spec.cell_keys())
    print(f"{len(result.cells)}/{total} cells done")
    if result.cells:
        print(f"best so far: {best_controller(result.cells, spec.fixed_prefix)}  "
              f"ln mean U = {result.best.ln_mean_cost:.4f}")


def cmd_validate(values: dict, writer: _Writer, manifest: RunManifest) -> None:
    base_seed = int(values.get("seed", 0))
    trials = int(values.get("trials", 10))
    groups = tuple(values.get("groups", MATRIX_GROUPS))
    per_group = tuple(values.get("per_group", MATRIX_PER_GROUP))
    duration = float(values.get("duration_s", 2400.0))
    side = float(values.get("arena_side", 450.0))
    if "bollards_enabled" in values:
        bollards = (bool(values["bollards_enabled"]),)
    else:
        bollards = (True, False)
    controller = _as_controller(values.get("controller"))
    report = run_validation_matrix(
        base_seed, trials, controller, jobs=values.get("jobs"), groups=groups, per_group=per_group,
        bollards=bollards, duration_s=duration, arena_side=side,
    )
    writer.text("validation_rows.csv", report.rows_csv())
    writer.text("validation_summary.csv", report.summary_csv())
    manifest.config = {
        "seed": base_seed, "trials": trials, "groups": list(groups), "per_group": list(per_group),
        "duration_s": duration, "arena_side": side, "controller": list(controller.as_tuple()),
    }
    if len(bollards) == 1:
        manifest.config["bollards_enabled"] = bollards[0]
    manifest.seeds = [base_seed + t for t in range(trials)]
    for c in report.configs:
        last = report.checkpoints[-1]
        print(f"g={c.g} r/g={c.n_per_group} bollards={'on' if c.bollards else 'off'}: "
              f"pc@{last:g}s mean {c.stats[last]['pc'][0]:.4f}  steady {c.steady_time_s:g} s")


def _load_world(path: Path):
    try:
        return world_from_json(path.read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}")
    except (ValueError, KeyError) as exc:
        raise RuntimeError(f"{path}: not a world snapshot ({exc})")


def cmd_render(values: dict, writer: _Writer, manifest: RunManifest) -> None:
    world = _load_world(values["world"])
    out = values.get("output")
    if out is None:
        out = writer.path(values["world"].stem + ".svg")
    render_snapshot(world, out)
    manifest.config = {"world": str(values["world"]), "output": str(out)}
    print(out)


def cmd_oracle(values: dict, writer: _Writer, manifest: RunManifest) -> None:
    from swarmagg import metrics, oracles

    world = _load_world(values["world"])
    r_o = world.robot_radius
    checks = [
        ("d_cm", metrics.group_dispersion(world),
         oracles.dispersion_bruteforce(world.positions, world.groups, world.n_groups), 0.0),
        ("u", metrics.second_moment(world),
         oracles.second_moment_exact(world.positions, world.groups, world.n_groups, r_o), 1e-9),
        ("lc", list(metrics.clustered_proportion(world).lc),
         oracles.largest_components_bfs(world.positions, world.groups, world.n_groups, 4 * r_o), 0.0),
    ]
    lines = ["metric,implementation,oracle,match"]
    ok = True
    for name, impl, ref, rel in checks:
        if isinstance(impl, list):
            match = impl == ref
        else:
            match = math.isclose(impl, ref, rel_tol=rel, abs_tol=0.0) if rel else impl == ref
        ok &= match
        fmt = (lambda v: " ".join(map(str, v))) if isinstance(impl, list) else repr
        lines.append(f"{name},{fmt(impl)},{fmt(ref)},{int(match)}")
    text = "\n".join(lines) + "\n"
    writer.text("oracle.csv", text)
    manifest.config = {"world": str(values["world"])}
    sys.stdout.write(text)
    if not ok:
        raise RuntimeError("implementation and oracle disagree")


COMMANDS = {
    "trial": cmd_trial,
    "grid-search": cmd_grid_search,
    "validate": cmd_validate,
    "render": cmd_render,
    "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        values = _merged(args)
        out_dir = Path(values.get("out_dir") or Path("out") / args.command)
        writer = _Writer(out_dir)
        manifest = RunManifest(command=args.command, argv=argv, config={}, seeds=[], started=_now())
        t0 = time.perf_counter()
        COMMANDS[args.command](values, writer, manifest)
    except UsageError as exc:
        print(str(exc).rstrip(), file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - any runtime failure maps to exit 2
        print(f"swarmagg {argv[0] if argv else ''}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    manifest.finished = _now()
    manifest.artifacts = sorted(writer.artifacts)
    manifest.write(out_dir)
    print(f"wrote {out_dir} in {time.perf_counter() - t0:.1f} s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
