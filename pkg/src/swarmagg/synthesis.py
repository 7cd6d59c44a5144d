"""Grid search over the other-group wheel pair (vl2, vr2).

The first four controller values stay fixed. Every cell runs ``runs_per_cell``
trials and run ``j`` of every cell uses seed ``base_seed + j``, so all cells
are scored on the same initial worlds.

Progress is persisted as an append-only per-run CSV (``vl2,vr2,seed,U``),
one whole cell at a time and in cell order, so an interrupted sweep picks up
where it stopped and finishes with byte-identical files.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from swarmagg.controller import ControllerParams
from swarmagg.harness import ScenarioConfig, run_trial
from swarmagg.physics import StepConfig

DEFAULT_PREFIX = (-0.7, -1.0, 1.0, -1.0)
DETAIL_HEADER = "vl2,vr2,seed,U\n"


class NoDataError(ValueError):
    pass


class ResumeMismatchError(RuntimeError):
    pass


def axis_from_step(step: float) -> tuple[float, ...]:
    """Values -1, -1 + step, ..., 1; ``step`` must divide 2."""
    count = round(2.0 / step)
    if count < 1 or not math.isclose(count * step, 2.0, rel_tol=0, abs_tol=1e-9):
        raise ValueError(f"axis step {step} does not divide [-1, 1]")
    return tuple(round(-1.0 + i * step, 10) + 0.0 for i in range(count + 1))


DEFAULT_AXIS = axis_from_step(0.1)


@dataclass(frozen=True)
class GridSpec:
    fixed_prefix: tuple[float, float, float, float] = DEFAULT_PREFIX
    axis_values: tuple[float, ...] = DEFAULT_AXIS
    runs_per_cell: int = 30
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)

    def __post_init__(self):
        axis = tuple(self.axis_values)
        if not axis:
            raise ValueError("empty axis")
        if any(b <= a for a, b in zip(axis, axis[1:])):
            raise ValueError("axis values must be strictly increasing")
        if axis[0] < -1.0 or axis[-1] > 1.0:
            raise ValueError("axis values must lie in [-1, 1]")
        if self.runs_per_cell < 1:
            raise ValueError("runs_per_cell must be >= 1")
        if len(self.fixed_prefix) != 4:
            raise ValueError("fixed_prefix needs 4 values")

    def cell_keys(self) -> list[tuple[float, float]]:
        return [(a, b) for a in self.axis_values for b in self.axis_values]

    def controller(self, vl2: float, vr2: float) -> ControllerParams:
        return ControllerParams(*self.fixed_prefix, vl2, vr2)

    @property
    def n_trials(self) -> int:
        return len(self.axis_values) ** 2 * self.runs_per_cell


@dataclass(frozen=True)
class HeatmapCell:
    vl2: float
    vr2: float
    costs: tuple[float, ...]

    @property
    def n_runs(self) -> int:
        return len(self.costs)

    @property
    def mean_cost(self) -> float:
        return math.fsum(self.costs) / len(self.costs)

    @property
    def ln_mean_cost(self) -> float:
        m = self.mean_cost
        return math.log(m) if m > 0 else -math.inf


@dataclass
class GridResult:
    spec: GridSpec
    cells: list[HeatmapCell]
    complete: bool

    @property
    def best(self) -> HeatmapCell:
        return best_cell(self.cells)

    def heatmap_csv(self) -> str:
        return heatmap_csv(self.cells)


def best_cell(cells) -> HeatmapCell:
    cells = list(cells)
    if not cells:
        raise NoDataError("no grid cells")
    return min(cells, key=lambda c: (c.mean_cost, c.vl2, c.vr2))


def best_controller(cells, fixed_prefix=DEFAULT_PREFIX) -> ControllerParams:
    best = best_cell(cells)
    return ControllerParams(*fixed_prefix, best.vl2, best.vr2)


def _num(v: float) -> str:
    return repr(float(v))


def heatmap_csv(cells) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["vl2", "vr2", "mean_cost", "ln_mean_cost", "n_runs"])
    for c in cells:
        w.writerow([_num(c.vl2), _num(c.vr2), _num(c.mean_cost), _num(c.ln_mean_cost), c.n_runs])
    return buf.getvalue()


def _cell_rows(cell: HeatmapCell, base_seed: int) -> str:
    return "".join(
        f"{_num(cell.vl2)},{_num(cell.vr2)},{base_seed + j},{_num(u)}\n" for j, u in enumerate(cell.costs)
    )


def _load_progress(path: Path, spec: GridSpec, base_seed: int) -> list[HeatmapCell]:
    """Complete cells already on disk; the file is trimmed to exactly those."""
    text = path.read_text()
    if not text.startswith(DETAIL_HEADER):
        raise ResumeMismatchError(f"{path} is not a grid detail file")
    lines = text[len(DETAIL_HEADER):].split("\n")
    # drop a torn final line (no newline yet)
    lines = [ln for ln in lines[:-1] if ln]
    keys = spec.cell_keys()
    n = spec.runs_per_cell
    cells = []
    for idx in range(len(lines) // n):
        if idx >= len(keys):
            raise ResumeMismatchError("detail file has more cells than the grid")
        vl2, vr2 = keys[idx]
        costs = []
        for j, line in enumerate(lines[idx * n:(idx + 1) * n]):
            a, b, seed, u = line.split(",")
            if (a, b, int(seed)) != (_num(vl2), _num(vr2), base_seed + j):
                raise ResumeMismatchError(f"unexpected row {line!r} for cell {keys[idx]} run {j}")
            costs.append(float(u))
        cells.append(HeatmapCell(vl2, vr2, tuple(costs)))
    kept = DETAIL_HEADER + "".join(_cell_rows(c, base_seed) for c in cells)
    if kept != text:
        path.write_text(kept)
    return cells


def _cost_job(args) -> float:
    scenario, controller, step = args
    return run_trial(scenario, controller, step).cost


def _trial_stream(jobs_list, n_workers):
    if n_workers <= 1 or len(jobs_list) <= 1:
        for job in jobs_list:
            yield _cost_job(job)
        return
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        yield from pool.map(_cost_job, jobs_list, chunksize=1)


def grid_search(
    spec: GridSpec,
    base_seed: int = 0,
    jobs: int | None = 1,
    results_path: str | os.PathLike | None = None,
    step: StepConfig = StepConfig(),
    max_cells: int | None = None,
    cells_subset=None,
) -> GridResult:
    """Run (or resume) the sweep.

    ``max_cells`` bounds how many new cells this call computes, which is how a
    long sweep is split across sessions. ``cells_subset`` restricts the sweep to
    the given (vl2, vr2) keys and is never persisted.
    """
    keys = spec.cell_keys()
    done: list[HeatmapCell] = []
    path = Path(results_path) if results_path is not None else None
    if cells_subset is not None:
        wanted = {(float(a), float(b)) for a, b in cells_subset}
        keys = [k for k in keys if k in wanted]
        path = None
    elif path is not None:
        if path.exists():
            done = _load_progress(path, spec, base_seed)
        else:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(DETAIL_HEADER)

    todo = keys[len(done):]
    if max_cells is not None:
        todo = todo[:max_cells]
    n = spec.runs_per_cell
    job_list = [
        (spec.scenario.replace(seed=base_seed + j), spec.controller(vl2, vr2), step)
        for vl2, vr2 in todo
        for j in range(n)
    ]
    n_workers = jobs or os.cpu_count() or 1

    cells = list(done)
    stream = _trial_stream(job_list, n_workers)
    out = path.open("a") if path is not None else None
    try:
        for vl2, vr2 in todo:
            cell = HeatmapCell(vl2, vr2, tuple(next(stream) for _ in range(n)))
            cells.append(cell)
            if out is not None:
                out.write(_cell_rows(cell, base_seed))
                out.flush()
    finally:
        if out is not None:
            out.close()
    return GridResult(spec, cells, complete=len(cells) == len(keys))


def load_detail(path, spec: GridSpec, base_seed: int = 0) -> GridResult:
    cells = _load_progress(Path(path), spec, base_seed)
    return GridResult(spec, cells, complete=len(cells) == len(spec.cell_keys()))
