"""Seeded scenarios, single trials, and the g x (r/g) x bollards validation matrix."""

from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from numba import njit

from swarmagg.controller import ControllerParams
from swarmagg.metrics import InvalidScenarioError, cost_of_series, measure
from swarmagg.physics import StepConfig, _step_cycle
from swarmagg.rng import SplitMix64
from swarmagg.world import (
    BOLLARD_RADIUS,
    DEFAULT_ARENA_SIDE,
    ROBOT_RADIUS,
    ArenaConfig,
    World,
    normalize_angle,
)

PLACEMENT_MARGIN = 0.1  # cm of clearance between initial bodies
MAX_PLACEMENT_ATTEMPTS = 100_000
BOLLARD_CIRCLE_FRACTION = 0.4

CHECKPOINTS_S = (300, 600, 900, 1200, 1800, 2400)
MATRIX_GROUPS = (3, 5)
MATRIX_PER_GROUP = (10, 15, 20, 25, 30)
STEADY_PC = 0.95


class PlacementError(RuntimeError):
    pass


@dataclass(frozen=True)
class ScenarioConfig:
    g: int = 3
    n_per_group: int = 25
    arena_side: float = DEFAULT_ARENA_SIDE
    bollards_enabled: bool = True
    duration_s: float = 2400.0
    seed: int = 0

    def __post_init__(self):
        if self.g < 1:
            raise ValueError("g must be >= 1")
        if self.n_per_group < 1:
            raise ValueError("n_per_group must be >= 1")
        if not self.duration_s > 0:
            raise ValueError("duration_s must be positive")
        if not self.arena_side > 0:
            raise ValueError("arena_side must be positive")

    @property
    def n_robots(self) -> int:
        return self.g * self.n_per_group

    def n_cycles(self, step: StepConfig = StepConfig()) -> int:
        return int(round(self.duration_s / step.control_dt))

    def replace(self, **changes) -> ScenarioConfig:
        return ScenarioConfig(**{**asdict(self), **changes})


def bollard_positions(g: int, side: float) -> np.ndarray:
    c = side / 2
    radius = BOLLARD_CIRCLE_FRACTION * side
    angles = [2 * math.pi * k / g for k in range(g)]
    return np.array([(c + radius * math.cos(a), c + radius * math.sin(a)) for a in angles])


def generate_scenario(cfg: ScenarioConfig) -> World:
    r_o = ROBOT_RADIUS
    side = cfg.arena_side
    if cfg.n_robots * (2 * r_o) ** 2 >= 0.5 * side**2:
        raise InvalidScenarioError(f"{cfg.n_robots} robots do not fit a {side} cm arena")

    if cfg.bollards_enabled:
        b_pos = bollard_positions(cfg.g, side)
        b_groups = np.arange(cfg.g)
    else:
        b_pos = np.zeros((0, 2))
        b_groups = np.zeros(0, dtype=np.int64)

    rng = SplitMix64(cfg.seed)
    placed: list[tuple[float, float]] = []
    thetas: list[float] = []
    robot_gap = 2 * r_o + PLACEMENT_MARGIN
    bollard_gap = r_o + BOLLARD_RADIUS + PLACEMENT_MARGIN
    for rid in range(cfg.n_robots):
        for _ in range(MAX_PLACEMENT_ATTEMPTS):
            x = rng.uniform(r_o, side - r_o)
            y = rng.uniform(r_o, side - r_o)
            if all(math.hypot(x - px, y - py) >= robot_gap for px, py in placed) and all(
                math.hypot(x - bx, y - by) >= bollard_gap for bx, by in b_pos
            ):
                break
        else:
            raise PlacementError(f"could not place robot {rid} after {MAX_PLACEMENT_ATTEMPTS} attempts")
        placed.append((x, y))
        thetas.append(normalize_angle(rng.uniform(-math.pi, math.pi)))

    return World(
        arena=ArenaConfig(side),
        positions=np.array(placed).reshape(-1, 2),
        orientations=thetas,
        groups=np.repeat(np.arange(cfg.g), cfg.n_per_group),
        n_groups=cfg.g,
        bollard_positions=b_pos,
        bollard_groups=b_groups,
        seed=cfg.seed,
    )


@njit(cache=True)
def _simulate(
    positions,
    orientations,
    groups,
    n_groups,
    wheel_speeds,
    bollard_positions,
    bollard_groups,
    table,
    max_speed,
    axle,
    substep_dt,
    substeps,
    iterations,
    slop,
    side,
    robot_radius,
    bollard_radius,
    d_out,
    u_out,
    lc_out,
):
    readings = np.zeros(positions.shape[0], dtype=np.int64)
    for c in range(d_out.shape[0]):
        _step_cycle(
            positions,
            orientations,
            groups,
            wheel_speeds,
            bollard_positions,
            bollard_groups,
            table,
            readings,
            max_speed,
            axle,
            substep_dt,
            substeps,
            iterations,
            slop,
            side,
            robot_radius,
            bollard_radius,
        )
        d, u, _ = measure(positions, groups, n_groups, robot_radius, lc_out[c])
        d_out[c] = d
        u_out[c] = u


def advance(world: World, controller: ControllerParams, n_cycles: int, step: StepConfig = StepConfig()):
    """Run ``n_cycles`` control cycles in place and return (d, u, lc) per cycle."""
    d = np.zeros(n_cycles)
    u = np.zeros(n_cycles)
    lc = np.zeros((n_cycles, world.n_groups), dtype=np.int64)
    if n_cycles:
        _simulate(
            world.positions,
            world.orientations,
            world.groups,
            world.n_groups,
            world.wheel_speeds,
            world.bollard_positions,
            world.bollard_groups,
            controller.as_table(),
            step.max_speed,
            step.axle_length,
            step.substep_dt,
            step.substeps_per_cycle,
            step.collision_iterations,
            step.contact_slop,
            world.arena.side,
            world.robot_radius,
            world.bollard_radius,
            d,
            u,
            lc,
        )
        world.tick += n_cycles
    return d, u, lc


@dataclass
class TrialResult:
    config: ScenarioConfig
    controller: ControllerParams
    cost: float
    d: np.ndarray
    u: np.ndarray
    lc: np.ndarray  # (cycles, g)
    runtime_s: float
    control_dt: float = 0.1
    final_world: World | None = field(default=None, repr=False)

    @property
    def ticks(self) -> np.ndarray:
        return np.arange(1, len(self.d) + 1)

    @property
    def pc(self) -> np.ndarray:
        return self.lc.sum(axis=1) / self.config.n_robots

    @property
    def cumulative_u(self) -> np.ndarray:
        return np.cumsum(self.u)

    def index_at(self, seconds: float) -> int:
        """Series index of the sample taken when the clock reads ``seconds``."""
        idx = int(round(seconds / self.control_dt)) - 1
        if not 0 <= idx < len(self.d):
            raise IndexError(f"{seconds} s outside trial of {len(self.d)} cycles")
        return idx

    def at(self, seconds: float) -> dict:
        i = self.index_at(seconds)
        return {"pc": float(self.pc[i]), "u": float(self.u[i]), "d": float(self.d[i])}

    def samples(self):
        from swarmagg.metrics import MetricSample

        sizes = self.config.n_per_group
        return [
            MetricSample(
                int(t), float(d), float(u), float(lc.sum() / self.config.n_robots),
                tuple(int(v) for v in lc), tuple(float(v / sizes) for v in lc),
            )
            for t, d, u, lc in zip(self.ticks, self.d, self.u, self.lc)
        ]

    def metrics_csv(self, sample_every: int = 1) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        g = self.lc.shape[1]
        w.writerow(["tick", "time_s", "d_cm", "u", "pc"] + [f"lc_{k + 1}" for k in range(g)])
        pc = self.pc
        for i in range(sample_every - 1, len(self.d), sample_every):
            tick = i + 1
            w.writerow(
                [tick, f"{tick * self.control_dt:.1f}", repr(float(self.d[i])), repr(float(self.u[i])),
                 repr(float(pc[i]))] + [int(v) for v in self.lc[i]]
            )
        return buf.getvalue()


def run_trial(
    cfg: ScenarioConfig,
    controller: ControllerParams,
    step: StepConfig = StepConfig(),
    snapshot_at_s=(),
    on_snapshot=None,
    keep_world: bool = False,
) -> TrialResult:
    """Generate the scenario, simulate ``duration_s`` and score it.

    ``on_snapshot(seconds, world)`` is called for each time in ``snapshot_at_s``
    (0 means the initial configuration) without perturbing the run.
    """
    start = time.perf_counter()
    world = generate_scenario(cfg)
    n = cfg.n_cycles(step)
    stops = sorted({int(round(s / step.control_dt)) for s in snapshot_at_s if 0 <= s * 1.0 <= n * step.control_dt})
    d_parts, u_parts, lc_parts = [], [], []
    done = 0
    for stop in sorted(set(stops) | {n}):
        if stop > done:
            d, u, lc = advance(world, controller, stop - done, step)
            d_parts.append(d)
            u_parts.append(u)
            lc_parts.append(lc)
            done = stop
        if on_snapshot is not None and stop in stops:
            on_snapshot(round(stop * step.control_dt, 9), world)
    d = np.concatenate(d_parts) if d_parts else np.zeros(0)
    u = np.concatenate(u_parts) if u_parts else np.zeros(0)
    lc = np.concatenate(lc_parts) if lc_parts else np.zeros((0, cfg.g), dtype=np.int64)
    return TrialResult(
        config=cfg,
        controller=controller,
        cost=cost_of_series(d),
        d=d,
        u=u,
        lc=lc,
        runtime_s=time.perf_counter() - start,
        control_dt=step.control_dt,
        final_world=world if keep_world else None,
    )


# -- validation matrix ---------------------------------------------------------


@dataclass(frozen=True)
class CheckpointRow:
    g: int
    n_per_group: int
    bollards: bool
    seed: int
    checkpoint_s: float
    pc: float
    u: float
    d_cm: float


@dataclass
class ConfigSummary:
    g: int
    n_per_group: int
    bollards: bool
    # checkpoint -> {"pc": (mean, min, max), "u": (mean, min, max)}
    stats: dict
    steady_time_s: float  # mean first checkpoint with pc >= 0.95 (inf if some trial never gets there)


@dataclass
class ValidationReport:
    rows: list[CheckpointRow]
    configs: list[ConfigSummary]
    checkpoints: tuple

    def rows_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["g", "n_per_group", "bollards", "seed", "checkpoint_s", "pc", "u", "d_cm"])
        for r in self.rows:
            w.writerow([r.g, r.n_per_group, int(r.bollards), r.seed, _fmt_s(r.checkpoint_s),
                        repr(r.pc), repr(r.u), repr(r.d_cm)])
        return buf.getvalue()

    def summary_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["g", "n_per_group", "bollards", "checkpoint_s", "pc_mean", "pc_min", "pc_max",
                    "u_mean", "u_min", "u_max", "steady_time_s"])
        for c in self.configs:
            for cp in self.checkpoints:
                pc, u = c.stats[cp]["pc"], c.stats[cp]["u"]
                w.writerow([c.g, c.n_per_group, int(c.bollards), _fmt_s(cp), *map(repr, pc), *map(repr, u),
                            repr(c.steady_time_s)])
        return buf.getvalue()


def _fmt_s(seconds: float) -> str:
    return f"{seconds:g}"


def _trial_job(args):
    cfg, controller, step, checkpoints = args
    result = run_trial(cfg, controller, step)
    return cfg, [(cp, result.at(cp)) for cp in checkpoints]


def map_jobs(fn, jobs, n_workers: int | None):
    """Ordered map over ``jobs``; ``n_workers`` of 1 (or a single job) stays in-process."""
    jobs = list(jobs)
    n_workers = n_workers or os.cpu_count() or 1
    if n_workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(fn, jobs))


def matrix_configs(
    base_seed: int,
    trials_per_config: int,
    groups=MATRIX_GROUPS,
    per_group=MATRIX_PER_GROUP,
    bollards=(True, False),
    duration_s: float = 2400.0,
    arena_side: float = DEFAULT_ARENA_SIDE,
) -> list[ScenarioConfig]:
    if trials_per_config < 1:
        raise ValueError("trials_per_config must be >= 1")
    return [
        ScenarioConfig(g, n, arena_side, b, duration_s, base_seed + t)
        for g in groups
        for n in per_group
        for b in bollards
        for t in range(trials_per_config)
    ]


def run_validation_matrix(
    base_seed: int,
    trials_per_config: int,
    controller: ControllerParams | None = None,
    jobs: int | None = 1,
    checkpoints=CHECKPOINTS_S,
    step: StepConfig = StepConfig(),
    **matrix_kwargs,
) -> ValidationReport:
    from swarmagg.controller import BEST_CONTROLLER

    controller = controller or BEST_CONTROLLER
    configs = matrix_configs(base_seed, trials_per_config, **matrix_kwargs)
    duration = configs[0].duration_s
    checkpoints = tuple(cp for cp in checkpoints if cp <= duration + 1e-9)
    results = map_jobs(_trial_job, [(c, controller, step, checkpoints) for c in configs], jobs)

    rows = []
    for cfg, values in results:
        for cp, v in values:
            rows.append(CheckpointRow(cfg.g, cfg.n_per_group, cfg.bollards_enabled, cfg.seed, cp,
                                      v["pc"], v["u"], v["d"]))
    rows.sort(key=lambda r: (r.g, r.n_per_group, not r.bollards, r.seed, r.checkpoint_s))

    summaries = []
    keys = sorted({(r.g, r.n_per_group, r.bollards) for r in rows}, key=lambda k: (k[0], k[1], not k[2]))
    for key in keys:
        mine = [r for r in rows if (r.g, r.n_per_group, r.bollards) == key]
        stats = {}
        for cp in checkpoints:
            at = [r for r in mine if r.checkpoint_s == cp]
            pcs = [r.pc for r in at]
            us = [r.u for r in at]
            stats[cp] = {
                "pc": (math.fsum(pcs) / len(pcs), min(pcs), max(pcs)),
                "u": (math.fsum(us) / len(us), min(us), max(us)),
            }
        steady = []
        for seed in sorted({r.seed for r in mine}):
            hits = [r.checkpoint_s for r in mine if r.seed == seed and r.pc >= STEADY_PC]
            steady.append(min(hits) if hits else math.inf)
        summaries.append(ConfigSummary(*key, stats=stats, steady_time_s=math.fsum(steady) / len(steady)))
    return ValidationReport(rows, summaries, checkpoints)
