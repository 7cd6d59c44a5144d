"""Simulation state: arena, robots, bollards and the control-cycle clock.

Robots are stored column-wise in numpy arrays so the compiled kernels can
work on them directly. ``RobotBody``/``Pose``/``Vec2`` are lightweight views
for code that wants one robot at a time.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

ROBOT_RADIUS = 3.7  # cm, e-puck diameter 7.4 cm
BOLLARD_RADIUS = ROBOT_RADIUS
MAX_WHEEL_SPEED = 12.8  # cm/s
PENETRATION_TOLERANCE = 0.01  # cm
DEFAULT_ARENA_SIDE = 450.0

TWO_PI = 2.0 * math.pi


class InvalidGroupError(ValueError):
    pass


class Vec2(NamedTuple):
    x: float
    y: float


class Pose(NamedTuple):
    x: float
    y: float
    theta: float

    @property
    def position(self) -> Vec2:
        return Vec2(self.x, self.y)


@dataclass(frozen=True)
class RobotBody:
    id: int
    group: int
    pose: Pose
    wheel_speeds: tuple[float, float]
    radius: float = ROBOT_RADIUS


@dataclass(frozen=True)
class Bollard:
    group: int
    position: Vec2
    radius: float = BOLLARD_RADIUS


@dataclass(frozen=True)
class ArenaConfig:
    side: float = DEFAULT_ARENA_SIDE

    def __post_init__(self):
        if not (self.side > 0 and math.isfinite(self.side)):
            raise ValueError(f"arena side must be positive, got {self.side}")

    @property
    def center(self) -> Vec2:
        return Vec2(self.side / 2, self.side / 2)


def normalize_angle(theta: float) -> float:
    """Wrap an angle into [-pi, pi)."""
    wrapped = (theta + math.pi) % TWO_PI - math.pi
    # fmod rounding can land exactly on +pi
    if wrapped >= math.pi:
        wrapped -= TWO_PI
    return wrapped


def overlap(center_a, radius_a: float, center_b, radius_b: float) -> float:
    """Signed penetration depth of two circles; positive means they intersect."""
    if radius_a <= 0 or radius_b <= 0:
        raise ValueError("radii must be positive")
    dist = math.hypot(center_a[0] - center_b[0], center_a[1] - center_b[1])
    return (radius_a + radius_b) - dist


@dataclass
class World:
    arena: ArenaConfig
    positions: np.ndarray  # (r, 2) cm
    orientations: np.ndarray  # (r,) rad in [-pi, pi)
    groups: np.ndarray  # (r,) int
    n_groups: int
    wheel_speeds: np.ndarray = None  # (r, 2) cm/s, left/right
    bollard_positions: np.ndarray = None  # (b, 2)
    bollard_groups: np.ndarray = None  # (b,)
    tick: int = 0
    seed: int | None = None
    robot_radius: float = ROBOT_RADIUS
    bollard_radius: float = BOLLARD_RADIUS
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.positions = np.ascontiguousarray(self.positions, dtype=np.float64).reshape(-1, 2)
        n = len(self.positions)
        self.orientations = np.ascontiguousarray(self.orientations, dtype=np.float64).reshape(n)
        self.groups = np.ascontiguousarray(self.groups, dtype=np.int64).reshape(n)
        if self.wheel_speeds is None:
            self.wheel_speeds = np.zeros((n, 2))
        self.wheel_speeds = np.ascontiguousarray(self.wheel_speeds, dtype=np.float64).reshape(n, 2)
        if self.bollard_positions is None:
            self.bollard_positions = np.zeros((0, 2))
        self.bollard_positions = np.ascontiguousarray(self.bollard_positions, dtype=np.float64).reshape(-1, 2)
        if self.bollard_groups is None:
            self.bollard_groups = np.zeros(0, dtype=np.int64)
        self.bollard_groups = np.ascontiguousarray(self.bollard_groups, dtype=np.int64).reshape(-1)
        if len(self.bollard_groups) != len(self.bollard_positions):
            raise ValueError("bollard positions and groups differ in length")
        if n and (self.groups.min() < 0 or self.groups.max() >= self.n_groups):
            raise InvalidGroupError("robot group label outside 0..g-1")
        if not (np.isfinite(self.positions).all() and np.isfinite(self.orientations).all()):
            raise ValueError("non-finite robot state")

    @property
    def n_robots(self) -> int:
        return len(self.positions)

    @property
    def robots(self) -> list[RobotBody]:
        return [self.robot(i) for i in range(self.n_robots)]

    @property
    def bollards(self) -> list[Bollard]:
        return [
            Bollard(int(k), Vec2(float(x), float(y)), self.bollard_radius)
            for k, (x, y) in zip(self.bollard_groups, self.bollard_positions)
        ]

    def robot(self, i: int) -> RobotBody:
        x, y = self.positions[i]
        vl, vr = self.wheel_speeds[i]
        return RobotBody(
            id=i,
            group=int(self.groups[i]),
            pose=Pose(float(x), float(y), float(self.orientations[i])),
            wheel_speeds=(float(vl), float(vr)),
            radius=self.robot_radius,
        )

    def copy(self) -> World:
        return World(
            arena=self.arena,
            positions=self.positions.copy(),
            orientations=self.orientations.copy(),
            groups=self.groups.copy(),
            n_groups=self.n_groups,
            wheel_speeds=self.wheel_speeds.copy(),
            bollard_positions=self.bollard_positions.copy(),
            bollard_groups=self.bollard_groups.copy(),
            tick=self.tick,
            seed=self.seed,
            robot_radius=self.robot_radius,
            bollard_radius=self.bollard_radius,
            meta=dict(self.meta),
        )

    def same_state(self, other: World) -> bool:
        """Bit-exact comparison of everything that evolves during a trial."""
        return (
            self.tick == other.tick
            and np.array_equal(self.positions, other.positions)
            and np.array_equal(self.orientations, other.orientations)
            and np.array_equal(self.wheel_speeds, other.wheel_speeds)
            and np.array_equal(self.groups, other.groups)
            and np.array_equal(self.bollard_positions, other.bollard_positions)
        )


def robots_of_group(world: World, k: int) -> list[int]:
    if not 0 <= k < world.n_groups:
        raise InvalidGroupError(f"group {k} outside 0..{world.n_groups - 1}")
    return [int(i) for i in np.flatnonzero(world.groups == k)]


def max_penetration(world: World) -> float:
    """Largest overlap over all robot-robot and robot-bollard pairs (<= 0 if none touch)."""
    p = world.positions
    worst = -math.inf
    if len(p) >= 2:
        diff = p[:, None, :] - p[None, :, :]
        dist = np.sqrt((diff**2).sum(-1))
        iu = np.triu_indices(len(p), 1)
        worst = max(worst, float((2 * world.robot_radius - dist[iu]).max()))
    if len(p) and len(world.bollard_positions):
        diff = p[:, None, :] - world.bollard_positions[None, :, :]
        dist = np.sqrt((diff**2).sum(-1))
        worst = max(worst, float((world.robot_radius + world.bollard_radius - dist).max()))
    return worst


def inside_arena(world: World) -> bool:
    lo = world.robot_radius
    hi = world.arena.side - world.robot_radius
    p = world.positions
    return bool(((p >= lo) & (p <= hi)).all())


def check_invariants(world: World, tolerance: float = PENETRATION_TOLERANCE) -> None:
    if max_penetration(world) > tolerance:
        raise AssertionError(f"penetration {max_penetration(world):.6f} cm exceeds {tolerance}")
    if not inside_arena(world):
        raise AssertionError("robot centre closer than one radius to a wall")
    th = world.orientations
    if not ((th >= -math.pi) & (th < math.pi)).all():
        raise AssertionError("orientation outside [-pi, pi)")


# -- JSON snapshots -----------------------------------------------------------


def _f6(x: float) -> str:
    return f"{x:.6f}"


def world_to_json(world: World) -> str:
    """Serialize to the fixed-order snapshot document (6 decimal digits)."""
    robots = ",".join(
        '{"id":%d,"group":%d,"x":%s,"y":%s,"theta":%s}'
        % (i, g, _f6(x), _f6(y), _f6(th))
        for i, (g, (x, y), th) in enumerate(zip(world.groups, world.positions, world.orientations))
    )
    bollards = ",".join(
        '{"group":%d,"x":%s,"y":%s}' % (g, _f6(x), _f6(y))
        for g, (x, y) in zip(world.bollard_groups, world.bollard_positions)
    )
    return '{"arena_side":%s,"tick":%d,"robots":[%s],"bollards":[%s]}\n' % (
        _f6(world.arena.side),
        world.tick,
        robots,
        bollards,
    )


def world_from_json(text: str, n_groups: int | None = None) -> World:
    doc = json.loads(text)
    robots = doc.get("robots", [])
    bollards = doc.get("bollards", [])
    groups = [int(r["group"]) for r in robots]
    b_groups = [int(b["group"]) for b in bollards]
    if n_groups is None:
        n_groups = max(groups + b_groups, default=-1) + 1
    ordered = sorted(robots, key=lambda r: int(r.get("id", 0)))
    return World(
        arena=ArenaConfig(float(doc["arena_side"])),
        positions=[(float(r["x"]), float(r["y"])) for r in ordered],
        orientations=[normalize_angle(float(r["theta"])) for r in ordered],
        groups=[int(r["group"]) for r in ordered],
        n_groups=max(n_groups, 1),
        bollard_positions=[(float(b["x"]), float(b["y"])) for b in bollards],
        bollard_groups=b_groups,
        tick=int(doc.get("tick", 0)),
    )
