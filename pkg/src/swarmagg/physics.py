"""Differential-drive kinematics and positional collision resolution.

One control cycle = sense once, then ``substeps_per_cycle`` rounds of
{integrate every robot, resolve contacts}. Everything in the hot path is a
numba kernel operating in place on the World arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from swarmagg.sensing import sense_all
from swarmagg.world import MAX_WHEEL_SPEED, Pose, World

E_PUCK_AXLE = 5.3  # cm


class NumericError(ArithmeticError):
    pass


@dataclass(frozen=True)
class StepConfig:
    control_dt: float = 0.1
    substeps_per_cycle: int = 10
    axle_length: float = E_PUCK_AXLE
    max_speed: float = MAX_WHEEL_SPEED
    collision_iterations: int = 64
    contact_slop: float = 1e-3  # cm

    def __post_init__(self):
        if not self.control_dt > 0:
            raise ValueError("control_dt must be positive")
        if self.substeps_per_cycle < 1:
            raise ValueError("substeps_per_cycle must be >= 1")
        if not self.max_speed > 0:
            raise ValueError("max_speed must be positive")
        if not self.axle_length > 0:
            raise ValueError("axle_length must be positive")
        if self.collision_iterations < 0:
            raise ValueError("collision_iterations must be >= 0")
        if not 0 <= self.contact_slop < 0.01:
            raise ValueError("contact_slop must be in [0, 0.01) cm")

    @property
    def substep_dt(self) -> float:
        return self.control_dt / self.substeps_per_cycle


@njit(cache=True)
def _wrap(theta):
    w = (theta + math.pi) % (2.0 * math.pi) - math.pi
    if w >= math.pi:
        w -= 2.0 * math.pi
    return w


@njit(cache=True)
def _integrate(x, y, theta, vl, vr, axle, dt):
    # Exact arc: the chord has length v*dt*sinc(dtheta/2) and points along the
    # mid-arc heading. Same result as rotating about the ICC, but without the
    # cancellation when vr ~ vl.
    v = 0.5 * (vl + vr)
    dtheta = (vr - vl) * dt / axle
    half = 0.5 * dtheta
    if half == 0.0:
        chord = v * dt
    else:
        chord = v * dt * math.sin(half) / half
    heading = theta + half
    return x + chord * math.cos(heading), y + chord * math.sin(heading), _wrap(theta + dtheta)


@njit(cache=True)
def _integrate_all(positions, orientations, wheel_speeds, axle, dt):
    for i in range(positions.shape[0]):
        x, y, th = _integrate(
            positions[i, 0], positions[i, 1], orientations[i], wheel_speeds[i, 0], wheel_speeds[i, 1], axle, dt
        )
        positions[i, 0] = x
        positions[i, 1] = y
        orientations[i] = th


@njit(cache=True)
def _resolve(positions, bollard_positions, robot_radius, bollard_radius, side, iterations, slop):
    n = positions.shape[0]
    nb = bollard_positions.shape[0]
    contact = 2.0 * robot_radius
    contact_b = robot_radius + bollard_radius
    # overlaps at or below ``slop`` are left alone so settled piles stop iterating
    reach = contact - slop
    reach_b = contact_b - slop
    lo = robot_radius
    hi = side - robot_radius
    for _ in range(iterations):
        moved = False
        for i in range(n):
            for j in range(i + 1, n):
                dx = positions[j, 0] - positions[i, 0]
                dy = positions[j, 1] - positions[i, 1]
                d2 = dx * dx + dy * dy
                if d2 >= reach * reach:
                    continue
                d = math.sqrt(d2)
                half = 0.5 * (contact - d)
                if d > 0.0:
                    nx = dx / d
                    ny = dy / d
                else:
                    nx = 1.0
                    ny = 0.0
                positions[i, 0] -= nx * half
                positions[i, 1] -= ny * half
                positions[j, 0] += nx * half
                positions[j, 1] += ny * half
                moved = True
        for i in range(n):
            for k in range(nb):
                dx = positions[i, 0] - bollard_positions[k, 0]
                dy = positions[i, 1] - bollard_positions[k, 1]
                d2 = dx * dx + dy * dy
                if d2 >= reach_b * reach_b:
                    continue
                d = math.sqrt(d2)
                push = contact_b - d
                if d > 0.0:
                    nx = dx / d
                    ny = dy / d
                else:
                    nx = 1.0
                    ny = 0.0
                positions[i, 0] += nx * push
                positions[i, 1] += ny * push
                moved = True
        for i in range(n):
            for a in range(2):
                v = positions[i, a]
                if v < lo:
                    positions[i, a] = lo
                    moved = True
                elif v > hi:
                    positions[i, a] = hi
                    moved = True
        # a pass that changed nothing means every later pass is a no-op too
        if not moved:
            break


@njit(cache=True)
def _step_cycle(
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
):
    sense_all(positions, orientations, groups, bollard_positions, bollard_groups, robot_radius, bollard_radius, readings)
    for i in range(positions.shape[0]):
        wheel_speeds[i, 0] = table[readings[i], 0] * max_speed
        wheel_speeds[i, 1] = table[readings[i], 1] * max_speed
    for _ in range(substeps):
        _integrate_all(positions, orientations, wheel_speeds, axle, substep_dt)
        _resolve(positions, bollard_positions, robot_radius, bollard_radius, side, iterations, slop)


def _check_finite(*values):
    for v in values:
        if not math.isfinite(v):
            raise NumericError(f"non-finite kinematic input {v!r}")


def integrate_differential_drive(pose: Pose, vl: float, vr: float, axle: float, dt: float) -> Pose:
    """Closed-form unicycle update of ``pose`` over ``dt`` seconds."""
    _check_finite(*pose, vl, vr, axle, dt)
    if not dt > 0 or not axle > 0:
        raise NumericError("dt and axle must be positive")
    return Pose(*_integrate(pose[0], pose[1], pose[2], vl, vr, axle, dt))


def resolve_collisions(world: World, cfg: StepConfig = StepConfig()) -> World:
    """Push overlapping bodies apart in place; bollards never move."""
    _resolve(
        world.positions,
        world.bollard_positions,
        world.robot_radius,
        world.bollard_radius,
        world.arena.side,
        cfg.collision_iterations,
        cfg.contact_slop,
    )
    return world


def step_control_cycle(world: World, controller, cfg: StepConfig = StepConfig(), readings=None) -> World:
    """Advance ``world`` by one control cycle, in place.

    ``readings`` may be passed as a scratch int64 buffer; after the call it
    holds the sensor value each robot acted on.
    """
    if readings is None:
        readings = np.zeros(world.n_robots, dtype=np.int64)
    _step_cycle(
        world.positions,
        world.orientations,
        world.groups,
        world.wheel_speeds,
        world.bollard_positions,
        world.bollard_groups,
        controller.as_table(),
        readings,
        cfg.max_speed,
        cfg.axle_length,
        cfg.substep_dt,
        cfg.substeps_per_cycle,
        cfg.collision_iterations,
        cfg.contact_slop,
        world.arena.side,
        world.robot_radius,
        world.bollard_radius,
    )
    if not np.isfinite(world.positions).all():
        raise NumericError("robot position became non-finite")
    world.tick += 1
    return world
