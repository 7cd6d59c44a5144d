"""Line-of-sight sensor: a single ray from the robot's centre along its heading."""

from __future__ import annotations

import math
from enum import IntEnum

import numpy as np
from numba import njit


class SensorReading(IntEnum):
    NOTHING = 0
    SAME_GROUP = 1
    OTHER_GROUP = 2


@njit(cache=True)
def _ray_entry(ox, oy, dx, dy, cx, cy, radius, min_t):
    """Distance along the ray at which it is inside the circle beyond ``min_t``.

    Returns inf when the ray misses or the circle lies entirely behind ``min_t``.
    Bodies straddling ``min_t`` (touching or overlapping the sensing robot) hit
    at ``min_t`` itself.
    """
    ex = cx - ox
    ey = cy - oy
    b = ex * dx + ey * dy
    c = ex * ex + ey * ey - radius * radius
    disc = b * b - c
    if disc < 0.0:
        return math.inf
    root = math.sqrt(disc)
    t_exit = b + root
    if t_exit <= min_t:
        return math.inf
    t_enter = b - root
    if t_enter > min_t:
        return t_enter
    return min_t


@njit(cache=True)
def _sense_one(i, positions, orientations, groups, bollard_positions, bollard_groups, robot_radius, bollard_radius):
    ox = positions[i, 0]
    oy = positions[i, 1]
    dx = math.cos(orientations[i])
    dy = math.sin(orientations[i])
    best_t = math.inf
    best_group = -1
    for j in range(positions.shape[0]):
        if j == i:
            continue
        t = _ray_entry(ox, oy, dx, dy, positions[j, 0], positions[j, 1], robot_radius, robot_radius)
        if t < best_t:
            best_t = t
            best_group = groups[j]
    for k in range(bollard_positions.shape[0]):
        t = _ray_entry(ox, oy, dx, dy, bollard_positions[k, 0], bollard_positions[k, 1], bollard_radius, robot_radius)
        if t < best_t:
            best_t = t
            best_group = bollard_groups[k]
    if best_group < 0:
        return 0
    if best_group == groups[i]:
        return 1
    return 2


@njit(cache=True)
def sense_all(positions, orientations, groups, bollard_positions, bollard_groups, robot_radius, bollard_radius, out):
    for i in range(positions.shape[0]):
        out[i] = _sense_one(
            i, positions, orientations, groups, bollard_positions, bollard_groups, robot_radius, bollard_radius
        )
    return out


def line_of_sight(world, robot_id: int) -> SensorReading:
    if not 0 <= robot_id < world.n_robots:
        raise IndexError(f"robot {robot_id} not in world")
    return SensorReading(
        _sense_one(
            robot_id,
            world.positions,
            world.orientations,
            world.groups,
            world.bollard_positions,
            world.bollard_groups,
            world.robot_radius,
            world.bollard_radius,
        )
    )


def sense_world(world) -> np.ndarray:
    """Readings for every robot, all taken from the same snapshot."""
    out = np.zeros(world.n_robots, dtype=np.int64)
    return sense_all(
        world.positions,
        world.orientations,
        world.groups,
        world.bollard_positions,
        world.bollard_groups,
        world.robot_radius,
        world.bollard_radius,
        out,
    )
