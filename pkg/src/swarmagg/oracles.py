"""Slow, independent reference computations used to cross-check the kernels.

Nothing here is on the simulation path. Each oracle takes a different route
from the code it checks: plain-Python pair loops instead of compiled ones,
exact rational sums, breadth-first search instead of union-find, dense ray
marching instead of the analytic ray/circle solve, and Euler micro-stepping
instead of the closed-form arc.
"""

from __future__ import annotations

import math
from collections import deque
from fractions import Fraction
from itertools import combinations

import numpy as np
from numba import njit


def dispersion_bruteforce(positions, groups, n_groups: int) -> float:
    total = 0.0
    for k in range(n_groups):
        members = [tuple(map(float, p)) for p, g in zip(positions, groups) if g == k]
        far = 0.0
        for (xa, ya), (xb, yb) in combinations(members, 2):
            far = max(far, math.sqrt((xa - xb) * (xa - xb) + (ya - yb) * (ya - yb)))
        total += far
    return total


def second_moment_exact(positions, groups, n_groups: int, robot_radius: float) -> float:
    """Second moment evaluated in exact rational arithmetic, rounded once."""
    pts = [(Fraction(float(x)), Fraction(float(y))) for x, y in positions]
    labels = [int(g) for g in groups]
    total = Fraction(0)
    for k in range(n_groups):
        members = [p for p, g in zip(pts, labels) if g == k]
        if not members:
            continue
        cx = sum(p[0] for p in members) / len(members)
        cy = sum(p[1] for p in members) / len(members)
        total += sum((x - cx) ** 2 + (y - cy) ** 2 for x, y in members)
    r = Fraction(float(robot_radius))
    return float(total / (4 * r * r))


def largest_components_bfs(positions, groups, n_groups: int, link_distance: float) -> list[int]:
    n = len(positions)
    adj = [[] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j and groups[i] == groups[j]:
                dx = float(positions[i][0]) - float(positions[j][0])
                dy = float(positions[i][1]) - float(positions[j][1])
                if math.sqrt(dx * dx + dy * dy) < link_distance:
                    adj[i].append(j)
    seen = [False] * n
    best = [0] * n_groups
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        queue = deque([s])
        size = 0
        while queue:
            v = queue.popleft()
            size += 1
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
        g = int(groups[s])
        best[g] = max(best[g], size)
    return best


def time_weighted_cost_exact(d_series) -> float:
    """Correctly rounded sum of t * d_t (each product rounded first), t from 1."""
    return math.fsum(t * float(d) for t, d in enumerate(d_series, start=1))


@njit(cache=True)
def _march(ox, oy, heading, own_group, start, step, limit, centers, radii, labels):
    dx = math.cos(heading)
    dy = math.sin(heading)
    n_steps = int(math.ceil((limit - start) / step))
    for s in range(1, n_steps + 1):
        t = start + s * step
        px = ox + t * dx
        py = oy + t * dy
        for b in range(centers.shape[0]):
            ex = px - centers[b, 0]
            ey = py - centers[b, 1]
            if ex * ex + ey * ey <= radii[b] * radii[b]:
                return 1 if labels[b] == own_group else 2, t
    return 0, limit


def ray_march_reading(world, robot_id: int, step: float = 0.01):
    """Walk the heading ray in ``step`` cm increments from the robot's rim.

    Returns (reading, distance at which the first body was entered).
    """
    others = [j for j in range(world.n_robots) if j != robot_id]
    centers = np.concatenate([world.positions[others], world.bollard_positions]).reshape(-1, 2)
    radii = np.array([world.robot_radius] * len(others) + [world.bollard_radius] * len(world.bollard_positions))
    labels = np.concatenate([world.groups[others], world.bollard_groups]).astype(np.int64)
    x, y = world.positions[robot_id]
    limit = math.sqrt(2.0) * world.arena.side + world.robot_radius
    return _march(
        float(x), float(y), float(world.orientations[robot_id]), int(world.groups[robot_id]),
        world.robot_radius, step, limit, centers, radii.astype(np.float64), labels,
    )


def euler_drive(poses, vl, vr, axle: float, dt, h: float = 1e-6):
    """Forward-Euler unicycle integration in steps of ``h`` seconds.

    All arguments broadcast; ``poses`` is (..., 3). Angles are left unwrapped.
    """
    poses = np.array(poses, dtype=np.float64)
    x, y, th = poses[..., 0].copy(), poses[..., 1].copy(), poses[..., 2].copy()
    vl = np.asarray(vl, dtype=np.float64)
    vr = np.asarray(vr, dtype=np.float64)
    dt = np.broadcast_to(np.asarray(dt, dtype=np.float64), x.shape)
    v = 0.5 * (vl + vr)
    omega = (vr - vl) / axle
    n_full = np.floor(dt / h).astype(np.int64)
    rest = dt - n_full * h
    for s in range(int(n_full.max(initial=0))):
        active = s < n_full
        cx, sy = np.cos(th), np.sin(th)
        x = np.where(active, x + v * h * cx, x)
        y = np.where(active, y + v * h * sy, y)
        th = np.where(active, th + omega * h, th)
    x = x + v * rest * np.cos(th)
    y = y + v * rest * np.sin(th)
    th = th + omega * rest
    return np.stack([x, y, th], axis=-1)
