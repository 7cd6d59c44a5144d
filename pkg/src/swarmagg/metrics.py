"""Swarm measures: per-group dispersion d, time-weighted cost U, second moment u,
and the proportion of clustered robots pc.

The compiled kernels are what trials call every control cycle; the functions
taking a World are thin validated wrappers around them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from swarmagg.world import World


class InvalidScenarioError(ValueError):
    pass


class SequencingError(ValueError):
    pass


@njit(cache=True)
def _dispersion(positions, groups, n_groups):
    best = np.zeros(n_groups)
    n = positions.shape[0]
    for i in range(n):
        gi = groups[i]
        for j in range(i + 1, n):
            if groups[j] != gi:
                continue
            dx = positions[i, 0] - positions[j, 0]
            dy = positions[i, 1] - positions[j, 1]
            d2 = dx * dx + dy * dy
            if d2 > best[gi]:
                best[gi] = d2
    total = 0.0
    for k in range(n_groups):
        total += math.sqrt(best[k])
    return total


@njit(cache=True)
def _second_moment(positions, groups, n_groups, robot_radius):
    sx = np.zeros(n_groups)
    sy = np.zeros(n_groups)
    count = np.zeros(n_groups)
    n = positions.shape[0]
    for i in range(n):
        sx[groups[i]] += positions[i, 0]
        sy[groups[i]] += positions[i, 1]
        count[groups[i]] += 1.0
    for k in range(n_groups):
        if count[k] > 0:
            sx[k] /= count[k]
            sy[k] /= count[k]
    acc = 0.0
    for i in range(n):
        dx = positions[i, 0] - sx[groups[i]]
        dy = positions[i, 1] - sy[groups[i]]
        acc += dx * dx + dy * dy
    return acc / (4.0 * robot_radius * robot_radius)


@njit(cache=True)
def _find(parent, a):
    root = a
    while parent[root] != root:
        root = parent[root]
    while parent[a] != root:
        nxt = parent[a]
        parent[a] = root
        a = nxt
    return root


@njit(cache=True)
def _largest_components(positions, groups, n_groups, link_distance, lc_out):
    """Union-find over same-group pairs closer than ``link_distance``."""
    n = positions.shape[0]
    parent = np.arange(n)
    size = np.ones(n, dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            if groups[i] != groups[j]:
                continue
            dx = positions[i, 0] - positions[j, 0]
            dy = positions[i, 1] - positions[j, 1]
            if math.sqrt(dx * dx + dy * dy) < link_distance:
                ri = _find(parent, i)
                rj = _find(parent, j)
                if ri != rj:
                    if size[ri] < size[rj]:
                        ri, rj = rj, ri
                    parent[rj] = ri
                    size[ri] += size[rj]
    for k in range(n_groups):
        lc_out[k] = 0
    for i in range(n):
        if parent[i] == i and size[i] > lc_out[groups[i]]:
            lc_out[groups[i]] = size[i]
    total = 0
    for k in range(n_groups):
        total += lc_out[k]
    return total


@njit(cache=True)
def measure(positions, groups, n_groups, robot_radius, lc_out):
    """(d, u, sum of lc_k) in one call; ``lc_out`` receives the per-group sizes."""
    d = _dispersion(positions, groups, n_groups)
    u = _second_moment(positions, groups, n_groups, robot_radius)
    clustered = _largest_components(positions, groups, n_groups, 4.0 * robot_radius, lc_out)
    return d, u, clustered


def _group_sizes(world: World) -> np.ndarray:
    sizes = np.bincount(world.groups, minlength=world.n_groups)
    if (sizes == 0).any():
        empty = [int(k) for k in np.flatnonzero(sizes == 0)]
        raise InvalidScenarioError(f"empty group(s) {empty}")
    return sizes


def group_dispersion(world: World) -> float:
    """Sum over groups of the largest distance between two members (cm)."""
    _group_sizes(world)
    return float(_dispersion(world.positions, world.groups, world.n_groups))


def second_moment(world: World) -> float:
    _group_sizes(world)
    return float(_second_moment(world.positions, world.groups, world.n_groups, world.robot_radius))


@dataclass(frozen=True)
class ClusterStats:
    pc: float
    lc: tuple[int, ...]
    pc_k: tuple[float, ...]


def clustered_proportion(world: World) -> ClusterStats:
    sizes = _group_sizes(world)
    lc = np.zeros(world.n_groups, dtype=np.int64)
    total = _largest_components(world.positions, world.groups, world.n_groups, 4.0 * world.robot_radius, lc)
    return ClusterStats(
        pc=total / world.n_robots,
        lc=tuple(int(v) for v in lc),
        pc_k=tuple(float(a / b) for a, b in zip(lc, sizes)),
    )


@dataclass(frozen=True)
class MetricSample:
    tick: int
    d: float
    u: float
    pc: float
    lc: tuple[int, ...]
    pc_k: tuple[float, ...]


def sample(world: World) -> MetricSample:
    stats = clustered_proportion(world)
    return MetricSample(world.tick, group_dispersion(world), second_moment(world), stats.pc, stats.lc, stats.pc_k)


@dataclass(frozen=True)
class CostAccumulator:
    """Running U = sum_t t * d_t with Neumaier compensation; ``t`` starts at 1."""

    total: float = 0.0
    compensation: float = 0.0
    steps: int = 0

    @property
    def value(self) -> float:
        return self.total + self.compensation


def accumulate_cost(acc: CostAccumulator, t: int, d: float) -> CostAccumulator:
    if t != acc.steps + 1:
        raise SequencingError(f"expected step {acc.steps + 1}, got {t}")
    term = t * d
    total = acc.total + term
    if abs(acc.total) >= abs(term):
        comp = acc.compensation + ((acc.total - total) + term)
    else:
        comp = acc.compensation + ((term - total) + acc.total)
    return CostAccumulator(total, comp, t)


def cost_of_series(d_series) -> float:
    """U for a whole d series, accumulated in ascending t exactly as a trial does."""
    acc = CostAccumulator()
    for t, d in enumerate(d_series, start=1):
        acc = accumulate_cost(acc, t, float(d))
    return acc.value

