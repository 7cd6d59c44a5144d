import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import make_world
from swarmagg.oracles import ray_march_reading
from swarmagg.sensing import SensorReading, line_of_sight, sense_world

S, N, O = SensorReading.SAME_GROUP, SensorReading.NOTHING, SensorReading.OTHER_GROUP


def test_lone_robot_sees_nothing():
    for theta in np.linspace(-math.pi, math.pi, 17, endpoint=False):
        w = make_world([(123.0, 321.0)], [0], thetas=[theta])
        assert line_of_sight(w, 0) is N


def test_same_group_ahead():
    w = make_world([(0, 0), (50, 0)], [0, 0], side=1000)
    assert line_of_sight(w, 0) is S


def test_first_intersection_wins():
    w = make_world([(0, 0), (30, 0), (60, 0)], [0, 1, 0], side=1000)
    assert line_of_sight(w, 0) is O


def test_own_bollard_reads_as_same_group():
    w = make_world([(0, 0)], [0], bollards=[(40, 0)], bollard_groups=[0], side=1000)
    assert line_of_sight(w, 0) is S


def test_foreign_bollard_reads_as_other_group():
    w = make_world([(0, 0), (300, 300)], [0, 1], bollards=[(40, 0)], bollard_groups=[1], side=1000)
    assert line_of_sight(w, 0) is O


def test_bollard_occludes_robot_behind_it():
    w = make_world([(10, 10), (90, 10), (300, 300)], [0, 0, 1], bollards=[(50, 10)], bollard_groups=[1])
    assert line_of_sight(w, 0) is O


def test_touching_robot_straight_ahead_is_seen():
    w = make_world([(100, 100), (107.4, 100)], [0, 1])
    assert line_of_sight(w, 0) is O
    w = make_world([(100, 100), (107.39, 100)], [0, 0])
    assert line_of_sight(w, 0) is S


def test_robot_behind_is_invisible():
    w = make_world([(100, 100), (60, 100)], [0, 0])
    assert line_of_sight(w, 0) is N


def test_tangent_ray_counts_as_hit():
    w = make_world([(100, 100), (150, 103.7)], [0, 1])
    assert line_of_sight(w, 0) is O
    w = make_world([(100, 100), (150, 103.70001)], [0, 1])
    assert line_of_sight(w, 0) is N


@given(
    st.floats(-math.pi, math.pi, exclude_max=True),
    st.floats(20, 150),
    st.floats(-30, 30),
)
def test_displacing_body_off_the_ray_never_changes_reading(theta, along, across):
    # body A sits on the ray at distance ``along``; body B is placed well off the ray line
    assume(abs(across) > 3.7 + 1e-6)
    ox, oy = 250.0, 250.0
    dx, dy = math.cos(theta), math.sin(theta)
    a = (ox + along * dx, oy + along * dy)
    b = (ox + along * dx - across * dy, oy + along * dy + across * dx)
    base = make_world([(ox, oy), a], [0, 1], thetas=[theta, 0.0], side=500)
    with_b = make_world([(ox, oy), a, b], [0, 1, 0], thetas=[theta, 0.0, 0.0], side=500)
    assert line_of_sight(base, 0) == line_of_sight(with_b, 0) == O


@given(st.floats(10, 200), st.floats(0.05, 0.95), st.sampled_from([0, 1]), st.sampled_from([0, 1]))
def test_monotonic_occlusion(hit_at, frac, hit_group, new_group):
    w = make_world([(10, 250), (10 + hit_at + 10, 250)], [0, hit_group], side=500)
    before = line_of_sight(w, 0)
    # a body strictly between the robot's rim and the current hit takes over
    between_x = 10 + 3.7 + frac * (hit_at + 10 - 3.7 - 3.7 - 3.7)
    closer = make_world([(10, 250), (10 + hit_at + 10, 250), (between_x, 250)], [0, hit_group, new_group], side=500)
    assert line_of_sight(closer, 0) == (S if new_group == 0 else O)
    # one beyond it never matters
    beyond = make_world(
        [(10, 250), (10 + hit_at + 10, 250), (10 + hit_at + 30, 250)], [0, hit_group, new_group], side=500
    )
    assert line_of_sight(beyond, 0) == before


def test_sense_world_uses_one_snapshot_regardless_of_order():
    rng = np.random.default_rng(5)
    pos = rng.uniform(10, 190, size=(25, 2))
    th = rng.uniform(-math.pi, math.pi, 25)
    groups = rng.integers(0, 3, 25)
    w = make_world(pos, groups, thetas=th, n_groups=3, side=200)
    all_at_once = sense_world(w)
    perm = rng.permutation(25)
    permuted = make_world(pos[perm], groups[perm], thetas=th[perm], n_groups=3, side=200)
    assert np.array_equal(sense_world(permuted), all_at_once[perm])
    assert [int(line_of_sight(w, i)) for i in range(25)] == list(all_at_once)


def _ambiguous(world, i, step):
    """Cases a dense march cannot resolve: grazing rays and near-tied entries of different class."""
    o = world.positions[i]
    d = np.array([math.cos(world.orientations[i]), math.sin(world.orientations[i])])
    others = [j for j in range(world.n_robots) if j != i]
    centers = np.concatenate([world.positions[others], world.bollard_positions])
    labels = np.concatenate([world.groups[others], world.bollard_groups])
    rel = centers - o
    along = rel @ d
    perp = np.abs(rel[:, 0] * d[1] - rel[:, 1] * d[0])
    r = world.robot_radius
    if np.any(np.abs(perp - r) < 1e-3):
        return True
    hit = perp <= r
    half = np.sqrt(np.clip(r * r - perp**2, 0, None))
    entry = np.maximum(along - half, r)
    exit_ = along + half
    ok = hit & (exit_ > r)
    entry, classes = entry[ok], labels[ok] == world.groups[i]
    if np.any(np.abs(exit_[ok] - r) < 2 * step):
        return True
    if len(entry) < 2:
        return False
    order = np.argsort(entry)
    return bool(entry[order[1]] - entry[order[0]] < 2 * step and classes[order[0]] != classes[order[1]])


def test_matches_dense_ray_marching_on_10k_random_worlds():
    rng = np.random.default_rng(2024)
    step = 0.01
    checked = 0
    for _ in range(10_000):
        side = 100.0
        n_robots = int(rng.integers(1, 18))
        n_bollards = int(rng.integers(0, 4))
        g = int(rng.integers(1, 4))
        pos = rng.uniform(3.7, side - 3.7, size=(n_robots, 2))
        w = make_world(
            pos, rng.integers(0, g, n_robots), thetas=rng.uniform(-math.pi, math.pi, n_robots), n_groups=g,
            bollards=rng.uniform(3.7, side - 3.7, size=(n_bollards, 2)), bollard_groups=rng.integers(0, g, n_bollards),
            side=side,
        )
        i = int(rng.integers(0, n_robots))
        if _ambiguous(w, i, step):
            continue
        expected, _ = ray_march_reading(w, i, step)
        assert int(line_of_sight(w, i)) == expected
        checked += 1
    assert checked > 9_500
