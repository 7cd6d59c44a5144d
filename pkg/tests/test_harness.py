import math

import numpy as np
import pytest

from swarmagg import harness
from swarmagg.controller import BEST_CONTROLLER, ZERO_CONTROLLER
from swarmagg.harness import (
    PlacementError,
    ScenarioConfig,
    generate_scenario,
    matrix_configs,
    run_trial,
    run_validation_matrix,
)
from swarmagg.metrics import InvalidScenarioError, cost_of_series, group_dispersion
from swarmagg.world import max_penetration, world_to_json


def test_bollard_placement_g3():
    w = generate_scenario(ScenarioConfig(g=3, n_per_group=2, seed=0))
    expected = [(405.0, 225.0), (135.0, 380.885), (135.0, 69.115)]
    assert np.allclose(w.bollard_positions, expected, atol=5e-4)
    assert list(w.bollard_groups) == [0, 1, 2]


def test_no_bollards_when_disabled():
    w = generate_scenario(ScenarioConfig(g=5, n_per_group=2, bollards_enabled=False))
    assert len(w.bollard_positions) == 0


def test_same_seed_same_world():
    cfg = ScenarioConfig(g=3, n_per_group=25, seed=77)
    a, b = generate_scenario(cfg), generate_scenario(cfg)
    assert a.same_state(b)
    assert world_to_json(a) == world_to_json(b)
    assert not generate_scenario(cfg.replace(seed=78)).same_state(a)


def test_reference_scenario_is_valid():
    w = generate_scenario(ScenarioConfig(g=3, n_per_group=25, seed=5))
    assert w.n_robots == 75
    assert max_penetration(w) <= -0.1 + 1e-9
    r = w.robot_radius
    assert ((w.positions >= r) & (w.positions <= 450 - r)).all()
    assert ((w.orientations >= -math.pi) & (w.orientations < math.pi)).all()
    assert list(w.groups) == [0] * 25 + [1] * 25 + [2] * 25


def test_full_scale_scenario_places():
    w = generate_scenario(ScenarioConfig(g=5, n_per_group=30, seed=1))
    assert w.n_robots == 150 and max_penetration(w) < 0


def test_crowded_arena_rejected():
    with pytest.raises(InvalidScenarioError):
        generate_scenario(ScenarioConfig(g=3, n_per_group=100, arena_side=100))


def test_placement_failure(monkeypatch):
    monkeypatch.setattr(harness, "MAX_PLACEMENT_ATTEMPTS", 0)
    with pytest.raises(PlacementError):
        generate_scenario(ScenarioConfig(g=1, n_per_group=1))


@pytest.mark.parametrize("bad", [dict(g=0), dict(n_per_group=0), dict(duration_s=0.0)])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        ScenarioConfig(**bad)


def test_zero_controller_static_world():
    cfg = ScenarioConfig(g=3, n_per_group=10, duration_s=60, seed=2)
    res = run_trial(cfg, ZERO_CONTROLLER)
    T = cfg.n_cycles()
    assert len(res.d) == T == 600
    d1 = res.d[0]
    assert d1 == group_dispersion(generate_scenario(cfg))
    assert np.all(res.d == d1)
    assert res.cost == pytest.approx(d1 * T * (T + 1) / 2, rel=1e-13)


def test_trial_self_consistency():
    res = run_trial(ScenarioConfig(g=3, n_per_group=5, duration_s=30, seed=4), BEST_CONTROLLER)
    assert len(res.d) == len(res.u) == len(res.lc) == 300
    assert res.cost == cost_of_series(res.d)
    assert res.pc.min() > 0 and res.pc.max() <= 1
    assert len(res.samples()) == 300 and res.samples()[-1].tick == 300


def test_snapshots_do_not_perturb_the_run():
    cfg = ScenarioConfig(g=3, n_per_group=5, duration_s=30, seed=4)
    seen = []
    plain = run_trial(cfg, BEST_CONTROLLER)
    snapped = run_trial(cfg, BEST_CONTROLLER, snapshot_at_s=(0, 10, 30), on_snapshot=lambda s, w: seen.append((s, w.tick)))
    assert seen == [(0.0, 0), (10.0, 100), (30.0, 300)]
    assert np.array_equal(plain.d, snapped.d) and plain.cost == snapped.cost


def test_pipeline_consumes_no_randomness():
    cfg = ScenarioConfig(g=3, n_per_group=5, duration_s=20, seed=12)
    a = run_trial(cfg, BEST_CONTROLLER)
    generate_scenario(cfg.replace(seed=99))
    b = run_trial(cfg, BEST_CONTROLLER)
    assert np.array_equal(a.d, b.d) and np.array_equal(a.u, b.u) and np.array_equal(a.lc, b.lc)


def test_metrics_csv_layout():
    res = run_trial(ScenarioConfig(g=3, n_per_group=3, duration_s=1, seed=1), BEST_CONTROLLER)
    lines = res.metrics_csv().splitlines()
    assert lines[0] == "tick,time_s,d_cm,u,pc,lc_1,lc_2,lc_3"
    assert len(lines) == 11
    assert lines[1].startswith("1,0.1,")
    every5 = res.metrics_csv(sample_every=5).splitlines()
    assert [ln.split(",")[0] for ln in every5[1:]] == ["5", "10"]
    # stored d values survive the CSV exactly
    assert [float(ln.split(",")[2]) for ln in lines[1:]] == list(res.d)


def test_full_matrix_size():
    assert len(matrix_configs(0, 10)) == 200
    seeds = {c.seed for c in matrix_configs(100, 3)}
    assert seeds == {100, 101, 102}


def test_validation_matrix_counts_and_stability():
    kwargs = dict(duration_s=2.0, checkpoints=(1.0, 2.0))
    report = run_validation_matrix(5, 1, jobs=1, **kwargs)
    assert len(report.configs) == 20
    assert len(report.rows) == 40
    assert report.rows_csv().splitlines()[0] == "g,n_per_group,bollards,seed,checkpoint_s,pc,u,d_cm"
    summary = report.summary_csv().splitlines()
    assert len(summary) == 41
    again = run_validation_matrix(5, 1, jobs=2, **kwargs)
    assert again.rows_csv() == report.rows_csv()
    assert again.summary_csv() == report.summary_csv()


def test_validation_aggregates():
    report = run_validation_matrix(0, 3, jobs=1, groups=(3,), per_group=(4,), bollards=(True,),
                                   duration_s=3.0, checkpoints=(3.0,))
    (cfg,) = report.configs
    pcs = [r.pc for r in report.rows]
    assert len(pcs) == 3
    mean, lo, hi = cfg.stats[3.0]["pc"]
    assert lo == min(pcs) and hi == max(pcs) and mean == pytest.approx(sum(pcs) / 3)


@pytest.mark.slow
def test_more_groups_take_at_least_as_long_to_settle():
    common = dict(per_group=(10,), bollards=(True,), duration_s=2400.0)
    g3 = run_validation_matrix(0, 5, groups=(3,), **common).configs[0]
    g5 = run_validation_matrix(0, 5, groups=(5,), **common).configs[0]
    print(f"mean time to pc >= 0.95: g=3 {g3.steady_time_s} s, g=5 {g5.steady_time_s} s")
    assert g5.steady_time_s >= g3.steady_time_s
