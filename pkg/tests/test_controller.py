import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from swarmagg.controller import BEST_CONTROLLER, ControllerParams, actuate, to_wheel_speeds
from swarmagg.sensing import SensorReading

unit = st.floats(-1.0, 1.0, allow_nan=False)
params = st.builds(ControllerParams, unit, unit, unit, unit, unit, unit)
readings = st.sampled_from(list(SensorReading))


@pytest.mark.parametrize(
    "reading, pair",
    [
        (SensorReading.NOTHING, (-0.7, -1.0)),
        (SensorReading.SAME_GROUP, (1.0, -1.0)),
        (SensorReading.OTHER_GROUP, (-0.7, -1.0)),
    ],
)
def test_best_controller_pairs(reading, pair):
    assert actuate(BEST_CONTROLLER, reading) == pair


def test_best_controller_tuple():
    assert BEST_CONTROLLER.as_tuple() == (-0.7, -1.0, 1.0, -1.0, -0.7, -1.0)


@pytest.mark.parametrize(
    "pair, expected",
    [((1.0, -1.0), (12.8, -12.8)), ((0.0, 0.0), (0.0, 0.0)), ((-0.7, -1.0), (-8.96, -12.8))],
)
def test_to_wheel_speeds(pair, expected):
    assert to_wheel_speeds(pair, 12.8) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("pair", [(1.2, 0.0), (0.0, -1.0001), (float("nan"), 0.0)])
def test_to_wheel_speeds_rejects_out_of_range(pair):
    with pytest.raises(ValueError):
        to_wheel_speeds(pair, 12.8)


@pytest.mark.parametrize("values", [[0] * 5, [0] * 7, [2, 0, 0, 0, 0, 0]])
def test_params_validation(values):
    with pytest.raises(ValueError):
        ControllerParams.from_sequence(values)


def test_text_form_round_trip():
    text = "[-0.7,-1.0,1.0,-1.0,-0.7,-1.0]"
    assert ControllerParams.parse(text) == BEST_CONTROLLER
    assert BEST_CONTROLLER.format() == text
    with pytest.raises(ValueError):
        ControllerParams.parse("-0.7,-1.0")


@given(params, st.lists(readings, min_size=1, max_size=50), st.randoms())
def test_stateless_and_bounded(p, history, rnd):
    first = [actuate(p, r) for r in history]
    shuffled = list(range(len(history)))
    rnd.shuffle(shuffled)
    again = {i: actuate(p, history[i]) for i in shuffled}
    assert first == [again[i] for i in range(len(history))]
    for vl, vr in first:
        assert -1 <= vl <= 1 and -1 <= vr <= 1
        sl, sr = to_wheel_speeds((vl, vr), 12.8)
        assert abs(sl) <= 12.8 and abs(sr) <= 12.8
