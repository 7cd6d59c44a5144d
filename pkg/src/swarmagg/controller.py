"""Memoryless reactive controller: sensor reading -> normalized wheel pair."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from swarmagg.sensing import SensorReading
from swarmagg.world import MAX_WHEEL_SPEED


@dataclass(frozen=True)
class ControllerParams:
    """(vl0, vr0, vl1, vr1, vl2, vr2): wheel pair per reading, each in [-1, 1]."""

    vl0: float
    vr0: float
    vl1: float
    vr1: float
    vl2: float
    vr2: float

    def __post_init__(self):
        for name, v in zip(("vl0", "vr0", "vl1", "vr1", "vl2", "vr2"), self.as_tuple()):
            if not math.isfinite(v) or not -1.0 <= v <= 1.0:
                raise ValueError(f"{name}={v!r} outside [-1, 1]")

    @classmethod
    def from_sequence(cls, values) -> ControllerParams:
        values = [float(v) for v in values]
        if len(values) != 6:
            raise ValueError(f"controller needs 6 values, got {len(values)}")
        return cls(*values)

    @classmethod
    def parse(cls, text: str) -> ControllerParams:
        """Parse the ``[-0.7,-1.0,1.0,-1.0,-0.7,-1.0]`` form."""
        try:
            values = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"cannot parse controller {text!r}") from exc
        if not isinstance(values, list):
            raise ValueError(f"controller must be a list, got {text!r}")
        return cls.from_sequence(values)

    def format(self) -> str:
        return "[" + ",".join(repr(v) for v in self.as_tuple()) + "]"

    def as_tuple(self) -> tuple[float, ...]:
        return (self.vl0, self.vr0, self.vl1, self.vr1, self.vl2, self.vr2)

    def as_table(self) -> np.ndarray:
        """(3, 2) lookup table indexed by reading; the layout the kernels use."""
        return np.array(self.as_tuple(), dtype=np.float64).reshape(3, 2)

    def with_other_group(self, vl2: float, vr2: float) -> ControllerParams:
        return ControllerParams(self.vl0, self.vr0, self.vl1, self.vr1, vl2, vr2)

    def __str__(self) -> str:
        return self.format()


BEST_CONTROLLER = ControllerParams(-0.7, -1.0, 1.0, -1.0, -0.7, -1.0)
ZERO_CONTROLLER = ControllerParams(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


def actuate(params: ControllerParams, reading: SensorReading | int) -> tuple[float, float]:
    i = int(reading)
    t = params.as_tuple()
    return t[2 * i], t[2 * i + 1]


def to_wheel_speeds(pair: tuple[float, float], max_speed: float = MAX_WHEEL_SPEED) -> tuple[float, float]:
    vl, vr = pair
    for v in (vl, vr):
        if not math.isfinite(v) or not -1.0 <= v <= 1.0:
            raise ValueError(f"normalized wheel value {v!r} outside [-1, 1]")
    return vl * max_speed, vr * max_speed
