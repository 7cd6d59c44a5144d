import os

import hypothesis
import numpy as np
import pytest

from swarmagg.world import ArenaConfig, World

hypothesis.settings.register_profile("fast", max_examples=20, deadline=None)
hypothesis.settings.register_profile("default", max_examples=100, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_LINES = []


@pytest.fixture
def report_criterion():
    """Acceptance tests call this with (number, passed, detail) before asserting."""

    def record(number, passed, detail):
        ACCEPTANCE_LINES.append((number, bool(passed), detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(ACCEPTANCE_LINES, key=lambda x: str(x[0])):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")


def make_world(positions, groups, thetas=None, n_groups=None, bollards=(), bollard_groups=(), side=450.0):
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    if thetas is None:
        thetas = np.zeros(len(positions))
    if n_groups is None:
        n_groups = max(list(groups) + list(bollard_groups), default=0) + 1
    return World(
        arena=ArenaConfig(side),
        positions=positions,
        orientations=thetas,
        groups=groups,
        n_groups=n_groups,
        bollard_positions=np.asarray(bollards, dtype=float).reshape(-1, 2),
        bollard_groups=list(bollard_groups),
    )


def pytest_collection_modifyitems(config, items):
    if os.environ.get("SWARMAGG_FULLSCALE") == "1":
        return
    skip = pytest.mark.skip(reason="set SWARMAGG_FULLSCALE=1 to run the 30-per-group checks")
    for item in items:
        if "fullscale" in item.keywords:
            item.add_marker(skip)
