import math

import numpy as np
import pytest

from omnidyn.params import RobotParams, unit_params, validate


@pytest.fixture
def unit():
    return unit_params()


@pytest.fixture
def robot():
    return validate(RobotParams(k_t=0.05, l=10.0, r=0.05, r_a=2.0, d=0.2, delta=math.pi / 6,
                                mass=4.0, inertia=0.16, b_v=0.5, b_vn=0.5, b_omega=0.02))


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def random_params(rng, delta=None):
    return validate(RobotParams(
        k_t=rng.uniform(0.01, 2.0), l=rng.uniform(1.0, 30.0), r=rng.uniform(0.02, 0.5),
        r_a=rng.uniform(0.2, 5.0), d=rng.uniform(0.05, 1.0),
        delta=rng.uniform(0.05, math.pi / 2 - 0.05) if delta is None else delta,
        mass=rng.uniform(0.5, 20.0), inertia=rng.uniform(0.01, 2.0),
        b_v=rng.uniform(0, 1), b_vn=rng.uniform(0, 1), b_omega=rng.uniform(0, 0.1)))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
