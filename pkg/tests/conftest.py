import numpy as np
import pytest

from parabolic_barrier import PhysParams, StateLabel, build_state

NATURAL = PhysParams()
SKEWED = PhysParams(hbar=2.0, mass=0.5, gamma=1.5, v0=-3.0)


@pytest.fixture(params=[NATURAL, SKEWED, PhysParams(hbar=2.0), PhysParams(gamma=0.5)],
                ids=["natural", "skewed", "hbar2", "slow"])
def params(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def state(t, nx, ny, p=NATURAL):
    return build_state(StateLabel.from_type(t, nx, ny), p)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
