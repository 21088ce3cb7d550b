import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from scipy.stats import unitary_group

from bellud import BellLikeFamily, ModeUnitary, TwoPhotonState

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def random_unitary(dim, seed):
    return ModeUnitary(unitary_group.rvs(dim, random_state=np.random.default_rng(seed)))


def random_state(seed):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=4) + 1j * rng.normal(size=4)
    return TwoPhotonState(c / np.linalg.norm(c))


@pytest.fixture
def bell_like():
    return BellLikeFamily.from_angles(math.pi / 6, math.pi / 8)


@pytest.fixture
def bell():
    return BellLikeFamily.bell()
