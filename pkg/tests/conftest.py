import numpy as np
import pytest

from groverian.qudit import basis_state, make_state, uniform_state

SQ3 = 1 / np.sqrt(3)
SQ2 = 1 / np.sqrt(2)

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def max_entangled():
    """(|11> + |22> + |33>)/sqrt(3)"""
    a = np.zeros(9)
    a[[0, 4, 8]] = SQ3
    return make_state(3, 2, a)


@pytest.fixture
def bell_like():
    """(|11> + |22>)/sqrt(2) on two qutrits"""
    a = np.zeros(9)
    a[[0, 4]] = SQ2
    return make_state(3, 2, a)


@pytest.fixture
def product_12():
    return basis_state((1, 2), 3)


@pytest.fixture
def uniform_2q():
    return uniform_state(3, 2)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
