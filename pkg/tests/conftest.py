import numpy as np
import pytest

from gaborpr.generators import characteristic_vector, quadratic_difference_set


@pytest.fixture(scope="session")
def ds7():
    return characteristic_vector(7, [1, 2, 4])


@pytest.fixture(scope="session")
def qds67():
    return quadratic_difference_set(67)[1]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def cn(rng, size):
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
