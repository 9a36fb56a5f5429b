import numpy as np
import pytest

from levinson.polyalg import Polynomial

# filled by test_acceptance; echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_P(rng, deg):
    """Random polynomial with P(0) = 0 and P(1) = 1."""
    c = np.concatenate([[0.0], rng.normal(size=deg)])
    c[1] += 1.0 - c.sum()
    return Polynomial(c)


def random_Q(rng, deg):
    return Polynomial(np.concatenate([[1.0], rng.normal(size=deg)]))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
