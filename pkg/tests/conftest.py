import numpy as np
import pytest

from eplab.grid import make_grid

# filled by test_acceptance; echoed in the terminal summary
ACCEPTANCE_LINES = {}


@pytest.fixture(scope="session")
def grid():
    return make_grid(1024, 10.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
