import numpy as np
import pytest

from adaptive_sis.graph import gnp_random_graph

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def g500():
    """500-node G(n, p); lambda1 ~ 75.3, close to the Oregon AS graph's."""
    return gnp_random_graph(500, 0.15, seed=11)


@pytest.fixture(scope="session")
def seeds500():
    return np.sort(np.random.default_rng(5).choice(500, size=100, replace=False))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
