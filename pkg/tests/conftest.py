import itertools
from pathlib import Path

import numpy as np
import pytest

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def brute_objective(dist, flow, sigma):
    """Plain double loop in Python integers; independent of the numpy paths."""
    n = len(sigma)
    return sum(int(dist[i][j]) * int(flow[sigma[i]][sigma[j]]) for i in range(n) for j in range(n))


def brute_optimum(dist, flow):
    n = len(dist)
    return min(
        (brute_objective(dist, flow, p), p) for p in itertools.permutations(range(n))
    )


def random_instance(rng, n, high=100, symmetric=False):
    from kmm_eda.qap import QapInstance

    d = rng.integers(0, high, (n, n))
    h = rng.integers(0, high, (n, n))
    if symmetric:
        d = d + d.T
        h = h + h.T
    return QapInstance(d, h, name="rand%d" % n)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
