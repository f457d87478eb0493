import itertools

import numpy as np
import pytest

from dsmc.dsm import Dsm


def pairwise_cost(weights, assignment, powcc):
    """Reference coordination cost: literal loop over unordered pairs."""
    n = len(weights)
    sizes = {}
    for c in assignment:
        sizes[c] = sizes.get(c, 0) + 1
    intra = extra = 0.0
    for j, k in itertools.combinations(range(n), 2):
        cost = weights[j][k] + weights[k][j]
        if assignment[j] == assignment[k]:
            intra += cost * sizes[assignment[j]] ** powcc
        else:
            extra += cost * n ** powcc
    return intra, extra


def random_int_dsm(rng, n, density=0.2, max_w=5):
    mask = rng.random((n, n)) < density
    w = np.where(mask, rng.integers(1, max_w + 1, size=(n, n)), 0)
    return Dsm(w)


def random_real_dsm(rng, n, density=0.2):
    mask = rng.random((n, n)) < density
    return Dsm(np.where(mask, rng.random((n, n)) * 10, 0.0))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
