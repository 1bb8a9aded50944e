import numpy as np
import pytest

from smcluster.graph_core import SparseGraph


def random_graph(rng, n, p=0.2, weighted=True, connect=True):
    """Random symmetric graph; optionally a ring is added so it is connected."""
    upper = np.triu(rng.random((n, n)) < p, 1)
    if connect:
        idx = np.arange(n)
        upper[idx[:-1], idx[1:]] = True
    W = upper * (rng.random((n, n)) + 0.1 if weighted else 1.0)
    return SparseGraph.from_matrix(W + W.T)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def single_edge():
    return SparseGraph.from_edges(2, [(0, 1, 1.0)])


@pytest.fixture
def triangle():
    return SparseGraph.from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])


@pytest.fixture
def make_graph():
    return random_graph


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
