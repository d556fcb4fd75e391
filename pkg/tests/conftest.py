import numpy as np
import pytest

from ugrm_gft.graph import DirectedGraph


def random_digraph(rng, n, density=0.5, weighted=True):
    mask = rng.random((n, n)) < density
    w = rng.random((n, n)) * mask if weighted else mask.astype(float)
    np.fill_diagonal(w, 0.0)
    return DirectedGraph(w)


def random_undirected(rng, n, density=0.5, connected=True):
    upper = np.triu(rng.random((n, n)) * (rng.random((n, n)) < density), 1)
    if connected:
        # add a path so the graph is connected
        for i in range(n - 1):
            upper[i, i + 1] = max(upper[i, i + 1], 0.1 + rng.random())
    return DirectedGraph(upper + upper.T)


def directed_cycle(n):
    return DirectedGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
