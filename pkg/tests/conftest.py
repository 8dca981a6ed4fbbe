import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from retnet import WeightedDigraph

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def digraphs(draw, max_n=12, max_m=40, max_w=6, loops=False, min_m=0):
    """Random weighted digraphs with string ids ``"0".."n-1"``."""
    n = draw(st.integers(1 if min_m == 0 else 2, max_n))
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
    if not loops:
        pairs = pairs.filter(lambda p: p[0] != p[1])
    arcs = draw(st.lists(st.tuples(pairs, st.integers(1, max_w)), min_size=min_m, max_size=max_m))
    tails = [a[0][0] for a in arcs]
    heads = [a[0][1] for a in arcs]
    weights = [a[1] for a in arcs]
    return WeightedDigraph([str(i) for i in range(n)], tails, heads, weights)


@st.composite
def graph_and_labels(draw, max_n=12, loops=False):
    g = draw(digraphs(max_n=max_n, loops=loops, min_m=1))
    k = draw(st.integers(1, g.n))
    labels = draw(st.lists(st.integers(0, k - 1), min_size=g.n, max_size=g.n))
    return g, labels


def as_dicts(graph):
    """``({(i, j): w}, n)`` view of a graph using vertex indices."""
    return {(int(t), int(h)): int(w)
            for t, h, w in zip(graph.tails, graph.heads, graph.weights)}, graph.n


@pytest.fixture
def two_cliques():
    """Two directed 4-cliques joined by a single light arc."""
    arcs = []
    for block in (range(0, 4), range(4, 8)):
        arcs += [(str(i), str(j), 3) for i in block for j in block if i != j]
    arcs.append(("3", "4", 1))
    return WeightedDigraph.from_arcs(arcs)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE: dict[int, str] = {}


def record_criterion(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}: {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
