import random

import pytest
from hypothesis import strategies as st

from womcodes.codec import CodeTable
from womcodes.graph import build_graph
from womcodes.labeling import labeling_from_labels
from womcodes.regions import build_regions

# two branches 1-2 / 1-3 joining again at 4 and 6; node 5 hangs off 3
TWO_BRANCH_EDGES = [(1, 2), (1, 3), (2, 4), (3, 4), (2, 6), (3, 5), (4, 6), (5, 6)]
TWO_BRANCH_LABELS = {1: 1, 2: 3, 3: 2, 4: 1, 5: 3, 6: 2}

# node 4 is a frontier node of the second layer with no room for a region
DEAD_END_EDGES = [(1, 2), (1, 3), (2, 4), (2, 5), (3, 5), (3, 6), (5, 7), (5, 8), (6, 8), (6, 9)]


def two_branch_graph():
    return build_graph(6, TWO_BRANCH_EDGES, 1)


def two_branch_table():
    """The six-node example with the hand-picked labels (k = 3)."""
    g = two_branch_graph()
    rf = build_regions(g, 3)
    return CodeTable(g, rf, labeling_from_labels(TWO_BRANCH_LABELS))


def dead_end_graph():
    return build_graph(9, DEAD_END_EDGES, 1)


def random_dag(rng: random.Random, n: int, p: float):
    """Random DAG on 1..n whose edges go from smaller to larger ids, with
    every node reachable from 1."""
    edges = set()
    for v in range(2, n + 1):
        edges.add((rng.randrange(1, v), v))
        for u in range(1, v):
            if rng.random() < p:
                edges.add((u, v))
    return build_graph(n, sorted(edges), 1)


@st.composite
def dags(draw, max_nodes=12):
    n = draw(st.integers(1, max_nodes))
    seed = draw(st.integers(0, 2**32 - 1))
    p = draw(st.sampled_from([0.0, 0.1, 0.3, 0.6]))
    return random_dag(random.Random(seed), n, p)


@pytest.fixture
def fig_table():
    return two_branch_table()


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


def record(criterion, passed, detail):
    line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
