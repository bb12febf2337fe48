import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from hypercoarsen import Hypergraph

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def hypergraphs(draw, min_nodes=2, max_nodes=10, max_edges=12, max_size=4, weighted=True,
                node_weighted=False):
    n = draw(st.integers(min_nodes, max_nodes))
    m = draw(st.integers(0, max_edges))
    edges = []
    for _ in range(m):
        size = draw(st.integers(1, min(max_size, n)))
        edges.append(draw(st.lists(st.integers(0, n - 1), min_size=size, max_size=size,
                                   unique=True)))
    ew = [draw(st.integers(1, 5)) for _ in edges] if weighted and edges else None
    nw = [draw(st.integers(1, 4)) for _ in range(n)] if node_weighted else None
    return Hypergraph.from_edges(edges, num_nodes=n, edge_weights=ew, node_weights=nw)


@st.composite
def hypergraph_and_subset(draw, **kw):
    h = draw(hypergraphs(**kw))
    mask = np.array(draw(st.lists(st.booleans(), min_size=h.num_nodes, max_size=h.num_nodes)))
    return h, mask


@pytest.fixture
def path4():
    return Hypergraph.from_edges([[0, 1], [1, 2], [2, 3]])


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion; lines are echoed in the terminal summary."""
    def report(n, name, ok, detail=""):
        status = "SKIP" if ok is None else "PASS" if ok else "FAIL"
        line = f"{status}  criterion {n:>2}  {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
