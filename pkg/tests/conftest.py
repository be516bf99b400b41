import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from simpush.graph import DirectedGraph  # noqa: E402

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    _ACCEPTANCE[marker.args[0]] = "PASS" if call.excinfo is None else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[0][1:])):
        terminalreporter.write_line(f"{_ACCEPTANCE[label]:4}  {label}")


@pytest.fixture
def two_cycle():
    return DirectedGraph.from_edges([(0, 1), (1, 0)])


@pytest.fixture
def meeting_graph():
    """Query 0; level 1 {1, 2}; level 2 {3 (non-attention), 4}; level 3 {5, 6}.

    With c = 0.6 and eps_h = 0.2 the attention occurrences are 1, 2 on
    level 1, 4 on level 2 and 5 on level 3. Node 1 has in-neighbours 3, 4;
    node 3 has the single in-neighbour 5; node 4 has in-neighbours 5, 6.
    """
    edges = [(1, 0), (2, 0), (3, 1), (4, 1), (4, 2), (5, 3), (5, 4), (6, 4)]
    return DirectedGraph.from_edges(edges)


@pytest.fixture
def revisit_graph():
    """Query 0 with node 3 reachable on level 1 and again on level 3."""
    edges = [(1, 0), (2, 0), (3, 0),
             (4, 1), (5, 1), (5, 2), (6, 2), (6, 3), (7, 3),
             (8, 4), (8, 5), (9, 6), (3, 7)]
    return DirectedGraph.from_edges(edges)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
