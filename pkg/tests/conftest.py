import numpy as np
import pytest

from qaoa_maxcut.graphs import Graph, sample_erdos_renyi

# filled by test_acceptance.py: criterion id -> (passed, detail)
ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: (int(k.rstrip("ab")), k)):
        passed, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key:<3} {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def edge():
    return Graph.from_edges(2, [(0, 1)])


@pytest.fixture
def triangle():
    return Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def er6():
    return sample_erdos_renyi(6, 0.5, 7)
