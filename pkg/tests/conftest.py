import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pathcast.dsl import parse_curriculum
from pathcast.fixtures import msc_is_source, tiny_source
from pathcast.markov import ProbabilityAssignment, edge_outcome
from pathcast.pathspace import build_state_graph


@pytest.fixture(scope="session")
def msc():
    return parse_curriculum(msc_is_source())


@pytest.fixture(scope="session")
def msc_graph(msc):
    return build_state_graph(msc)


@pytest.fixture(scope="session")
def tiny():
    return parse_curriculum(tiny_source())


@pytest.fixture(scope="session")
def tiny_graph(tiny):
    return build_state_graph(tiny)


def flat_assignment(graph, dropout=0.1, repeat=0.2):
    """Same dropout/repeat share at every active state, advance mass split
    evenly over the advance edges; the start state splits evenly too."""
    rows = {}
    for state in [graph.start_index, *graph.active_indices]:
        edges = graph.out_edges(state)
        advances = [e for e in edges if e.kind == "advance"]
        row = {}
        if graph.states[state].tag == "start":
            for e in advances:
                row[edge_outcome(e)] = 1.0 / len(advances)
        else:
            for e in advances:
                row[edge_outcome(e)] = (1.0 - dropout - repeat) / len(advances)
            row[("repeat", ())] = repeat
            row[("dropout", ())] = dropout
        rows[state] = row
    a = ProbabilityAssignment(rows=rows)
    a.validate_against(graph)
    return a


@pytest.fixture()
def msc_assignment(msc_graph):
    return flat_assignment(msc_graph)


@pytest.fixture()
def tiny_assignment(tiny_graph):
    return flat_assignment(tiny_graph)


# -- acceptance reporting ------------------------------------------------------

_acceptance_results: list[tuple[str, str]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and "test_acceptance" in item.nodeid:
        _acceptance_results.append((item.name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in _acceptance_results:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")
