import networkx as nx
import pytest

from rendezvous_advice.graph import PortGraph


def to_nx(g: PortGraph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


def nx_dist(g: PortGraph, u: int, v: int) -> int:
    """Independent distance oracle (networkx BFS)."""
    return nx.shortest_path_length(to_nx(g), u, v)


def assert_port_graph(g: PortGraph) -> None:
    for u in range(g.n):
        ports = [p for p in range(g.degree(u))]
        assert ports == list(range(len(g.adj[u])))
        for p, (w, q) in enumerate(g.adj[u]):
            assert g.adj[w][q] == (u, p)
    assert nx.is_connected(to_nx(g))


_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py::test_ac" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")


@pytest.fixture
def ring10():
    from rendezvous_advice.graph import build_oriented_ring

    return build_oriented_ring(10)
