import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from clustertest.graph import Graph

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def complete(n: int) -> Graph:
    return Graph.from_edges(n, n - 1, [(i, j) for i in range(n) for j in range(i + 1, n)])


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, 2, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    return Graph.from_edges(n, 2 if n > 2 else 1, [(i, i + 1) for i in range(n - 1)])


def dumbbell() -> Graph:
    """Two K4's joined by the edge 3-4, degree bound 4."""
    edges = [(i, j) for i in range(4) for j in range(i + 1, 4)]
    edges += [(i + 4, j + 4) for i in range(4) for j in range(i + 1, 4)]
    edges.append((3, 4))
    return Graph.from_edges(8, 4, edges)


def random_graph(rng: np.random.Generator, n: int, d: int, p: float = 0.5) -> Graph:
    """Random simple graph with max degree <= d (greedy edge acceptance)."""
    deg = np.zeros(n, dtype=int)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p and deg[i] < d and deg[j] < d:
                edges.append((i, j))
                deg[i] += 1
                deg[j] += 1
    return Graph.from_edges(n, d, edges)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# -- acceptance reporting --------------------------------------------------------

_criteria = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """record(name, ok, detail) files one pass/fail line for the terminal summary."""
    store = request.config.stash.setdefault(_criteria, {})
    seen = []

    def record(name: str, ok: bool, detail: str = "") -> bool:
        store[name] = (bool(ok), detail)
        seen.append(name)
        return bool(ok)

    yield record
    if not seen:
        store[request.node.name] = (False, "did not complete")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(_criteria, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(store, key=lambda s: (len(s), s)):
        ok, detail = store[name]
        terminalreporter.write_line(f"{name}: {'PASS' if ok else 'FAIL'}  {detail}")
