import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from clustertest.errors import GuardExceeded
from clustertest.graph import Graph
from clustertest.walks import (
    apply_walk,
    center,
    empirical_distribution,
    exact_distribution,
    exact_distributions,
    lazy_step,
    sample_endpoint,
    sample_endpoints,
    total_variation,
    walk_batch,
)

from conftest import cycle, dumbbell, path, random_graph


def dense_walk_matrix(g: Graph) -> np.ndarray:
    """M = I - (D - A)/(2d) from networkx's Laplacian, as an outside reference."""
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    L = nx.laplacian_matrix(h, nodelist=range(g.n)).toarray().astype(float)
    return np.eye(g.n) - L / (2 * g.d)


def freq(samples, n):
    return np.bincount(samples, minlength=n) / len(samples)


def test_lazy_step_p2(rng):
    g = path(2)
    f = freq([lazy_step(g, 0, rng) for _ in range(20000)], 2)
    assert abs(f[1] - 0.5) < 0.02
    assert g.query_count <= 20000


def test_lazy_step_isolated_vertex(rng):
    g = Graph(1, 0, [[]])
    assert all(lazy_step(g, 0, rng) == 0 for _ in range(100))
    assert g.query_count == 0
    g = Graph.from_edges(3, 2, [(0, 1)])
    assert all(lazy_step(g, 2, rng) == 2 for _ in range(200))


def test_lazy_step_c4(rng):
    g = cycle(4)
    f = freq([lazy_step(g, 0, rng) for _ in range(40000)], 4)
    assert np.allclose(f, [0.5, 0.25, 0.0, 0.25], atol=0.015)


def test_step_issues_at_most_one_probe(rng):
    g = dumbbell()
    for i in range(500):
        before = g.query_count
        lazy_step(g, i % 8, rng)
        assert g.query_count - before <= 1


def test_sample_endpoint_t0(rng):
    g = cycle(5)
    assert sample_endpoint(g, 3, 0, rng) == 3
    assert g.query_count == 0
    assert (sample_endpoints(g, 3, 0, 10, rng) == 3).all()


def test_sample_endpoint_p2(rng):
    g = path(2)
    f = freq([sample_endpoint(g, 0, 1, rng) for _ in range(20000)], 2)
    assert np.allclose(f, [0.5, 0.5], atol=0.02)


def test_sample_endpoint_c4_one_step(rng):
    g = cycle(4)
    f = freq(sample_endpoints(g, 0, 1, 100000, rng), 4)
    assert np.allclose(f, [0.5, 0.25, 0.0, 0.25], atol=0.01)


def test_negative_t_rejected(rng):
    with pytest.raises(ValueError):
        sample_endpoint(cycle(4), 0, -1, rng)
    with pytest.raises(ValueError):
        sample_endpoints(cycle(4), 0, -1, 3, rng)


def test_endpoint_query_budget(rng):
    g = dumbbell()
    sample_endpoints(g, 0, 30, 1000, rng)
    q = g.query_count
    assert q <= 30 * 1000
    # each step probes with probability 1/2
    assert abs(q / 30000 - 0.5) < 0.02


def test_batch_matches_scalar_sampler():
    g = dumbbell()
    a = freq(sample_endpoints(g, 2, 6, 60000, np.random.default_rng(1)), 8)
    r = np.random.default_rng(2)
    b = freq([sample_endpoint(g, 2, 6, r) for _ in range(20000)], 8)
    exact = exact_distribution(g, 2, 6)
    assert total_variation(a, exact) < 0.015
    assert total_variation(b, exact) < 0.025


def test_walk_batch_mixed_starts(rng):
    g = dumbbell()
    starts = np.repeat([0, 7], 50000)
    ends = walk_batch(g, starts, 4, rng)
    assert total_variation(freq(ends[:50000], 8), exact_distribution(g, 0, 4)) < 0.015
    assert total_variation(freq(ends[50000:], 8), exact_distribution(g, 7, 4)) < 0.015


def test_sampling_deterministic_under_seed():
    g = cycle(9)
    a = sample_endpoints(g, 0, 17, 500, np.random.default_rng(7))
    b = sample_endpoints(g, 0, 17, 500, np.random.default_rng(7))
    assert np.array_equal(a, b)


def test_exact_examples():
    assert np.allclose(exact_distribution(cycle(4), 2, 0), [0, 0, 1, 0])
    assert np.allclose(exact_distribution(path(2), 0, 1), [0.5, 0.5])
    assert np.allclose(exact_distribution(cycle(4), 0, 2), [3 / 8, 1 / 4, 1 / 8, 1 / 4])


def test_exact_guard():
    g = Graph(100_001, 0, [[] for _ in range(100_001)])
    with pytest.raises(GuardExceeded):
        exact_distribution(g, 0, 1)


def test_center_examples():
    assert np.allclose(center(np.full(7, 1 / 7)), 0)
    assert np.allclose(center([1.0, 0.0]), [0.5, -0.5])
    assert np.allclose(center([3 / 8, 1 / 4, 1 / 8, 1 / 4]), [1 / 8, 0, -1 / 8, 0])


def test_empirical_distribution():
    assert np.allclose(empirical_distribution(np.array([0, 0, 2, 1]), 4), [0.5, 0.25, 0.25, 0])


@given(st.integers(2, 12), st.integers(1, 4), st.integers(0, 2**32 - 1), st.integers(0, 25))
def test_exact_against_dense_reference(n, d, seed, t):
    g = random_graph(np.random.default_rng(seed), n, d)
    M = dense_walk_matrix(g)
    P = np.linalg.matrix_power(M, t)
    u = seed % n
    p = exact_distribution(g, u, t)
    assert np.allclose(p, P[:, u], atol=1e-12)
    assert np.allclose(exact_distributions(g, t), P, atol=1e-12)
    assert np.allclose(apply_walk(g, np.eye(n)), M, atol=1e-15)


@given(st.integers(2, 12), st.integers(1, 4), st.integers(0, 2**32 - 1), st.integers(0, 30))
def test_distribution_invariants(n, d, seed, t):
    g = random_graph(np.random.default_rng(seed), n, d)
    u = seed % n
    p = exact_distribution(g, u, t)
    p_next = apply_walk(g, p)
    assert (p >= -1e-15).all() and abs(p.sum() - 1) < 1e-12
    assert np.linalg.norm(p_next) <= np.linalg.norm(p) + 1e-12
    q = center(p)
    assert abs(q.sum()) < 1e-10
    assert abs(q @ q - (p @ p - 1 / n)) < 1e-12
    assert (q >= -1 / n - 1e-12).all() and (q <= 1 - 1 / n + 1e-12).all()
    e = np.zeros(n)
    e[u] = 1.0
    qe = center(e)
    for _ in range(t):
        qe = apply_walk(g, qe)
    assert np.allclose(q, qe, atol=1e-10)
