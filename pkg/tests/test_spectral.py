import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from clustertest.errors import GuardExceeded
from clustertest.graph import Graph, graph_conductance_bruteforce
from clustertest.spectral import (
    NoConvergence,
    cheeger_bounds,
    eig2,
    eigendecompose,
    gram2,
    graph_spectrum,
    interlacing_check,
    interlacing_margins,
    laplacian,
    project_heavy,
    walk_matrix,
    weyl_check,
)

from conftest import complete, cycle, dumbbell, path, random_graph


def test_walk_matrix_examples():
    assert np.allclose(walk_matrix(path(2)), [[0.5, 0.5], [0.5, 0.5]])
    assert np.allclose(walk_matrix(Graph(1, 0, [[]])), [[1.0]])
    M = walk_matrix(cycle(4))
    want = np.array([[2, 1, 0, 1], [1, 2, 1, 0], [0, 1, 2, 1], [1, 0, 1, 2]]) / 4
    assert np.allclose(M, want)


def test_laplacian_examples():
    assert np.allclose(laplacian(path(2)), [[1, -1], [-1, 1]])
    L = laplacian(complete(4))
    assert np.allclose(np.diag(L), 1) and np.allclose(L[0, 1], -1 / 3)
    assert np.allclose(laplacian(Graph(3, 2, [[], [], []])), 0)
    assert np.allclose(laplacian(Graph(3, 0, [[], [], []])), 0)


def test_dense_guard():
    g = Graph(4097, 0, [[] for _ in range(4097)])
    with pytest.raises(GuardExceeded):
        walk_matrix(g)


@given(st.integers(1, 14), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_matrix_identities(n, d, seed):
    g = random_graph(np.random.default_rng(seed), n, d)
    M, L = walk_matrix(g), laplacian(g)
    A = np.zeros((n, n))
    for u, v in g.edges():
        A[u, v] = A[v, u] = 1
    D = np.diag(A.sum(axis=1))
    assert np.array_equal(L + 2 * M, 2 * np.eye(n))
    assert np.abs(L - (D - A) / d).max() < 1e-12
    assert np.allclose(M, M.T) and np.allclose(M.sum(axis=0), 1)


def test_eigendecompose_small_examples():
    assert np.allclose(eigendecompose(np.array([[2.0, 1.0], [1.0, 2.0]])).eigenvalues, [1, 3])
    assert np.allclose(eigendecompose(np.eye(5)).eigenvalues, 1)


@pytest.mark.parametrize("n", [3, 8, 17, 64])
def test_jacobi_cycle_closed_form(n):
    s = eigendecompose(walk_matrix(cycle(n)), method="jacobi")
    want = np.sort(0.5 + np.cos(2 * np.pi * np.arange(n) / n) / 2)
    assert np.abs(s.eigenvalues - want).max() < 1e-10


def test_eigendecompose_errors():
    with pytest.raises(ValueError):
        eigendecompose(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        eigendecompose(np.ones((2, 3)))
    with pytest.raises(NoConvergence):
        eigendecompose(np.array([[1.0, 0.5], [0.5, 2.0]]), max_sweeps=0, method="jacobi")


@given(st.integers(1, 40), st.integers(0, 2**32 - 1))
def test_jacobi_matches_lapack(n, seed):
    rng = np.random.default_rng(seed)
    B = rng.normal(size=(n, n))
    B = (B + B.T) / 2
    s = eigendecompose(B, method="jacobi")
    assert np.allclose(s.eigenvalues, np.linalg.eigvalsh(B), atol=1e-10)
    V = s.eigenvectors
    assert np.abs(V.T @ V - np.eye(n)).max() < 1e-10
    assert np.abs(B @ V - V * s.eigenvalues).max() < 1e-9
    # first nonzero coordinate of each eigenvector is positive
    for j in range(n):
        nz = np.flatnonzero(np.abs(V[:, j]) > 1e-12)
        assert V[nz[0], j] > 0


@given(st.integers(3, 14), st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_graph_spectrum_invariants(n, d, seed):
    g = random_graph(np.random.default_rng(seed), n, d, p=0.4)
    s = graph_spectrum(g)
    lam = s.eigenvalues
    assert lam[0] == 0 and (np.diff(lam) >= -1e-12).all() and lam[-1] <= 2 + 1e-8
    assert np.allclose(s.vector(1), np.full(n, 1 / math.sqrt(n)), atol=1e-8)
    V = s.eigenvectors
    assert np.abs(V @ V.T - np.eye(n)).max() < 1e-8
    assert np.abs(laplacian(g) @ V - V * lam).max() < 1e-8
    assert np.allclose(s.nu, 1 - lam / 2)


def test_graph_spectrum_disconnected_pins_v1():
    g = Graph.from_edges(6, 2, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    s = graph_spectrum(g)
    assert np.allclose(s.eigenvalues[:2], 0)
    assert np.allclose(s.vector(1), 1 / math.sqrt(6))
    assert abs(s.vector(2).sum()) < 1e-10


def test_project_heavy_examples(rng):
    s = graph_spectrum(cycle(6))
    x = rng.normal(size=6)
    assert np.allclose(project_heavy(s, -1.0, x), x)
    assert np.allclose(project_heavy(s, 1.0, x), 0)
    p2 = graph_spectrum(path(2))
    assert np.allclose(project_heavy(p2, 0.9, np.array([0.3, -0.3])), 0)
    with pytest.raises(ValueError):
        project_heavy(s, 0.5, np.ones(5))


@given(st.integers(2, 12), st.integers(0, 2**32 - 1), st.floats(0.0, 1.0))
def test_projection_properties(n, seed, thr):
    rng = np.random.default_rng(seed)
    s = graph_spectrum(random_graph(rng, n, 3))
    x, y = rng.normal(size=n), rng.normal(size=n)
    px = project_heavy(s, thr, x)
    assert np.allclose(project_heavy(s, thr, px), px, atol=1e-10)
    assert abs(px @ y - x @ project_heavy(s, thr, y)) < 1e-10
    assert np.linalg.norm(px) <= np.linalg.norm(x) + 1e-10


def test_gram2_examples():
    g = gram2(np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    assert np.allclose([g.eig_min, g.eig_max], [1, 1])
    g = gram2(np.array([1.0, 0.0]), np.array([1.0, 0.0]))
    assert np.allclose([g.eig_min, g.eig_max], [0, 2])
    g = gram2(np.array([1.0, 0.0]), np.array([1.0, 1.0]) / math.sqrt(2))
    r = 1 / math.sqrt(2)
    assert np.allclose([g.eig_min, g.eig_max], [1 - r, 1 + r])
    assert np.allclose(g.entries, [[1, r], [r, 1]])
    with pytest.raises(ValueError):
        gram2(np.ones(2), np.ones(3))


@given(st.integers(1, 8), st.integers(0, 2**32 - 1), st.floats(1e-12, 1.0))
def test_gram2_matches_singular_values(dim, seed, spread):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=dim)
    b = rng.choice([-1, 1]) * a + spread * rng.normal(size=dim)
    g = gram2(a, b)
    sv = np.linalg.svd(np.column_stack([a, b]), compute_uv=False)
    k2 = sv[1] if len(sv) > 1 else 0.0
    assert g.eig_min >= -1e-12
    assert abs(g.eig_min - k2**2) < 1e-10
    assert abs(g.eig_max - sv[0] ** 2) < 1e-9 * max(1.0, sv[0] ** 2)


def test_eig2_near_rank_one_is_accurate():
    # [[1, 1], [1, 1 + h]] has eigenvalues h/2 + 1 -+ sqrt(1 + h^2/4); small one ~ h/2
    h = 1e-12
    lo, hi = eig2(1.0, 1.0, 1.0 + h)
    assert abs(lo - h / 2) < 1e-3 * h
    assert abs(hi - 2) < 1e-12


def test_weyl_examples():
    assert weyl_check(np.diag([1.0, 2.0]), np.diag([1.1, 2.1]))
    B = np.array([[1.0, 0.3], [0.3, -2.0]])
    assert weyl_check(B, B)
    with pytest.raises(ValueError):
        weyl_check(np.eye(2), np.eye(3))


def test_weyl_random_pairs(rng):
    for _ in range(100):
        B = rng.normal(size=(10, 10))
        B = B + B.T
        E = rng.normal(size=(10, 10)) * rng.uniform(1e-6, 1.0)
        assert weyl_check(B, B + E + E.T, method="jacobi")


def test_interlacing_examples():
    assert interlacing_check(path(2), 3)
    assert interlacing_margins(path(2), 3) is None
    g = dumbbell()
    lo, bound = interlacing_margins(g, 4)
    assert lo.size == 28
    assert interlacing_check(g, 4)
    assert interlacing_check(cycle(8), 2)
    assert interlacing_check(cycle(8), 2, pairs=[(0, 4), (1, 2)])


def test_interlacing_against_spectral_form():
    # A_uv read off M^(2t) - J/n must equal the spectral expansion without v_1
    g, t = dumbbell(), 3
    s = graph_spectrum(g)
    V, nu = s.eigenvectors, s.nu
    G = (V[:, 1:] * nu[1:] ** (2 * t)) @ V[:, 1:].T
    lo, _ = interlacing_margins(g, t, pairs=[(0, 7)])
    assert abs(lo[0] - gram2(*np.linalg.cholesky(np.array([[G[0, 0], G[0, 7]], [G[0, 7], G[7, 7]]])).T).eig_min) < 1e-12


def test_cheeger_examples():
    s = graph_spectrum(complete(4))
    assert np.isclose(s.eigenvalues[1], 4 / 3)
    lo, hi = cheeger_bounds(s)
    assert np.isclose(lo, 2 / 3) and np.isclose(hi, math.sqrt(8 / 3))
    disc = Graph.from_edges(4, 1, [(0, 1), (2, 3)])
    assert cheeger_bounds(graph_spectrum(disc)) == (0.0, 0.0)


@given(st.integers(2, 11), st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_cheeger_brackets_bruteforce(n, d, seed):
    g = random_graph(np.random.default_rng(seed), n, d, p=0.6)
    lo, hi = cheeger_bounds(graph_spectrum(g))
    phi = float(graph_conductance_bruteforce(g)[0])
    assert lo <= phi + 1e-9
    assert phi <= hi + 1e-9
