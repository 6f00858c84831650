"""Lazy random walks: oracle-driven sampling and exact distribution evolution.

One step from ``v`` draws ``k`` uniformly from ``1..2d``.  If ``k <= d`` the
walk probes port ``k`` and moves there unless the oracle answers with the
none symbol; if ``k > d`` it stays without probing.  Each neighbor is thus
reached with probability ``1/(2d)`` and the walk stays otherwise, which is
exactly the lazy walk matrix M.
"""

from __future__ import annotations

import numpy as np

from .errors import GuardExceeded
from .graph import Graph

EXACT_MAX_N = 100_000
DENSE_MAX_N = 4096


def lazy_step(g: Graph, v: int, rng: np.random.Generator) -> int:
    k = int(rng.integers(1, 2 * g.d + 1)) if g.d > 0 else 1
    if k > g.d:
        return v
    w = g.neighbor(v, k)
    return v if w is None else w


def sample_endpoint(g: Graph, u: int, t: int, rng: np.random.Generator) -> int:
    if t < 0:
        raise ValueError("walk length must be nonnegative")
    v = u
    for _ in range(t):
        v = lazy_step(g, v, rng)
    return v


def sample_endpoints(g: Graph, u: int, t: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Endpoints of ``count`` independent lazy walks of length ``t`` from ``u``.

    Same step rule as :func:`lazy_step`, advanced for all walkers at once
    through the batched oracle.  At most ``count * t`` probes.
    """
    if not 0 <= u < g.n:
        raise ValueError(f"vertex {u} out of range")
    return walk_batch(g, np.full(count, u, dtype=np.int64), t, rng)


def walk_batch(g: Graph, starts: np.ndarray, t: int, rng: np.random.Generator) -> np.ndarray:
    """Advance one independent lazy walker per entry of ``starts`` by ``t`` steps."""
    if t < 0:
        raise ValueError("walk length must be nonnegative")
    pos = np.array(starts, dtype=np.int64)
    if pos.size and (pos.min() < 0 or pos.max() >= g.n):
        raise ValueError("start vertex out of range")
    count = pos.size
    if t == 0 or count == 0 or g.d == 0:
        return pos
    d = g.d
    # draws are 0-based: port = draw + 1 when draw < d
    chunk = max(1, min(t, (1 << 22) // count))
    done = 0
    while done < t:
        steps = min(chunk, t - done)
        draws = rng.integers(0, 2 * d, size=(steps, count), dtype=np.int16)
        for s in range(steps):
            k = draws[s]
            idx = np.flatnonzero(k < d)
            nb = g.neighbors(pos[idx], k[idx].astype(np.int64) + 1)
            moved = nb >= 0
            pos[idx[moved]] = nb[moved]
        done += steps
    return pos


def apply_walk(g: Graph, p: np.ndarray) -> np.ndarray:
    """One application of M to a vector (or to each column of a matrix); oracle-free."""
    p = np.asarray(p, dtype=float)
    if g.d == 0:
        return p.copy()
    ports = g.port_table
    stay = 1.0 - g.degrees / (2.0 * g.d)
    padded = np.concatenate([p, np.zeros((1,) + p.shape[1:])], axis=0)
    idx = np.where(ports >= 0, ports, g.n)
    moved = padded[idx].sum(axis=1)
    if p.ndim == 1:
        return stay * p + moved / (2.0 * g.d)
    return stay[:, None] * p + moved / (2.0 * g.d)


def exact_distribution(g: Graph, u: int, t: int) -> np.ndarray:
    """p_u^t = M^t 1_u by t sparse applications of M."""
    if g.n > EXACT_MAX_N:
        raise GuardExceeded(f"exact distribution needs n <= {EXACT_MAX_N}")
    if t < 0:
        raise ValueError("walk length must be nonnegative")
    p = np.zeros(g.n)
    p[u] = 1.0
    for _ in range(t):
        p = apply_walk(g, p)
    return p


def exact_distributions(g: Graph, t: int) -> np.ndarray:
    """Matrix whose column u is p_u^t, via repeated squaring of the dense M."""
    from .spectral import walk_matrix

    if g.n > DENSE_MAX_N:
        raise GuardExceeded(f"dense walk powers need n <= {DENSE_MAX_N}")
    return np.linalg.matrix_power(walk_matrix(g), t)


def center(p: np.ndarray) -> np.ndarray:
    """q = p - (1/n) 1."""
    p = np.asarray(p, dtype=float)
    return p - 1.0 / p.shape[0]


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def empirical_distribution(samples: np.ndarray, n: int) -> np.ndarray:
    samples = np.asarray(samples)
    return np.bincount(samples, minlength=n) / max(len(samples), 1)
