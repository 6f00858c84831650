"""Exact spectral oracle for small graphs.

Everything here is offline: matrices are built from the stored adjacency and
never go through the query counter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Literal

import numpy as np

from .errors import GuardExceeded
from .graph import Graph

DENSE_MAX_N = 4096
# Above this size "auto" hands the eigenproblem to LAPACK; the vectorized
# Jacobi sweep is O(n^3) in Python-dispatched numpy and gets slow past ~128.
JACOBI_AUTO_MAX_N = 128

Method = Literal["auto", "jacobi", "lapack"]


class NoConvergence(RuntimeError):
    pass


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with orthonormal eigenvector columns.

    For a Laplacian spectrum, ``nu`` gives the matching eigenvalues of the
    lazy walk matrix, ``1 - lambda/2``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    @property
    def nu(self) -> np.ndarray:
        return 1.0 - self.eigenvalues / 2.0

    def vector(self, i: int) -> np.ndarray:
        """The i-th eigenvector, 1-based as in v_1..v_n."""
        return self.eigenvectors[:, i - 1]


def _check_guard(n: int, guard: int = DENSE_MAX_N) -> None:
    if n > guard:
        raise GuardExceeded(f"dense spectral computation needs n <= {guard}, got {n}")


def walk_matrix(g: Graph, guard: int = DENSE_MAX_N) -> np.ndarray:
    _check_guard(g.n, guard)
    M = np.zeros((g.n, g.n))
    if g.n == 0:
        return M
    if g.d == 0:
        return np.eye(g.n)
    M += g.adjacency_matrix() / (2.0 * g.d)
    M[np.diag_indices(g.n)] = 1.0 - g.degrees / (2.0 * g.d)
    return M


def laplacian(g: Graph, guard: int = DENSE_MAX_N) -> np.ndarray:
    """L = 2I - 2M, which equals (D - A)/d."""
    return 2.0 * np.eye(g.n) - 2.0 * walk_matrix(g, guard)


@lru_cache(maxsize=None)
def _round_robin(m: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Circle-method schedule: m-1 rounds of m/2 disjoint index pairs."""
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        a = np.array(players[: m // 2])
        b = np.array(players[m // 2 :][::-1])
        rounds.append((np.minimum(a, b), np.maximum(a, b)))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _jacobi(A: np.ndarray, tol: float, max_sweeps: int) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi with round-robin ordering.

    Each round rotates m/2 disjoint (p, q) planes at once, so one sweep still
    annihilates every off-diagonal pair exactly once.
    """
    n = A.shape[0]
    m = n + (n % 2)
    A = np.array(A, dtype=float)
    if m != n:
        A = np.pad(A, ((0, 1), (0, 1)))
    V = np.eye(m)
    if n <= 1:
        return np.diag(A)[:n].copy(), V[:n, :n]
    threshold = tol * max(1.0, float(np.linalg.norm(A)))
    polish = False
    sweeps = 0
    while True:
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if polish or off == 0.0:
            return np.diag(A)[:n].copy(), V[:n, :n]
        if off <= threshold:
            # convergence is quadratic, so one more sweep sharpens the
            # eigenvectors well past tol for almost no cost
            polish = True
        elif sweeps >= max_sweeps:
            raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal {off:.3e})")
        sweeps += 1
        for p, q in _round_robin(m):
            app = A[p, p]
            aqq = A[q, q]
            apq = A[p, q]
            live = apq != 0.0
            tau = np.where(live, (aqq - app) / (2.0 * np.where(live, apq, 1.0)), 0.0)
            tan = np.where(tau >= 0.0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
            tan = np.where(live, tan, 0.0)
            c = 1.0 / np.sqrt(1.0 + tan * tan)
            s = tan * c
            Ap = A[:, p].copy()
            Aq = A[:, q]
            A[:, p] = c * Ap - s * Aq
            A[:, q] = s * Ap + c * Aq
            Ap = A[p, :].copy()
            Aq = A[q, :]
            A[p, :] = c[:, None] * Ap - s[:, None] * Aq
            A[q, :] = s[:, None] * Ap + c[:, None] * Aq
            Vp = V[:, p].copy()
            Vq = V[:, q]
            V[:, p] = c * Vp - s * Vq
            V[:, q] = s * Vp + c * Vq


def _fix_signs(V: np.ndarray, eps: float = 1e-12) -> np.ndarray:
    V = V.copy()
    for j in range(V.shape[1]):
        nz = np.flatnonzero(np.abs(V[:, j]) > eps)
        if len(nz) and V[nz[0], j] < 0:
            V[:, j] = -V[:, j]
    return V


def eigendecompose(
    A: np.ndarray,
    tol: float = 1e-10,
    max_sweeps: int = 100,
    method: Method = "auto",
) -> Spectrum:
    """Eigenpairs of a symmetric matrix, eigenvalues ascending.

    ``method="jacobi"`` runs the cyclic Jacobi solver (``tol`` bounds the
    final off-diagonal Frobenius norm, relative to max(1, ||A||_F));
    ``"lapack"`` calls numpy's symmetric solver; ``"auto"`` picks Jacobi up
    to :data:`JACOBI_AUTO_MAX_N`.  Eigenvector signs are normalized so the
    first nonzero coordinate is positive.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    if A.size and np.max(np.abs(A - A.T)) > 1e-12:
        raise ValueError("matrix is not symmetric")
    if method == "auto":
        method = "jacobi" if A.shape[0] <= JACOBI_AUTO_MAX_N else "lapack"
    if method == "jacobi":
        w, V = _jacobi(A, tol, max_sweeps)
    elif method == "lapack":
        w, V = np.linalg.eigh(A)
    else:
        raise ValueError(f"unknown method {method!r}")
    order = np.argsort(w, kind="stable")
    return Spectrum(w[order], _fix_signs(V[:, order]))


def graph_spectrum(g: Graph, method: Method = "auto", guard: int = DENSE_MAX_N) -> Spectrum:
    """Spectrum of L with v_1 pinned to the normalized all-ones vector.

    For a disconnected graph the zero eigenspace has dimension > 1 and a
    solver may return any basis of it; we rotate that basis so its first
    vector is 1/sqrt(n) and the rest are orthogonal to it.
    """
    s = eigendecompose(laplacian(g, guard), method=method)
    n = g.n
    if n == 0:
        return s
    lam = np.clip(s.eigenvalues, 0.0, None)
    lam[0] = 0.0
    V = s.eigenvectors.copy()
    zero = np.flatnonzero(s.eigenvalues < 1e-9)
    if len(zero) == 0:
        zero = np.array([0])
    k = len(zero)
    V0 = V[:, zero]
    ones = np.full(n, 1.0 / math.sqrt(n))
    c = V0.T @ ones
    # orthonormal basis of R^k whose first vector is c/|c|
    Q, _ = np.linalg.qr(np.column_stack([c, np.eye(k)]))
    Q = Q[:, :k]
    if Q[:, 0] @ c < 0:
        Q[:, 0] = -Q[:, 0]
    V[:, zero] = V0 @ Q
    V[:, zero[0]] = ones
    return Spectrum(lam, _fix_signs(V))


def project_heavy(s: Spectrum, nu_threshold: float, x: np.ndarray) -> np.ndarray:
    """Projection onto eigenvectors of M whose eigenvalue exceeds ``nu_threshold``."""
    x = np.asarray(x, dtype=float)
    if x.shape[0] != s.n:
        raise ValueError("vector length does not match spectrum")
    heavy = s.nu > nu_threshold
    Vh = s.eigenvectors[:, heavy]
    return Vh @ (Vh.T @ x)


@dataclass(frozen=True)
class Gram2:
    entries: np.ndarray
    eig_min: float
    eig_max: float


def eig2(a11: float, a12: float, a22: float) -> tuple[float, float]:
    """Eigenvalues (min, max) of [[a11, a12], [a12, a22]] in closed form.

    The small root is recovered as det/max when possible; the textbook
    tr/2 - sqrt(...) cancels badly for nearly rank-one matrices.
    """
    half_tr = 0.5 * (a11 + a22)
    disc = math.hypot(0.5 * (a11 - a22), a12)
    hi = half_tr + disc
    det = a11 * a22 - a12 * a12
    if hi > 0 and half_tr >= 0:
        lo = det / hi
    else:
        lo = half_tr - disc
    return lo, hi


def eig2_batch(a11: np.ndarray, a12: np.ndarray, a22: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    half_tr = 0.5 * (a11 + a22)
    disc = np.hypot(0.5 * (a11 - a22), a12)
    hi = half_tr + disc
    det = a11 * a22 - a12 * a12
    safe = (hi > 0) & (half_tr >= 0)
    lo = np.where(safe, det / np.where(safe, hi, 1.0), half_tr - disc)
    return lo, hi


def gram2(a: np.ndarray, b: np.ndarray) -> Gram2:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("vectors must have equal length")
    aa, ab, bb = float(a @ a), float(a @ b), float(b @ b)
    lo, hi = eig2(aa, ab, bb)
    return Gram2(np.array([[aa, ab], [ab, bb]]), lo, hi)


def weyl_check(B: np.ndarray, B_perturbed: np.ndarray, method: Method = "auto") -> bool:
    """Check max_i |mu_i - mu~_i| <= ||B - B~||_F (+1e-10) with our eigensolver."""
    B = np.asarray(B, dtype=float)
    Bt = np.asarray(B_perturbed, dtype=float)
    if B.shape != Bt.shape:
        raise ValueError("shape mismatch")
    mu = eigendecompose(B, method=method).eigenvalues
    mu_t = eigendecompose(Bt, method=method).eigenvalues
    return bool(np.max(np.abs(mu - mu_t), initial=0.0) <= np.linalg.norm(B - Bt) + 1e-10)


def _pair_arrays(n: int, pairs: Iterable[tuple[int, int]] | None) -> tuple[np.ndarray, np.ndarray]:
    if pairs is None:
        iu, ju = np.triu_indices(n, k=1)
        return iu, ju
    arr = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
    return arr[:, 0], arr[:, 1]


def interlacing_margins(
    g: Graph, t: int, pairs: Iterable[tuple[int, int]] | None = None, method: Method = "auto"
) -> tuple[np.ndarray, float] | None:
    """eig_min(A_uv) for each pair and the bound nu_3^(2t); None when n < 3.

    A_uv is read off the exact Gram matrix M^(2t) - J/n, built from exact
    walk distributions rather than from the spectrum.
    """
    from .walks import exact_distributions

    _check_guard(g.n)
    if g.n < 3:
        return None
    P = exact_distributions(g, t)
    Q = P - 1.0 / g.n
    G = Q.T @ Q
    iu, ju = _pair_arrays(g.n, pairs)
    lo, _ = eig2_batch(G[iu, iu], G[iu, ju], G[ju, ju])
    nu = np.sort(graph_spectrum(g, method=method).nu)[::-1]
    bound = float(max(nu[2], 0.0) ** (2 * t))
    return lo, bound


def interlacing_check(
    g: Graph, t: int, pairs: Iterable[tuple[int, int]] | None = None, method: Method = "auto"
) -> bool:
    """Every A_uv has eig_min <= nu_3^(2t) (vacuously true for n < 3).

    ``pairs=None`` checks all unordered pairs of distinct vertices.
    """
    res = interlacing_margins(g, t, pairs, method)
    if res is None:
        return True
    lo, bound = res
    return bool(np.all(lo <= bound + 1e-10))


def cheeger_bounds(s: Spectrum) -> tuple[float, float]:
    """(lambda_2/2, sqrt(2 lambda_2)) bracketing phi(G) for L = (D - A)/d."""
    if s.n < 2:
        return math.inf, math.inf
    lam2 = max(float(s.eigenvalues[1]), 0.0)
    if lam2 < 1e-12:
        return 0.0, 0.0
    return lam2 / 2.0, math.sqrt(2.0 * lam2)
