"""Collinear, antipodal and podal pairs of vectors.

Two vectors are close to collinear when both can be moved a little onto a
common line through the origin; antipodal when the origin ends up between
them, podal when it does not.  Far-from-collinear is certified through the
segment functional min_alpha ||alpha a + (1 - alpha) b|| and its podal twin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GuardExceeded
from .spectral import eig2

FAR_PAIRS_MAX = 5000
ANGLE_GRID = 1024
REFINE_ITERS = 80

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _segment_from_gram(aa, ab, bb):
    """min over alpha in [0,1] of ||alpha a + (1-alpha) b|| from Gram entries.

    Works elementwise on arrays.  Returns (value, alpha).
    """
    aa = np.asarray(aa, dtype=float)
    ab = np.asarray(ab, dtype=float)
    bb = np.asarray(bb, dtype=float)
    diff = aa - 2.0 * ab + bb  # ||a - b||^2
    pos = diff > 0
    alpha = np.where(pos, (bb - ab) / np.where(pos, diff, 1.0), 0.0)
    alpha = np.clip(alpha, 0.0, 1.0)
    sq = alpha * alpha * aa + 2.0 * alpha * (1.0 - alpha) * ab + (1.0 - alpha) ** 2 * bb
    # the expansion loses ~1e-16 (aa + bb) to rounding; treat that as zero
    sq = np.where(sq <= 1e-14 * (aa + bb), 0.0, sq)
    return np.sqrt(sq), alpha


def min_segment_norm(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    """(min_alpha ||alpha a + (1 - alpha) b||, alpha*) over alpha in [0, 1].

    alpha* = clamp(<b, b - a> / ||a - b||^2, 0, 1), and 0 when a == b.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("vectors must have equal length")
    diff = a - b
    dd = float(diff @ diff)
    alpha = 0.0 if dd == 0.0 else min(max(float(b @ (b - a)) / dd, 0.0), 1.0)
    value = float(np.linalg.norm(alpha * a + (1.0 - alpha) * b))
    return value, alpha


def antipodal_far(a: np.ndarray, b: np.ndarray, eps: float) -> bool:
    return min_segment_norm(a, b)[0] > eps


def podal_far(a: np.ndarray, b: np.ndarray, eps: float) -> bool:
    return min_segment_norm(a, -np.asarray(b, dtype=float))[0] > eps


def kappa2(a: np.ndarray, b: np.ndarray) -> float:
    """Second singular value of the two-column matrix [a b]."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    lo, _ = eig2(float(a @ a), float(a @ b), float(b @ b))
    return math.sqrt(max(lo, 0.0))


def _plane_coords(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates of a and b in an orthonormal basis of span{a, b}."""
    na = float(np.linalg.norm(a))
    if na == 0.0:
        return np.zeros(2), np.array([float(np.linalg.norm(b)), 0.0])
    e1 = a / na
    b1 = float(e1 @ b)
    perp = float(np.linalg.norm(b - b1 * e1))
    if perp <= 1e-14 * float(np.linalg.norm(b)):
        perp = 0.0
    return np.array([na, 0.0]), np.array([b1, perp])


def _line_cost(theta, a2: np.ndarray, b2: np.ndarray):
    c, s = np.cos(theta), np.sin(theta)
    da = np.abs(a2[0] * s - a2[1] * c)
    db = np.abs(b2[0] * s - b2[1] * c)
    return np.maximum(da, db)


def collinear_distance_exact(a: np.ndarray, b: np.ndarray) -> float:
    """min over lines l through 0 of max(dist(a, l), dist(b, l)).

    Both vectors are mapped into their 2-D span, the line angle is scanned
    on a grid over [0, pi), and every grid local minimum is polished with a
    golden-section search on the neighboring cells.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("vectors must have equal length")
    a2, b2 = _plane_coords(a, b)
    if b2[1] == 0.0:
        return 0.0
    h = math.pi / ANGLE_GRID
    grid = np.arange(ANGLE_GRID) * h
    vals = _line_cost(grid, a2, b2)
    left = np.roll(vals, 1)
    right = np.roll(vals, -1)
    minima = np.flatnonzero((vals <= left) & (vals <= right))
    best = float(vals.min())
    for i in minima:
        lo, hi = grid[i] - h, grid[i] + h
        x1 = hi - _INVPHI * (hi - lo)
        x2 = lo + _INVPHI * (hi - lo)
        f1 = float(_line_cost(x1, a2, b2))
        f2 = float(_line_cost(x2, a2, b2))
        for _ in range(REFINE_ITERS):
            if f1 <= f2:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - _INVPHI * (hi - lo)
                f1 = float(_line_cost(x1, a2, b2))
            else:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + _INVPHI * (hi - lo)
                f2 = float(_line_cost(x2, a2, b2))
        best = min(best, f1, f2)
    return best


@dataclass(frozen=True)
class CollinearityCertificate:
    kappa2: float
    m_anti: float
    m_podal: float
    eps: float
    dist_exact: float | None = None

    @property
    def antipodal_far(self) -> bool:
        return self.m_anti > self.eps

    @property
    def podal_far(self) -> bool:
        return self.m_podal > self.eps

    @property
    def far_from_collinear(self) -> bool:
        return self.antipodal_far and self.podal_far


def certify_pair(a: np.ndarray, b: np.ndarray, eps: float, exact: bool = False) -> CollinearityCertificate:
    b = np.asarray(b, dtype=float)
    return CollinearityCertificate(
        kappa2=kappa2(a, b),
        m_anti=min_segment_norm(a, b)[0],
        m_podal=min_segment_norm(a, -b)[0],
        eps=eps,
        dist_exact=collinear_distance_exact(a, b) if exact else None,
    )


def count_far_pairs(
    vectors: np.ndarray, eps: float, guard: int = FAR_PAIRS_MAX, gram: np.ndarray | None = None
) -> tuple[int, list[tuple[int, int]]]:
    """Unordered pairs (u < v) that are eps-far from both antipodal and podal.

    ``vectors`` holds one vector per row.  All segment minima come from the
    Gram matrix, so the work is one matrix product plus O(k^2) arithmetic.
    """
    X = np.asarray(vectors, dtype=float)
    k = X.shape[0] if gram is None else gram.shape[0]
    if k > guard:
        raise GuardExceeded(f"far-pair counting needs at most {guard} vectors, got {k}")
    G = X @ X.T if gram is None else np.asarray(gram, dtype=float)
    iu, ju = np.triu_indices(k, k=1)
    aa, bb, ab = G[iu, iu], G[ju, ju], G[iu, ju]
    anti, _ = _segment_from_gram(aa, ab, bb)
    podal, _ = _segment_from_gram(aa, -ab, bb)
    far = (anti > eps) & (podal > eps)
    pairs = list(zip(iu[far].tolist(), ju[far].tolist()))
    return len(pairs), pairs
