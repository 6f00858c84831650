"""Collision statistics over vertex samples.

``collision_rate`` estimates ||p||^2 from one sample set, ``cross_collision_rate``
estimates <p, q> from two.  Both are unbiased.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def _counts(samples: np.ndarray, minlength: int = 0) -> np.ndarray:
    samples = np.asarray(samples, dtype=np.int64)
    if samples.size and samples.min() < 0:
        raise ValueError("samples must be nonnegative vertex ids")
    return np.bincount(samples, minlength=minlength)


def collision_rate(samples: np.ndarray) -> float:
    """Fraction of unordered sample pairs that coincide."""
    r = len(samples)
    if r < 2:
        raise ValueError("need at least two samples")
    c = _counts(samples).astype(np.float64)
    return float(np.sum(c * (c - 1.0)) / (r * (r - 1.0)))


def cross_collision_rate(samples_p: np.ndarray, samples_q: np.ndarray) -> float:
    """#{(i, j): samples_p[i] == samples_q[j]} / (|p| * |q|)."""
    if len(samples_p) == 0 or len(samples_q) == 0:
        raise ValueError("empty sample set")
    cp = _counts(samples_p)
    cq = _counts(samples_q)
    m = min(len(cp), len(cq))
    hits = float(np.dot(cp[:m].astype(np.float64), cq[:m].astype(np.float64)))
    return hits / (len(samples_p) * float(len(samples_q)))


@dataclass(frozen=True)
class NormTestResult:
    accept: bool
    statistic: float
    threshold: float


def norm_tester_floor(n: int) -> int:
    return math.ceil(16.0 * math.sqrt(n))


def l2_norm_tester(samples: np.ndarray, sigma: float, n: int) -> NormTestResult:
    """Accept iff the collision rate is below sigma/2.

    Meant to accept when ||p||^2 <= sigma/4 and reject when ||p||^2 >= sigma;
    either mistake has probability at most 16 sqrt(n) / r.
    """
    r = len(samples)
    if r < 16.0 * math.sqrt(n):
        raise ValueError(f"norm tester needs r >= 16 sqrt(n) = {16.0 * math.sqrt(n):.1f}, got {r}")
    c = collision_rate(samples)
    return NormTestResult(bool(c < sigma / 2.0), c, sigma / 2.0)


def required_samples(eta: float, xi: float, b: float, c_est: float = 1.0) -> int:
    """ceil(c_est * sqrt(b) / xi * ln(1/eta))."""
    if not 0.0 < eta < 1.0:
        raise ValueError("eta must lie in (0, 1)")
    if not xi > 0.0:
        raise ValueError("xi must be positive")
    if not 0.0 < b <= 1.0:
        raise ValueError("b must lie in (0, 1]")
    if not c_est > 0.0:
        raise ValueError("c_est must be positive")
    return math.ceil(c_est * math.sqrt(b) / xi * math.log(1.0 / eta))


def median_batches(eta: float) -> int:
    """Median-of-means batch count ceil(8 ln(1/eta)) for constant-to-(1-eta) boosting."""
    if not 0.0 < eta < 1.0:
        raise ValueError("eta must lie in (0, 1)")
    return math.ceil(8.0 * math.log(1.0 / eta))


def inner_product_estimate(
    samples_p: np.ndarray,
    samples_q: np.ndarray,
    eta: float | None = None,
    xi: float | None = None,
    b: float | None = None,
    c_est: float = 1.0,
    batches: int = 1,
) -> float:
    """Estimate <p, q> from equally many samples of each distribution.

    With ``batches=1`` (default) this is the cross-collision rate over all
    N^2 pairs.  With ``batches=K`` the samples are cut into K aligned blocks
    and the median of the per-block rates is returned.  When ``eta``, ``xi``
    and ``b`` are all given, N is checked against :func:`required_samples`.
    """
    samples_p = np.asarray(samples_p)
    samples_q = np.asarray(samples_q)
    N = len(samples_p)
    if len(samples_q) != N:
        raise ValueError("sample batches must have equal size")
    if eta is not None and xi is not None and b is not None:
        need = required_samples(eta, xi, b, c_est)
        if N < need:
            raise ValueError(f"need at least {need} samples, got {N}")
    if batches < 1 or batches > N:
        raise ValueError("batch count must lie in 1..N")
    if batches == 1:
        return cross_collision_rate(samples_p, samples_q)
    size = N // batches
    rates = [
        cross_collision_rate(samples_p[i * size : (i + 1) * size], samples_q[i * size : (i + 1) * size])
        for i in range(batches)
    ]
    return float(np.median(rates))
