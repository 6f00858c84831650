import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from clustertest.estimators import (
    collision_rate,
    cross_collision_rate,
    inner_product_estimate,
    l2_norm_tester,
    median_batches,
    norm_tester_floor,
    required_samples,
)

samples = st.lists(st.integers(0, 9), min_size=2, max_size=40)


def pair_count(xs):
    pairs = list(itertools.combinations(xs, 2))
    return sum(a == b for a, b in pairs) / len(pairs)


def cross_count(xs, ys):
    return sum(a == b for a in xs for b in ys) / (len(xs) * len(ys))


def test_collision_examples():
    assert collision_rate(np.array([0, 0, 0])) == 1.0
    assert collision_rate(np.arange(5)) == 0.0
    assert collision_rate(np.array([1, 1, 2, 2])) == pytest.approx(2 / 6)
    with pytest.raises(ValueError):
        collision_rate(np.array([3]))
    with pytest.raises(ValueError):
        collision_rate(np.array([-1, 0]))


def test_cross_examples():
    assert cross_collision_rate([0, 1], [2, 3]) == 0.0
    assert cross_collision_rate([4, 4], [4]) == 1.0
    assert cross_collision_rate([0, 1, 2], [1, 7]) == pytest.approx(1 / 6)
    with pytest.raises(ValueError):
        cross_collision_rate([], [1])


@given(samples)
def test_collision_matches_pair_enumeration(xs):
    assert collision_rate(np.array(xs)) == pytest.approx(pair_count(xs), abs=1e-15)


@given(samples, samples)
def test_cross_matches_double_loop(xs, ys):
    assert cross_collision_rate(np.array(xs), np.array(ys)) == pytest.approx(cross_count(xs, ys), abs=1e-15)


def test_collision_is_unbiased(rng):
    p = np.array([0.5, 0.2, 0.2, 0.1])
    est = [collision_rate(rng.choice(4, size=10, p=p)) for _ in range(20000)]
    assert abs(np.mean(est) - p @ p) < 0.005


def test_cross_is_unbiased(rng):
    p = np.array([0.6, 0.3, 0.1])
    q = np.array([0.2, 0.3, 0.5])
    est = [cross_collision_rate(rng.choice(3, size=8, p=p), rng.choice(3, size=8, p=q)) for _ in range(20000)]
    assert abs(np.mean(est) - p @ q) < 0.005


def test_required_samples_formula():
    assert required_samples(math.exp(-1), 0.1, 1.0) == 10
    assert required_samples(0.1, 0.005, 0.02) == math.ceil(math.sqrt(0.02) / 0.005 * math.log(10))
    assert required_samples(0.1, 0.05, 0.25, c_est=2) == math.ceil(2 * 0.5 / 0.05 * math.log(10))
    for bad in [(0.0, 0.1, 1.0), (1.0, 0.1, 1.0), (0.1, 0.0, 1.0), (0.1, 0.1, 0.0), (0.1, 0.1, 1.5)]:
        with pytest.raises(ValueError):
            required_samples(*bad)


@given(st.floats(1e-6, 0.99), st.floats(1e-4, 1.0), st.floats(1e-4, 1.0))
def test_required_samples_monotone(eta, xi, b):
    n0 = required_samples(eta, xi, b)
    assert n0 >= 1
    assert required_samples(eta / 2, xi, b) >= n0
    assert required_samples(eta, xi / 2, b) >= n0
    assert required_samples(eta, xi, b / 2) <= n0


def test_median_batches():
    assert median_batches(math.exp(-1)) == 8
    assert median_batches(0.1) == math.ceil(8 * math.log(10))
    with pytest.raises(ValueError):
        median_batches(1.0)


def test_inner_product_estimate_checks():
    with pytest.raises(ValueError):
        inner_product_estimate(np.zeros(3, int), np.zeros(4, int))
    with pytest.raises(ValueError):
        inner_product_estimate(np.zeros(10, int), np.zeros(10, int), eta=0.1, xi=0.01, b=1.0)
    assert inner_product_estimate(np.zeros(10, int), np.zeros(10, int)) == 1.0
    with pytest.raises(ValueError):
        inner_product_estimate(np.zeros(4, int), np.zeros(4, int), batches=5)


def test_inner_product_median_batches(rng):
    p = np.full(20, 1 / 20)
    a, b = rng.choice(20, size=4000, p=p), rng.choice(20, size=4000, p=p)
    full = inner_product_estimate(a, b)
    med = inner_product_estimate(a, b, batches=median_batches(0.1))
    assert abs(full - 0.05) < 0.005 and abs(med - 0.05) < 0.01
    # one batch of everything is the plain cross rate
    assert full == cross_collision_rate(a, b)


def test_norm_tester_examples(rng):
    n = 100
    r = norm_tester_floor(n)
    assert r == 160
    uni = l2_norm_tester(rng.integers(0, n, size=4 * r), 16 / n, n)
    assert uni.accept and uni.threshold == 8 / n
    point = l2_norm_tester(np.zeros(r, dtype=int), 16 / n, n)
    assert not point.accept and point.statistic == 1.0
    with pytest.raises(ValueError):
        l2_norm_tester(np.zeros(r - 1, dtype=int), 16 / n, n)


def test_shifted_two_point_needs_larger_constant():
    # <p, q> = 1/4 with p, q on overlapping two-point supports: at c_est = 1 the
    # estimate is a product of two binomial fractions and misses +-xi too often;
    # c_est = 6 restores the 1 - eta guarantee
    rng = np.random.default_rng(3)
    p, q = np.array([0.5, 0.5, 0.0]), np.array([0.0, 0.5, 0.5])

    def rate(c):
        N = required_samples(0.1, 0.05, 0.5, c_est=c)
        hits = [abs(inner_product_estimate(rng.choice(3, N, p=p), rng.choice(3, N, p=q)) - 0.25) <= 0.05
                for _ in range(1000)]
        return np.mean(hits)

    assert rate(1) < 0.75
    assert rate(6) >= 0.9
