"""Numeric checks of the analysis on small instances.

Every check works from exact walk distributions and exact spectra, never
from the oracle.  Each returns a :class:`LemmaReport`; a report whose
preconditions do not hold is marked not applicable instead of passing.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .geometry import collinear_distance_exact, count_far_pairs, kappa2
from .generators import PlantedInstance, certify, k_cluster, random_regular, two_cluster
from .graph import Graph, cut_conductance
from .spectral import Spectrum, cheeger_bounds, graph_spectrum, interlacing_margins, project_heavy
from .tester import Constants, derive_params
from .walks import exact_distributions

TOL = 1e-9

SUITES = ("gram", "residual", "norm", "aggregate", "far-pairs", "interlacing")


@dataclass
class LemmaReport:
    lemma: str
    instance: str
    measured: dict
    bound: float | None
    margin: float
    applicable: bool = True
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.applicable and self.margin >= -TOL

    @property
    def status(self) -> str:
        if not self.applicable:
            return "n/a"
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        def clean(x):
            if isinstance(x, dict):
                return {k: clean(v) for k, v in x.items()}
            if isinstance(x, (np.floating, np.integer)):
                x = x.item()
            if isinstance(x, float) and not math.isfinite(x):
                return str(x)
            return x

        return clean(
            {
                "lemma": self.lemma,
                "instance": self.instance,
                "status": self.status,
                "measured": self.measured,
                "bound": self.bound,
                "margin": self.margin,
                "note": self.note,
            }
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _not_applicable(lemma: str, instance: str, why: str, measured: dict | None = None) -> LemmaReport:
    return LemmaReport(lemma, instance, measured or {}, None, math.nan, applicable=False, note=why)


def _q_matrix(g: Graph, t: int) -> np.ndarray:
    """Columns are q_u^t for every vertex u."""
    return exact_distributions(g, t) - 1.0 / g.n


def random_pair(rng: np.random.Generator, dim: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Two random vectors of norm at most 1, with occasional near-collinear pairs."""
    dim = dim or int(rng.integers(2, 7))
    a = rng.normal(size=dim)
    b = rng.normal(size=dim)
    if rng.random() < 0.2:
        b = rng.choice([-1.0, 1.0]) * rng.uniform(0.1, 2.0) * a + rng.uniform(0.0, 0.1) * b
    a *= rng.uniform(0.0, 1.0) / np.linalg.norm(a)
    b *= rng.uniform(0.0, 1.0) / max(np.linalg.norm(b), 1e-300)
    return a, b


def verify_gram_collinearity(trials: int, rng: np.random.Generator | int = 0) -> LemmaReport:
    """dist <= kappa2 and kappa2^2 <= 10 dist over random pairs with norms <= 1."""
    rng = np.random.default_rng(rng)
    upper = -math.inf  # max of dist - kappa2
    lower = -math.inf  # max of kappa2^2 - 10 dist
    for _ in range(trials):
        a, b = random_pair(rng)
        dist = collinear_distance_exact(a, b)
        k2 = kappa2(a, b)
        upper = max(upper, dist - k2)
        lower = max(lower, k2 * k2 - 10.0 * dist)
    measured = {"trials": trials, "max_dist_minus_kappa2": upper, "max_kappa2sq_minus_10dist": lower}
    return LemmaReport("gram-collinearity", f"{trials} random pairs", measured, 0.0, -max(upper, lower))


def verify_residual_bound(g: Graph, t: int, name: str = "", spectrum: Spectrum | None = None) -> LemmaReport:
    """For every u: ||q_u^t - <q_u^t, v_2> v_2|| <= (1 - lambda_3/2)^t."""
    if g.n < 3:
        return _not_applicable("residual", name, "needs n >= 3")
    s = spectrum or graph_spectrum(g)
    Q = _q_matrix(g, t)
    v2 = s.vector(2)
    R = Q - np.outer(v2, v2 @ Q)
    worst = float(np.max(np.linalg.norm(R, axis=0)))
    bound = max(1.0 - s.eigenvalues[2] / 2.0, 0.0) ** t
    return LemmaReport("residual", name, {"t": t, "max_residual": worst}, bound, bound - worst)


def verify_norm_bound(
    g: Graph, t: int, gamma: float, phi_hat: float, name: str = "", c35: float = 1.0
) -> LemmaReport:
    """At most gamma*n vertices have ||p_u^t||^2 > 4/(gamma n), once t > c35 ln n / phi^2."""
    need = c35 * math.log(g.n) / phi_hat**2 if phi_hat > 0 else math.inf
    measured = {"t": t, "gamma": gamma, "phi_hat": phi_hat, "t_required": need}
    if not t > need:
        return _not_applicable("norm", name, "walk length below c35 ln n / phi^2", measured)
    P = exact_distributions(g, t)
    sq = np.sum(P * P, axis=0)
    limit = 4.0 / (gamma * g.n)
    bad = int(np.sum(sq > limit))
    measured.update({"violators": bad, "max_norm_sq": float(sq.max()), "norm_limit": limit})
    return LemmaReport("norm", name, measured, gamma * g.n, gamma * g.n - bad)


def verify_aggregate_lower_bound(
    g: Graph,
    S1: Iterable[int],
    S2: Iterable[int],
    delta: float,
    alpha_grid_size: int = 101,
    name: str = "",
    spectrum: Spectrum | None = None,
) -> LemmaReport:
    """min ||alpha P q_S1 + beta P q_S2||^2 >= 1/(12(|S1|+|S2|)), beta = +-(1 - alpha).

    P projects onto eigenvectors of M with eigenvalue above 1 - 4 delta.
    Besides the grid, the exact minimizer of each quadratic in alpha is
    evaluated, so the reported minimum is the true one.
    """
    S1 = sorted(set(int(v) for v in S1))
    S2 = sorted(set(int(v) for v in S2))
    n = g.n
    s1, s2 = len(S1), len(S2)
    measured = {"s1": s1, "s2": s2, "delta": delta}
    if not s1 or not s2 or set(S1) & set(S2):
        return _not_applicable("aggregate", name, "S1, S2 must be nonempty and disjoint", measured)
    if 3 * (s1 + s2) > 2 * n:
        return _not_applicable("aggregate", name, "|S1| + |S2| > 2n/3", measured)
    cuts = [float(cut_conductance(g, S)) for S in (S1, S2)]
    measured["cut_conductance"] = cuts
    if max(cuts) > delta:
        return _not_applicable("aggregate", name, "a cut conductance exceeds delta", measured)
    s = spectrum or graph_spectrum(g)
    q1 = np.full(n, -1.0 / n)
    q1[S1] += 1.0 / s1
    q2 = np.full(n, -1.0 / n)
    q2[S2] += 1.0 / s2
    x = project_heavy(s, 1.0 - 4.0 * delta, q1)
    y = project_heavy(s, 1.0 - 4.0 * delta, q2)
    xx, xy, yy = float(x @ x), float(x @ y), float(y @ y)
    grid = np.linspace(0.0, 1.0, alpha_grid_size)
    best = math.inf
    for sign in (1.0, -1.0):
        # ||a x + sign (1 - a) y||^2 = A a^2 + B a + C
        A = xx - 2.0 * sign * xy + yy
        B = 2.0 * sign * xy - 2.0 * yy
        C = yy
        alphas = grid
        if A > 0:
            alphas = np.append(grid, min(max(-B / (2.0 * A), 0.0), 1.0))
        vals = A * alphas**2 + B * alphas + C
        best = min(best, float(vals.min()))
    bound = 1.0 / (12.0 * (s1 + s2))
    measured["heavy_count"] = int(np.sum(s.nu > 1.0 - 4.0 * delta))
    measured["min_norm_sq"] = best
    return LemmaReport("aggregate", name, measured, bound, best - bound)


def far_pair_density(g: Graph, t: int, eps_level: float) -> float:
    Q = _q_matrix(g, t)
    count, _ = count_far_pairs(Q.T, eps_level, gram=Q.T @ Q)
    return count / (g.n * (g.n - 1) / 2)


def verify_far_pair_density(
    g: Graph,
    planted: PlantedInstance,
    t: int,
    eps_level: float,
    baseline: Graph | None = None,
    name: str = "",
) -> LemmaReport:
    """Far pairs are strictly denser on the far instance than on a two-cluster baseline.

    Applicable only when the planted cuts are sparse enough for the heavy
    part to survive t steps: (1 - 4 delta)^t >= 1/sqrt(n).
    """
    cert = planted.certificate or certify(planted)
    delta = cert.delta_hat
    measured = {"t": t, "eps_level": eps_level, "delta_hat": delta}
    if delta >= 0.25 or (1.0 - 4.0 * delta) ** t < 1.0 / math.sqrt(g.n):
        return _not_applicable("far-pairs", name, "planted cuts not sparse at this walk length", measured)
    if baseline is None:
        fam = planted.family
        half = g.n // 2
        d_inner = fam.get("d_inner", g.d - 2)
        baseline = two_cluster(half, d_inner, max(1, fam.get("cross_edges", 1)), seed=planted.seed or 0).graph
    far = far_pair_density(g, t, eps_level)
    base = far_pair_density(baseline, t, eps_level)
    measured.update({"density": far, "baseline_density": base})
    margin = far - base if far > base else -1.0
    return LemmaReport("far-pairs", name, measured, base, margin)


def verify_interlacing(g: Graph, t: int, name: str = "") -> LemmaReport:
    res = interlacing_margins(g, t)
    if res is None:
        return LemmaReport("interlacing", name, {"t": t, "pairs": 0}, None, 0.0, note="n < 3, vacuous")
    lo, bound = res
    worst = float(lo.max()) if lo.size else -math.inf
    return LemmaReport("interlacing", name, {"t": t, "pairs": int(lo.size), "max_eig_min": worst}, bound, bound - worst)


def _cycle(n: int) -> PlantedInstance:
    g = Graph.from_edges(n, 2, [(i, (i + 1) % n) for i in range(n)])
    return PlantedInstance(g, [frozenset(range(n))], None, {"name": "cycle", "n": n})


def _regular(n: int, d: int, seed: int) -> PlantedInstance:
    g = random_regular(n, d, seed)
    return PlantedInstance(g, [frozenset(range(n))], seed, {"name": "random_regular", "n": n, "d": d})


def bundled_corpus() -> list[tuple[str, PlantedInstance]]:
    """Fixed-seed instances used by the verification suite (all n <= 512)."""
    items = [
        ("C8", _cycle(8)),
        ("C16", _cycle(16)),
        ("C64", _cycle(64)),
        ("dumbbell", two_cluster(4, 3, 1, seed=0)),
        ("two_cluster-32-4-2", two_cluster(32, 4, 2, seed=11)),
        ("two_cluster-256-8-4", two_cluster(256, 8, 4, seed=12)),
        ("three-K4-ring", k_cluster(4, 3, 3, 1, seed=0)),
        ("k_cluster-20x3-4-1", k_cluster(20, 3, 4, 1, seed=13)),
        ("k_cluster-128x4-8-1", k_cluster(128, 4, 8, 1, seed=14)),
        ("regular-64-3", _regular(64, 3, 15)),
        ("regular-256-6", _regular(256, 6, 16)),
    ]
    for _, inst in items:
        if inst.certificate is None:
            inst.certificate = certify(inst)
    return items


def clusterability_level(inst: PlantedInstance, spectrum: Spectrum | None = None) -> float:
    """Certified phi for which the instance is (2, phi)-clusterable.

    The whole graph qualifies at its own Cheeger lower bound; a planted
    bipartition qualifies at its weakest part's bound.  Take the better.
    """
    whole = cheeger_bounds(spectrum or graph_spectrum(inst.graph))[0]
    if len(inst.partition) == 2 and inst.certificate is not None:
        return max(whole, inst.certificate.phi_hat)
    return whole


def run_suite(
    suite: str = "all",
    corpus: list[tuple[str, PlantedInstance]] | None = None,
    seed: int = 0,
    gram_trials: int = 1000,
    constants: Constants | None = None,
    on_report: Callable[[LemmaReport], None] | None = None,
) -> list[LemmaReport]:
    """Run one suite (or all of them) over the corpus."""
    if suite != "all" and suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    chosen = SUITES if suite == "all" else (suite,)
    c = constants or Constants()
    out: list[LemmaReport] = []

    def emit(rep: LemmaReport) -> None:
        out.append(rep)
        if on_report is not None:
            on_report(rep)

    if "gram" in chosen:
        emit(verify_gram_collinearity(gram_trials, np.random.default_rng(seed)))
    rest = [s for s in chosen if s != "gram"]
    if not rest:
        return out
    for name, inst in corpus or bundled_corpus():
        g = inst.graph
        spec = graph_spectrum(g)
        if "residual" in rest:
            for t in (0, 5, 20):
                emit(verify_residual_bound(g, t, name, spec))
        if "interlacing" in rest:
            for t in (2, 4):
                emit(verify_interlacing(g, t, name))
        if "norm" in rest:
            phi = clusterability_level(inst, spec)
            if phi > 0:
                t = math.floor(c.c35 * math.log(g.n) / phi**2) + 1
                emit(verify_norm_bound(g, t, 0.05, phi, name, c.c35))
        if len(inst.partition) >= 3:
            if "aggregate" in rest:
                S1, S2 = inst.partition[0], inst.partition[1]
                delta = max(float(cut_conductance(g, S1)), float(cut_conductance(g, S2)))
                emit(verify_aggregate_lower_bound(g, S1, S2, delta, 101, name, spec))
            if "far-pairs" in rest:
                try:
                    params = derive_params(g.n, g.d, 0.1, 0.5, 1e-4, c)
                except ValueError as exc:
                    emit(_not_applicable("far-pairs", name, f"no practical parameters: {exc}"))
                    continue
                emit(verify_far_pair_density(g, inst, params.t, math.sqrt(params.Lam), name=name))
    return out
