"""Seeded experiment runner and query-scaling benchmark."""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .generators import PlantedInstance, k_cluster, random_regular, two_cluster
from .tester import Constants, TestParams, cluster_test, derive_params


@dataclass(frozen=True)
class Policy:
    """How tester parameters are chosen per instance (practical mode).

    ``phi=None`` takes the smallest certified part conductance of the
    instance; a number fixes phi for every instance.
    """

    eps: float = 0.1
    phi: float | None = None
    mu: float = 1e-4
    R: float = 40
    t: int | None = None
    t_cap: int = 400
    Lam: float | None = None
    xi: float | None = None
    constants: Constants = field(default_factory=Constants)

    def params_for(self, inst: PlantedInstance) -> TestParams:
        phi = self.phi
        if phi is None:
            if inst.certificate is None:
                raise ValueError("phi=None needs a certified instance")
            phi = min(inst.certificate.phi_hat, 1.0)
        g = inst.graph
        return derive_params(
            g.n, g.d, self.eps, phi, self.mu, self.constants, "practical",
            R=self.R, t=self.t, Lam=self.Lam, xi=self.xi, t_cap=self.t_cap,
        )


def make_instance(family: dict, seed: int, certified: bool | None = None) -> PlantedInstance:
    """Build one instance from a family description such as
    ``{"name": "two_cluster", "n_per_side": 512, "d_inner": 8, "cross_edges": 4}``.
    """
    kind = family["name"]
    if kind == "two_cluster":
        return two_cluster(family["n_per_side"], family["d_inner"], family["cross_edges"], seed, certified)
    if kind == "k_cluster":
        return k_cluster(family["n_per_part"], family["k"], family["d_inner"], family["cross_edges"], seed, certified)
    if kind == "random_regular":
        g = random_regular(family["n"], family["d"], seed)
        return PlantedInstance(g, [frozenset(range(g.n))], seed, dict(family))
    raise ValueError(f"unknown family {kind!r}")


@dataclass
class SeedResult:
    seed: int
    n: int
    verdict: str
    reject_reason: str | None
    rounds: int
    queries: int
    query_bound: int
    seconds: float


@dataclass
class ExperimentReport:
    family: dict
    policy: dict
    results: list[SeedResult]
    wall_time: float

    @property
    def accepted(self) -> int:
        return sum(r.verdict == "accept" for r in self.results)

    @property
    def accept_rate(self) -> float:
        return self.accepted / len(self.results)

    @property
    def reject_rate(self) -> float:
        return 1.0 - self.accept_rate

    def query_stats(self) -> dict:
        q = np.array([r.queries for r in self.results], dtype=float)
        return {
            "mean": float(q.mean()),
            "p50": float(np.percentile(q, 50)),
            "p90": float(np.percentile(q, 90)),
            "max": float(q.max()),
        }

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "policy": self.policy,
            "seeds": len(self.results),
            "acceptRate": self.accept_rate,
            "queries": self.query_stats(),
            "wallTime": self.wall_time,
            "results": [asdict(r) for r in self.results],
        }


def _run_seed(args: tuple[dict, Policy, int, bool | None]) -> SeedResult:
    family, policy, seed, certified = args
    start = time.perf_counter()
    inst = make_instance(family, seed, certified)
    params = policy.params_for(inst)
    rep = cluster_test(inst.graph, params, seed, keep_rounds=False)
    return SeedResult(
        seed, inst.graph.n, rep.verdict, rep.reject_reason, rep.rounds_executed,
        rep.oracle_queries, params.query_bound, time.perf_counter() - start,
    )


def _map(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def run_experiment(
    family: dict, policy: Policy, seeds: int, base_seed: int = 0, jobs: int = 1, certified: bool | None = None
) -> ExperimentReport:
    """One fresh instance and one tester run per seed base_seed, base_seed+1, ..."""
    if seeds < 1:
        raise ValueError("need at least one seed")
    start = time.perf_counter()
    tasks = [(family, policy, base_seed + i, certified) for i in range(seeds)]
    results = _map(_run_seed, tasks, jobs)
    pol = asdict(policy)
    return ExperimentReport(dict(family), pol, results, time.perf_counter() - start)


@dataclass
class ScalingRow:
    n: int
    seeds: int
    mean_queries: float
    queries_per_n: float
    max_queries: int
    query_bound: int
    accept_rate: float

    @property
    def within_bound(self) -> bool:
        return self.max_queries <= self.query_bound


def two_cluster_family(n: int, d_inner: int = 8, cross_edges: int = 4) -> dict:
    return {"name": "two_cluster", "n_per_side": n // 2, "d_inner": d_inner, "cross_edges": cross_edges}


def bench_query_scaling(
    sizes: list[int],
    policy: Policy,
    seeds: int = 1,
    family_for_size=two_cluster_family,
    base_seed: int = 0,
    jobs: int = 1,
) -> list[ScalingRow]:
    """Mean oracle queries of the tester at each graph size."""
    if list(sizes) != sorted(sizes):
        raise ValueError("sizes must be ascending")
    if policy.phi is None:
        raise ValueError("query scaling needs a fixed phi")
    rows = []
    for n in sizes:
        rep = run_experiment(family_for_size(n), policy, seeds, base_seed, jobs, certified=False)
        q = np.array([r.queries for r in rep.results])
        n_actual = rep.results[0].n
        rows.append(
            ScalingRow(
                n_actual, seeds, float(q.mean()), float(q.mean()) / n_actual, int(q.max()),
                min(r.query_bound for r in rep.results), rep.accept_rate,
            )
        )
    return rows


CSV_FIELDS = ["n", "seeds", "mean_queries", "queries_per_n", "max_queries", "query_bound", "accept_rate"]


def scaling_csv(rows: list[ScalingRow]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: getattr(r, k) for k in CSV_FIELDS})
    return buf.getvalue()


def strictly_decreasing(xs: list[float]) -> bool:
    return all(b < a for a, b in zip(xs, xs[1:])) and not any(math.isnan(x) for x in xs)
