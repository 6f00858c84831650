"""Random-walk tester for 2-clusterability.

Each round picks a uniformly random pair (u, v), runs N lazy walks of length
t from both, checks that neither endpoint distribution has a large l2 norm,
and estimates the 2x2 Gram matrix of the centered distributions q_u, q_v.
The graph is rejected as soon as both eigenvalues of that estimate exceed
Lambda; it is accepted if all R rounds pass.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np

from .errors import GuardExceeded
from .estimators import NormTestResult, collision_rate, inner_product_estimate, l2_norm_tester, required_samples
from .graph import Graph
from .spectral import eig2
from .walks import walk_batch

Mode = Literal["paper", "practical"]

RUN_CAP = 10**6
WALK_CAP = 10**8

PRACTICAL_ROUNDS = 40
PRACTICAL_T_FACTOR = 8.0
PRACTICAL_T_CAP = 400
PRACTICAL_LAMBDA_SCALE = 0.4
PRACTICAL_XI_SCALE = 0.15


@dataclass(frozen=True)
class Constants:
    """Unspecified constants of the analysis; all default to 1."""

    c22: float = 1.0
    c33: float = 1.0
    c35: float = 1.0
    c310: float = 1.0
    alpha_sc: float = 1.0

    @property
    def mu_limit(self) -> float:
        """Upper end C of the admissible range (0, C) for mu."""
        return 1.0 / (128.0 * self.c33 * self.c310)

    def exponent(self, mu: float) -> float:
        """1 + 128 c33 c310 mu, the exponent of n in Lambda and xi."""
        return 1.0 + 128.0 * self.c33 * self.c310 * mu


@dataclass(frozen=True)
class TestParams:
    """All knobs of one tester run.

    In literal mode (``"paper"``) the real-valued formulas are kept as computed; the
    executed counts are their ceilings (:attr:`rounds`, :attr:`walks`,
    :attr:`norm_samples`).
    """

    __test__ = False

    n: int
    d: int
    R: float
    t: int
    eta: float
    sigma: float
    xi: float
    N: float
    r: float
    Lam: float
    eps: float
    phi: float
    mu: float
    constants: Constants = field(default_factory=Constants)
    mode: Mode = "practical"

    @property
    def rounds(self) -> int:
        return math.ceil(self.R)

    @property
    def walks(self) -> int:
        return math.ceil(self.N)

    @property
    def norm_samples(self) -> int:
        return math.ceil(self.r)

    @property
    def query_bound(self) -> int:
        """Worst-case oracle probes: R rounds, 2 endpoints, max(N, r) walks, t steps."""
        return self.rounds * 2 * max(self.walks, self.norm_samples) * self.t

    def violations(self) -> list[str]:
        out = []
        n = self.n
        if not self.r >= 16.0 * math.sqrt(n):
            out.append("r < 16 sqrt(n)")
        b = min(self.sigma / 4.0, 1.0)
        if 0.0 < self.eta < 1.0 and self.xi > 0.0 and b > 0.0 and math.isfinite(self.xi):
            if self.walks < required_samples(self.eta, self.xi, b, self.constants.c22):
                out.append("N < required_samples(eta, xi, sigma/4)")
        if not self.Lam > 2.0 * self.xi + 10.0 / n**2:
            out.append("Lambda <= 2 xi + 10/n^2")
        if self.mode == "practical" and self.walks < self.norm_samples:
            out.append("N < r")
        return out

    def validate(self) -> "TestParams":
        bad = self.violations()
        if bad:
            raise ValueError("parameter invariants violated: " + "; ".join(bad))
        return self

    def to_dict(self) -> dict:
        out = asdict(self)
        out["constants"] = asdict(self.constants)
        return out


def derive_params(
    n: float,
    d: int,
    eps: float,
    phi: float,
    mu: float,
    constants: Constants | None = None,
    mode: Mode = "practical",
    R: float | None = None,
    t: int | None = None,
    Lam: float | None = None,
    xi: float | None = None,
    t_cap: int = PRACTICAL_T_CAP,
) -> TestParams:
    """Tester parameters for an n-vertex graph with degree bound d.

    Mode ``"paper"`` evaluates the literal parameter formulas exactly (no overrides).
    Practical mode takes R and t from the caller (defaults: 40 rounds and
    ceil(8 ln n / phi^2) capped at ``t_cap``), sets sigma = 16/n and scales
    Lambda, xi by 0.4 and 0.15 in front of n^-(1 + 128 c33 c310 mu).  N and
    r use the same sample-size formulas as the literal mode, floored so that the
    norm tester has its 16 sqrt(n) samples and r <= N.  Practical
    parameters must satisfy every invariant; literal parameters are returned
    as is and their :meth:`TestParams.violations` can be inspected.
    """
    c = constants or Constants()
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if not 0.0 < phi <= 1.0:
        raise ValueError("phi must lie in (0, 1]")
    if mode == "paper":
        if not 0.0 < mu < c.mu_limit:
            raise ValueError(f"mu must lie in (0, {c.mu_limit}) for these constants")
        if any(v is not None for v in (R, t, Lam, xi)):
            raise ValueError("mode 'paper' takes no overrides")
        R_ = 10**22 / eps**4
        t_ = math.ceil(64 * max(c.c33, c.c35) * math.log(n) / phi**2)
        eta = 1 / (24 * R_)
        sigma = 16 / (eta * n)
        xi_ = (1 / 10**5) * n ** (-(1 + 128 * c.c33 * c.c310 * mu))
        N = c.c22 * (math.sqrt(sigma) / (2 * xi_)) * math.log(1 / eta)
        r = 16 * math.sqrt(n) / eta
        Lam_ = (1 / 10**4) * n ** (-(1 + 128 * c.c33 * c.c310 * mu))
        return TestParams(int(n) if float(n).is_integer() else n, d, R_, t_, eta, sigma, xi_, N, r, Lam_,
                          eps, phi, mu, c, "paper")
    if mode != "practical":
        raise ValueError(f"unknown mode {mode!r}")
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    n = int(n)
    R_ = float(PRACTICAL_ROUNDS if R is None else R)
    if R_ < 1:
        raise ValueError("R must be at least 1")
    if t is None:
        t = min(math.ceil(PRACTICAL_T_FACTOR * math.log(n) / phi**2), t_cap)
    if t < 0:
        raise ValueError("t must be nonnegative")
    scale = n ** (-c.exponent(mu))
    eta = 1.0 / (24.0 * R_)
    sigma = 16.0 / n
    xi_ = PRACTICAL_XI_SCALE * scale if xi is None else float(xi)
    Lam_ = PRACTICAL_LAMBDA_SCALE * scale if Lam is None else float(Lam)
    floor = math.ceil(16.0 * math.sqrt(n))
    N = float(max(math.ceil(c.c22 * (math.sqrt(sigma) / (2.0 * xi_)) * math.log(1.0 / eta)), floor))
    r = float(min(N, math.ceil(16.0 * math.sqrt(n) / eta)))
    return TestParams(n, d, R_, int(t), eta, sigma, xi_, N, r, Lam_, eps, phi, mu, c, "practical").validate()


@dataclass(frozen=True)
class GramEstimate:
    """Estimated q-Gram matrix of one round, or the norm test that stopped it."""

    u: int
    v: int
    norm_u: NormTestResult
    norm_v: NormTestResult
    entries: np.ndarray | None = None
    eig_min: float | None = None
    eig_max: float | None = None
    xi: float = 0.0

    @property
    def norm_pass(self) -> bool:
        return self.norm_u.accept and self.norm_v.accept


def build_gram_estimate(g: Graph, u: int, v: int, params: TestParams, rng: np.random.Generator) -> GramEstimate:
    """One round's worth of walks from u and v, turned into an estimated q-Gram.

    The first r endpoints of each side feed the norm tester; if either side
    fails nothing else is estimated.  Diagonal entries use the
    self-collision rate of the N endpoints, the off-diagonal entry the
    cross-collision rate; subtracting 1/n turns the p-Gram into the q-Gram.
    """
    n = g.n
    N, r = params.walks, params.norm_samples
    m = max(N, r)
    if 2 * m > WALK_CAP:
        raise GuardExceeded(f"{2 * m} walks per round exceeds the cap {WALK_CAP}")
    starts = np.concatenate([np.full(m, u, dtype=np.int64), np.full(m, v, dtype=np.int64)])
    ends = walk_batch(g, starts, params.t, rng)
    su, sv = ends[:m], ends[m:]
    nu_ = l2_norm_tester(su[:r], params.sigma, n)
    nv_ = l2_norm_tester(sv[:r], params.sigma, n)
    if not (nu_.accept and nv_.accept):
        return GramEstimate(u, v, nu_, nv_, xi=params.xi)
    su, sv = su[:N], sv[:N]
    a11 = collision_rate(su) - 1.0 / n
    a22 = collision_rate(sv) - 1.0 / n
    a12 = inner_product_estimate(su, sv) - 1.0 / n
    lo, hi = eig2(a11, a12, a22)
    entries = np.array([[a11, a12], [a12, a22]])
    return GramEstimate(u, v, nu_, nv_, entries, lo, hi, params.xi)


@dataclass
class RoundRecord:
    u: int
    v: int
    gram: list[list[float]] | None
    eig_min: float | None
    eig_max: float | None
    norm_test: str

    def to_dict(self) -> dict:
        return {
            "u": self.u,
            "v": self.v,
            "gram": self.gram,
            "eigMin": self.eig_min,
            "eigMax": self.eig_max,
            "normTest": self.norm_test,
        }


@dataclass
class TestReport:
    __test__ = False

    verdict: str
    reject_reason: str | None
    rounds_executed: int
    oracle_queries: int
    seed: int
    params: TestParams
    rounds: list[RoundRecord]

    @property
    def accepted(self) -> bool:
        return self.verdict == "accept"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "rejectReason": self.reject_reason,
            "roundsExecuted": self.rounds_executed,
            "oracleQueries": self.oracle_queries,
            "seed": self.seed,
            "params": _jsonable(self.params.to_dict()),
            "rounds": [_jsonable(r.to_dict()) for r in self.rounds],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def round_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for round ``index`` of a run seeded with ``seed``."""
    return np.random.default_rng([seed, index])


def cluster_test(
    g: Graph, params: TestParams, seed: int, run_cap: int = RUN_CAP, keep_rounds: bool = True
) -> TestReport:
    """Run the tester; stops at the first rejecting round."""
    if params.n != g.n:
        raise ValueError(f"params were derived for n={params.n}, graph has n={g.n}")
    if params.rounds > run_cap:
        raise GuardExceeded(f"{params.rounds:.3g} rounds exceeds the run cap {run_cap}")
    start = g.query_count
    records: list[RoundRecord] = []
    verdict, reason = "accept", None
    executed = 0
    for i in range(params.rounds):
        rng = round_rng(seed, i)
        u, v = (int(x) for x in rng.integers(0, g.n, size=2))
        est = build_gram_estimate(g, u, v, params, rng)
        executed += 1
        if not est.norm_pass:
            rec = RoundRecord(u, v, None, None, None, "fail")
            verdict, reason = "reject", "norm-test"
        else:
            rec = RoundRecord(u, v, est.entries.tolist(), est.eig_min, est.eig_max, "pass")
            if est.eig_min > params.Lam:
                verdict, reason = "reject", "eigenvalues"
        if keep_rounds:
            records.append(rec)
        if verdict == "reject":
            break
    return TestReport(verdict, reason, executed, g.query_count - start, seed, params, records)
