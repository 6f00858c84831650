"""Synthetic graph families with recomputed conductance certificates.

``two_cluster`` builds instances on the accepting side of the tester (two
expanders, a few cross edges).  ``k_cluster`` with k >= 3 builds the far
family: k expanders in a ring, so the graph has k sparse cuts and no good
bipartition.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import GuardExceeded
from .graph import Graph, cut_conductance, save_graph
from .spectral import DENSE_MAX_N, cheeger_bounds, graph_spectrum

PAIRING_ATTEMPTS = 200
_REPAIR_ROUNDS = 50


def _pairing(n: int, d: int, rng: np.random.Generator) -> list[tuple[int, int]] | None:
    """One attempt of the configuration model with local re-pairing.

    Stubs are shuffled and matched; pairs that would form a loop or a
    parallel edge go back into the pool and are reshuffled.  Gives up when
    the pool stops shrinking.
    """
    pool = np.repeat(np.arange(n), d)
    seen: set[tuple[int, int]] = set()
    edges: list[tuple[int, int]] = []
    stall = 0
    while len(pool):
        rng.shuffle(pool)
        left = []
        for a, b in zip(pool[0::2].tolist(), pool[1::2].tolist()):
            e = (a, b) if a < b else (b, a)
            if a == b or e in seen:
                left += (a, b)
            else:
                seen.add(e)
                edges.append(e)
        if len(left) == len(pool):
            stall += 1
            if stall > _REPAIR_ROUNDS:
                return None
        else:
            stall = 0
        pool = np.array(left, dtype=np.int64)
    return edges


def random_regular(n: int, d: int, seed: int | np.random.Generator) -> Graph:
    """Simple d-regular graph on n vertices from the pairing model."""
    if d < 3 or n <= d:
        raise ValueError("need d >= 3 and n > d")
    if (n * d) % 2:
        raise ValueError(f"n*d = {n * d} is odd, no {d}-regular graph on {n} vertices")
    rng = np.random.default_rng(seed)
    for _ in range(PAIRING_ATTEMPTS):
        edges = _pairing(n, d, rng)
        if edges is not None:
            return Graph.from_edges(n, d, edges)
    raise RuntimeError(f"pairing model failed {PAIRING_ATTEMPTS} times for n={n}, d={d}")


@dataclass(frozen=True)
class Certificate:
    part_lower: list[float]
    part_upper: list[float]
    part_cut: list[float]
    disconnected: list[bool]

    @property
    def phi_hat(self) -> float:
        """Smallest certified inner conductance over the parts."""
        return min(self.part_lower)

    @property
    def delta_hat(self) -> float:
        """Largest cut conductance of a part."""
        return max(self.part_cut)

    @property
    def flagged(self) -> bool:
        return any(self.disconnected)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["phi_hat"] = self.phi_hat
        out["delta_hat"] = self.delta_hat
        return out


@dataclass
class PlantedInstance:
    graph: Graph
    partition: list[frozenset[int]]
    seed: int | None
    family: dict = field(default_factory=dict)
    certificate: Certificate | None = None

    def relabel(self, perm) -> "PlantedInstance":
        perm = list(perm)
        parts = [frozenset(perm[v] for v in p) for p in self.partition]
        return PlantedInstance(self.graph.relabel(perm), parts, self.seed, dict(self.family))

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "seed": self.seed,
            "n": self.graph.n,
            "d": self.graph.d,
            "partition": [sorted(p) for p in self.partition],
            "certificates": None if self.certificate is None else self.certificate.to_dict(),
        }


def certify(inst: PlantedInstance, guard: int = DENSE_MAX_N) -> Certificate:
    """Recompute per-part certificates from the graph itself.

    Inner conductance of each part is bracketed by the Cheeger bounds of
    its induced subgraph (global d); a part whose lower bound is 0 is
    flagged as disconnected.  Parts of size <= 1 get an infinite lower bound.
    """
    g = inst.graph
    covered = sorted(v for p in inst.partition for v in p)
    if covered != list(range(g.n)):
        raise ValueError("partition does not cover the vertex set disjointly")
    lower, upper, cut, disc = [], [], [], []
    for part in inst.partition:
        if len(part) > guard:
            raise GuardExceeded(f"part of size {len(part)} exceeds the dense guard {guard}")
        if len(part) <= 1:
            lo, hi = math.inf, math.inf
        else:
            sub, _ = g.induced(part)
            lo, hi = cheeger_bounds(graph_spectrum(sub))
        lower.append(lo)
        upper.append(hi)
        disc.append(lo == 0.0)
        cut.append(float(cut_conductance(g, part)) if 0 < len(part) < g.n else 0.0)
    return Certificate(lower, upper, cut, disc)


def _subseeds(seed, k: int) -> list[int]:
    ss = np.random.SeedSequence(seed)
    return [int(s.generate_state(1, np.uint64)[0]) for s in ss.spawn(k)]


def _blocks(n_per_part: int, k: int, d_inner: int, seeds: list[int]) -> list[tuple[int, int]]:
    edges = []
    for i in range(k):
        part = random_regular(n_per_part, d_inner, seeds[i])
        off = i * n_per_part
        edges += [(a + off, b + off) for a, b in part.edges()]
    return edges


def _maybe_certify(inst: PlantedInstance, do: bool | None) -> PlantedInstance:
    small = max(len(p) for p in inst.partition) <= DENSE_MAX_N
    if do or (do is None and small):
        inst.certificate = certify(inst)
    return inst


def two_cluster(
    n_per_side: int, d_inner: int, cross_edges: int, seed: int, certified: bool | None = None
) -> PlantedInstance:
    """Two random d_inner-regular expanders joined by ``cross_edges`` disjoint edges.

    The degree bound is d_inner + 1.  Certificates are computed unless the
    sides exceed the dense guard (or ``certified`` says otherwise).
    """
    if not 0 <= cross_edges <= n_per_side:
        raise ValueError("cross_edges must lie in 0..n_per_side")
    seeds = _subseeds(seed, 3)
    edges = _blocks(n_per_side, 2, d_inner, seeds)
    rng = np.random.default_rng(seeds[2])
    left = rng.choice(n_per_side, size=cross_edges, replace=False)
    right = rng.choice(n_per_side, size=cross_edges, replace=False) + n_per_side
    edges += [(int(a), int(b)) for a, b in zip(left, right)]
    g = Graph.from_edges(2 * n_per_side, d_inner + 1, edges)
    parts = [frozenset(range(n_per_side)), frozenset(range(n_per_side, 2 * n_per_side))]
    family = {"name": "two_cluster", "n_per_side": n_per_side, "d_inner": d_inner, "cross_edges": cross_edges}
    return _maybe_certify(PlantedInstance(g, parts, seed, family), certified)


def k_cluster(
    n_per_part: int, k: int, d_inner: int, cross_edges: int, seed: int, certified: bool | None = None
) -> PlantedInstance:
    """k expanders on a ring, ``cross_edges`` disjoint edges between neighbors.

    The degree bound is d_inner + 2 and every cross endpoint is distinct.
    """
    if k < 3:
        raise ValueError("k_cluster needs k >= 3")
    if not 0 <= 2 * cross_edges <= n_per_part:
        raise ValueError("need 2 * cross_edges <= n_per_part")
    seeds = _subseeds(seed, k + 1)
    edges = _blocks(n_per_part, k, d_inner, seeds)
    rng = np.random.default_rng(seeds[k])
    # per part: the first half of its chosen endpoints go forward, the rest back
    ends = [rng.choice(n_per_part, size=2 * cross_edges, replace=False) + i * n_per_part for i in range(k)]
    for i in range(k):
        j = (i + 1) % k
        fwd = ends[i][:cross_edges]
        back = ends[j][cross_edges:]
        edges += [(int(min(a, b)), int(max(a, b))) for a, b in zip(fwd, back)]
    g = Graph.from_edges(k * n_per_part, d_inner + 2, edges)
    parts = [frozenset(range(i * n_per_part, (i + 1) * n_per_part)) for i in range(k)]
    family = {"name": "k_cluster", "n_per_part": n_per_part, "k": k, "d_inner": d_inner, "cross_edges": cross_edges}
    return _maybe_certify(PlantedInstance(g, parts, seed, family), certified)


def write_instance(inst: PlantedInstance, path: str | Path) -> Path:
    """Write the edge list to ``path`` and the partition plus certificates to ``path.json``."""
    path = Path(path)
    save_graph(inst.graph, path)
    side = path.with_name(path.name + ".json")
    side.write_text(json.dumps(inst.to_dict(), indent=2, default=str) + "\n")
    return side
