"""Bounded-degree graphs behind a port-numbered neighbor oracle.

Algorithms only see a graph through :meth:`Graph.neighbor` and the batched
:meth:`Graph.neighbors`; every probe is tallied.  The offline helpers at the
bottom of the module (conductance, brute-force clusterability) read the
adjacency directly and never touch the tally.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import GraphFormatError, GuardExceeded

BRUTEFORCE_CONDUCTANCE_MAX_N = 20
BRUTEFORCE_CLUSTERABLE_MAX_N = 16


class QueryCounter:
    """Monotone, thread-safe tally of oracle probes."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._value = 0

    def add(self, k: int = 1) -> None:
        if k < 0:
            raise ValueError("query counter cannot decrease")
        with self._lock:
            self._value += int(k)

    @property
    def value(self) -> int:
        with self._lock:
            return self._value

    def __getstate__(self):
        return {"value": self.value}

    def __setstate__(self, state):
        self._lock = threading.Lock()
        self._value = state["value"]


class Graph:
    """Undirected simple graph with maximum degree at most ``d``.

    ``adjacency[v]`` lists the neighbors of ``v`` in port order, so port ``i``
    (1-based) of ``v`` is ``adjacency[v][i - 1]``.  The structure is immutable
    after construction; only the query counter changes.
    """

    def __init__(self, n: int, d: int, adjacency: Sequence[Sequence[int]]):
        if n < 0 or d < 0:
            raise ValueError("n and d must be nonnegative")
        if len(adjacency) != n:
            raise ValueError(f"expected {n} adjacency lists, got {len(adjacency)}")
        ports = np.full((n, max(d, 1)), -1, dtype=np.int64)
        deg = np.zeros(n, dtype=np.int64)
        for v, nbrs in enumerate(adjacency):
            if len(nbrs) > d:
                raise ValueError(f"vertex {v} has degree {len(nbrs)} > d={d}")
            ports[v, : len(nbrs)] = nbrs
            deg[v] = len(nbrs)
        src = np.repeat(np.arange(n, dtype=np.int64), deg)
        dst = ports[ports >= 0] if n else np.empty(0, dtype=np.int64)
        if len(dst) != len(src) or (len(dst) and dst.max() >= n):
            raise ValueError("neighbor out of range")
        if np.any(src == dst):
            raise ValueError(f"self-loop at {int(src[src == dst][0])}")
        fwd = src * max(n, 1) + dst
        if len(np.unique(fwd)) != len(fwd):
            raise ValueError("parallel edges")
        if not np.array_equal(np.sort(fwd), np.sort(dst * max(n, 1) + src)):
            raise ValueError("adjacency not symmetric")
        ports.setflags(write=False)
        deg.setflags(write=False)
        self._n = n
        self._d = d
        self._ports = ports
        self._deg = deg
        self.queries = QueryCounter()

    @classmethod
    def from_edges(cls, n: int, d: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        adjacency: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            adjacency[u].append(v)
            adjacency[v].append(u)
        return cls(n, d, adjacency)

    @property
    def n(self) -> int:
        return self._n

    @property
    def d(self) -> int:
        return self._d

    @property
    def query_count(self) -> int:
        return self.queries.value

    # -- oracle ---------------------------------------------------------

    def neighbor(self, v: int, i: int) -> int | None:
        """Return the ``i``-th neighbor of ``v`` (1-based port), or None past deg(v)."""
        if not 0 <= v < self._n:
            raise ValueError(f"vertex {v} out of range")
        if not 1 <= i <= self._d:
            raise ValueError(f"port {i} outside 1..{self._d}")
        self.queries.add(1)
        w = int(self._ports[v, i - 1])
        return None if w < 0 else w

    def neighbors(self, vs: np.ndarray, ports: np.ndarray) -> np.ndarray:
        """Batched oracle: one probe per element, -1 stands for the none symbol."""
        vs = np.asarray(vs, dtype=np.int64)
        ports = np.asarray(ports, dtype=np.int64)
        if vs.shape != ports.shape:
            raise ValueError("vertex and port arrays differ in shape")
        if vs.size == 0:
            return np.empty(0, dtype=np.int64)
        if vs.min() < 0 or vs.max() >= self._n:
            raise ValueError("vertex out of range")
        if ports.min() < 1 or ports.max() > self._d:
            raise ValueError(f"port outside 1..{self._d}")
        self.queries.add(vs.size)
        return self._ports[vs, ports - 1]

    # -- offline access (oracle-free) -------------------------------------

    def degree(self, v: int) -> int:
        return int(self._deg[v])

    @property
    def degrees(self) -> np.ndarray:
        return self._deg

    @property
    def port_table(self) -> np.ndarray:
        """(n, d) read-only table of neighbors padded with -1."""
        return self._ports

    def adjacency(self, v: int) -> tuple[int, ...]:
        return tuple(int(w) for w in self._ports[v, : self._deg[v]])

    def edges(self) -> list[tuple[int, int]]:
        src = np.repeat(np.arange(self._n, dtype=np.int64), self._deg)
        dst = self._ports[self._ports >= 0]
        keep = src < dst
        pairs = np.stack([src[keep], dst[keep]], axis=1)
        pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
        return [(int(u), int(v)) for u, v in pairs]

    @property
    def m(self) -> int:
        return int(self._deg.sum()) // 2

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self._n, self._n))
        src = np.repeat(np.arange(self._n), self._deg)
        a[src, self._ports[self._ports >= 0]] = 1.0
        return a

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph G[S] keeping the global degree bound d.

        Returns the subgraph and the list mapping new ids to old ids.
        """
        keep = sorted(set(int(v) for v in vertices))
        index = {v: i for i, v in enumerate(keep)}
        adjacency = [[index[w] for w in self.adjacency(v) if w in index] for v in keep]
        return Graph(len(keep), self._d, adjacency), keep

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        perm = list(perm)
        if sorted(perm) != list(range(self._n)):
            raise ValueError("perm must be a permutation of 0..n-1")
        adjacency: list[list[int]] = [[] for _ in range(self._n)]
        for v in range(self._n):
            adjacency[perm[v]] = [perm[w] for w in self.adjacency(v)]
        return Graph(self._n, self._d, adjacency)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self._n == other._n
            and self._d == other._d
            and np.array_equal(self._ports, other._ports)
        )

    def __hash__(self):
        return hash((self._n, self._d, self._ports.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, d={self._d}, m={self.m})"


# -- edge-list I/O ----------------------------------------------------------


def _parse_ints(line: str, lineno: int, what: str) -> tuple[int, int]:
    parts = line.split()
    if len(parts) != 2:
        raise GraphFormatError(f"malformed {what}: expected two integers, got {line!r}", lineno)
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise GraphFormatError(f"malformed {what}: {line!r}", lineno) from None


def parse_graph(text: str) -> Graph:
    header = None
    adjacency: list[list[int]] = []
    seen: set[tuple[int, int]] = set()
    n = d = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            n, d = header = _parse_ints(line, lineno, "header")
            if n < 0 or d < 0:
                raise GraphFormatError("n and d must be nonnegative", lineno)
            adjacency = [[] for _ in range(n)]
            continue
        u, v = _parse_ints(line, lineno, "edge")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"vertex out of range in edge {u} {v} (n={n})", lineno)
        if u >= v:
            raise GraphFormatError(f"edge must satisfy u < v, got {u} {v}", lineno)
        if (u, v) in seen:
            raise GraphFormatError(f"duplicate edge {u} {v}", lineno)
        for x in (u, v):
            if len(adjacency[x]) >= d:
                raise GraphFormatError(f"degree-bound violation: vertex {x} exceeds d={d}", lineno)
        seen.add((u, v))
        adjacency[u].append(v)
        adjacency[v].append(u)
    if header is None:
        raise GraphFormatError("missing header line 'n d'")
    return Graph(n, d, adjacency)


def load_graph(path: str | Path) -> Graph:
    return parse_graph(Path(path).read_text())


def format_graph(g: Graph) -> str:
    lines = [f"{g.n} {g.d}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def save_graph(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_graph(g))


# -- conductance (offline) ----------------------------------------------------


def _as_set(g: Graph, S: Iterable[int]) -> frozenset[int]:
    S = frozenset(int(v) for v in S)
    if any(not 0 <= v < g.n for v in S):
        raise ValueError("vertex set has members outside 0..n-1")
    return S


def edge_boundary(g: Graph, S: Iterable[int]) -> int:
    S = _as_set(g, S)
    return sum(1 for u in S for w in g.adjacency(u) if w not in S)


def cut_conductance(g: Graph, S: Iterable[int]) -> Fraction:
    """Exact e(S, V \\ S) / (d |S|)."""
    S = _as_set(g, S)
    if not S or len(S) == g.n:
        raise ValueError("S must be a nonempty proper subset of V")
    return Fraction(edge_boundary(g, S), g.d * len(S))


def _mask_tables(n: int, edges: Sequence[tuple[int, int]], masks: np.ndarray):
    """Internal edge counts and sizes for every bitmask in ``masks``."""
    inside = np.zeros(masks.shape, dtype=np.int64)
    for u, v in edges:
        inside += ((masks >> u) & 1) & ((masks >> v) & 1)
    size = np.zeros(masks.shape, dtype=np.int64)
    for b in range(n):
        size += (masks >> b) & 1
    return inside, size


def _min_conductance(d: int, k: int, edges, deg_in) -> tuple[float, int]:
    """Min conductance over masks of a k-vertex graph (local ids) and the argmin mask."""
    masks = np.arange(1, 1 << k, dtype=np.int64)
    inside, size = _mask_tables(k, edges, masks)
    degsum = np.zeros(masks.shape, dtype=np.int64)
    for b in range(k):
        degsum += ((masks >> b) & 1) * deg_in[b]
    cut = degsum - 2 * inside
    ok = size <= k // 2
    if not ok.any():
        return math.inf, 0
    ratio = np.where(ok, cut / (d * np.maximum(size, 1)), np.inf)
    best = int(np.argmin(ratio))
    return float(ratio[best]), int(masks[best])


def graph_conductance_bruteforce(g: Graph) -> tuple[Fraction | float, frozenset[int]]:
    """phi(G) by enumerating all S with 1 <= |S| <= n/2.

    Returns ``(value, witness)``; a graph with fewer than two vertices has no
    admissible S and gets ``(inf, frozenset())``.
    """
    if g.n > BRUTEFORCE_CONDUCTANCE_MAX_N:
        raise GuardExceeded(f"brute-force conductance needs n <= {BRUTEFORCE_CONDUCTANCE_MAX_N}, got {g.n}")
    value, mask = _min_conductance(g.d, g.n, g.edges(), g.degrees)
    if math.isinf(value):
        return math.inf, frozenset()
    witness = frozenset(v for v in range(g.n) if (mask >> v) & 1)
    return cut_conductance(g, witness), witness


def inner_conductance(g: Graph, C: Iterable[int]) -> Fraction | float:
    """phi(G[C]) with the global degree bound; parts with |C| <= 1 get +inf."""
    C = sorted(_as_set(g, C))
    if len(C) <= 1:
        return math.inf
    sub, _ = g.induced(C)
    if sub.n > BRUTEFORCE_CONDUCTANCE_MAX_N:
        raise GuardExceeded("inner conductance by enumeration needs |C| <= 20")
    value, _ = graph_conductance_bruteforce(sub)
    return value


def is_two_clusterable_bruteforce(g: Graph, phi: float) -> tuple[bool, tuple[frozenset[int], ...] | None]:
    """Decide (2, phi)-clusterability by exhaustive search.

    The witness is ``(V,)`` when phi(G) >= phi, a bipartition ``(C1, C2)``
    when one works, and None otherwise.
    """
    n = g.n
    if n > BRUTEFORCE_CLUSTERABLE_MAX_N:
        raise GuardExceeded(f"brute-force clusterability needs n <= {BRUTEFORCE_CLUSTERABLE_MAX_N}, got {n}")
    tol = 1e-12
    whole, _ = graph_conductance_bruteforce(g)
    if float(whole) >= phi - tol:
        return True, (frozenset(range(n)),)
    if n < 2:
        return False, None

    edges = g.edges()
    memo: dict[int, float] = {}

    def part_value(mask: int) -> float:
        if mask in memo:
            return memo[mask]
        verts = [v for v in range(n) if (mask >> v) & 1]
        if len(verts) <= 1:
            val = math.inf
        else:
            local = {v: i for i, v in enumerate(verts)}
            sub_edges = [(local[u], local[v]) for u, v in edges if u in local and v in local]
            deg_in = np.zeros(len(verts), dtype=np.int64)
            for a, b in sub_edges:
                deg_in[a] += 1
                deg_in[b] += 1
            val, _ = _min_conductance(g.d, len(verts), sub_edges, deg_in)
        memo[mask] = val
        return val

    full = (1 << n) - 1
    # C1 always contains vertex 0 so each unordered bipartition is visited once.
    for rest in range(0, 1 << (n - 1)):
        c1 = 1 | (rest << 1)
        if c1 == full:
            continue
        c2 = full ^ c1
        if part_value(c1) >= phi - tol and part_value(c2) >= phi - tol:
            p1 = frozenset(v for v in range(n) if (c1 >> v) & 1)
            return True, (p1, frozenset(range(n)) - p1)
    return False, None
