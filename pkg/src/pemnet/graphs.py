"""Directed ground-truth networks: generators, lag assignment, metrics, serialization.

Edges are ordered pairs (source, target) without self-loops. Each edge carries an
integer transmission lag. The adjacency convention is A[target, source] = 1, so that
row i of A lists the inputs of node i.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DataError, FileFormatError, NilpotentGraphError
from .numerics import _pattern_nilpotent, spectral_radius

GRAPH_MODELS = ("gnm", "er", "ba", "rr", "sw")

Edge = tuple[int, int]


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


@dataclass(frozen=True)
class DirectedGraph:
    """A directed graph with per-edge transmission lags.

    edges are (source, target) pairs; lags maps each edge to a delay in
    {0, ..., delta}. delta records the maximum lag allowed by the generating
    configuration (defaults to the largest assigned lag).
    """

    n: int
    edges: tuple[Edge, ...]
    lags: dict[Edge, int] = field(default_factory=dict)
    delta: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ConfigurationError(f"node count must be >= 1, got {self.n}")
        edges = tuple(sorted({(int(u), int(v)) for (u, v) in self.edges}))
        if not edges:
            raise ConfigurationError("graph must have at least one edge")
        for u, v in edges:
            if u == v:
                raise ConfigurationError(f"self-loop ({u}, {v}) is not allowed")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ConfigurationError(f"edge ({u}, {v}) out of range for n={self.n}")
        lags = {e: int(self.lags.get(e, 0)) for e in edges}
        delta = self.delta if self.delta else max(lags.values())
        for e, lag in lags.items():
            if not 0 <= lag <= delta:
                raise ConfigurationError(f"lag {lag} on edge {e} outside [0, {delta}]")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "lags", lags)
        object.__setattr__(self, "delta", int(delta))

    @property
    def m(self) -> int:
        return len(self.edges)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for u, v in self.edges:
            a[v, u] = 1.0
        return a

    def has_edge(self, source: int, target: int) -> bool:
        return (source, target) in self.lags


@dataclass(frozen=True)
class GraphConfig:
    """Target structural parameters for the random-graph generators."""

    model: str = "gnm"
    n: int = 10
    d_e: float = 0.5
    r_e: float = 0.5
    delta: int = 0
    rewire_p: float = 0.1  # SW only; conventional small-world regime

    def __post_init__(self):
        if self.model not in GRAPH_MODELS:
            raise ConfigurationError(f"unknown graph model {self.model!r}")
        if self.n < 2:
            raise ConfigurationError(f"need n >= 2, got {self.n}")
        if not 0.0 < self.d_e <= 1.0:
            raise ConfigurationError(f"edge density must be in (0, 1], got {self.d_e}")
        if not 0.0 <= self.r_e <= 1.0:
            raise ConfigurationError(f"edge reciprocity must be in [0, 1], got {self.r_e}")
        if self.delta < 0:
            raise ConfigurationError(f"max lag must be >= 0, got {self.delta}")
        if not 0.0 <= self.rewire_p <= 1.0:
            raise ConfigurationError(f"rewiring probability must be in [0, 1]")
        if self.m < 1:
            raise ConfigurationError("configuration yields zero edges")
        if 2 * self.reciprocal_pairs > self.m:
            raise ConfigurationError("2 * reciprocal pairs exceeds edge count")

    @property
    def m(self) -> int:
        """Directed edge count, d_e rounded onto the n(n-1) ordered pairs."""
        return _round_half_up(self.d_e * self.n * (self.n - 1))

    @property
    def reciprocal_pairs(self) -> int:
        """Number p of node pairs connected in both directions.

        Rounded from r_e * m / 2 and clamped so that 2p <= m always holds
        (r_e = 1 with an odd edge count can reciprocate at most m - 1 edges).
        """
        return min(_round_half_up(self.r_e * self.m / 2.0), self.m // 2)


def _orient_backbone(
    backbone: list[Edge], p: int, rng: np.random.Generator
) -> set[Edge]:
    """Make p backbone edges bidirectional and orient the rest uniformly."""
    edges: set[Edge] = set()
    recip = set(rng.choice(len(backbone), size=p, replace=False).tolist()) if p else set()
    for t, (i, j) in enumerate(backbone):
        if t in recip:
            edges.add((i, j))
            edges.add((j, i))
        elif rng.random() < 0.5:
            edges.add((i, j))
        else:
            edges.add((j, i))
    return edges


def gen_gnm(config: GraphConfig, rng: np.random.Generator) -> DirectedGraph:
    """Directed G(n, m) sample with an exact reciprocal-pair count.

    Draws p unordered pairs (both directions added), then m - 2p further
    unordered pairs that each receive a single, uniformly chosen direction.
    """
    n, m, p = config.n, config.m, config.reciprocal_pairs
    s = m - 2 * p
    n_pairs = n * (n - 1) // 2
    if p + s > n_pairs:
        raise ConfigurationError(
            f"infeasible targets: {p} reciprocal + {s} single pairs exceed "
            f"{n_pairs} unordered pairs (n={n}, m={m})"
        )
    unordered = list(itertools.combinations(range(n), 2))
    chosen = rng.choice(n_pairs, size=p + s, replace=False)
    backbone = [unordered[t] for t in chosen]
    edges: set[Edge] = set()
    for i, j in backbone[:p]:
        edges.add((i, j))
        edges.add((j, i))
    for i, j in backbone[p:]:
        edges.add((i, j) if rng.random() < 0.5 else (j, i))
    return DirectedGraph(n, tuple(edges), delta=config.delta)


def _ring_lattice_pairs(n: int, n_edges: int, rng: np.random.Generator) -> list[Edge]:
    """Undirected ring lattice with n_edges edges.

    Fills neighbor-distance classes 1, 2, ... outward; a partial final class is
    sampled uniformly, so leftover edges go to randomly chosen closest
    non-neighbors.
    """
    out: list[Edge] = []
    for d in range(1, n // 2 + 1):
        layer = sorted({tuple(sorted((i, (i + d) % n))) for i in range(n)})
        if len(out) + len(layer) <= n_edges:
            out.extend(layer)
        else:
            need = n_edges - len(out)
            idx = rng.choice(len(layer), size=need, replace=False)
            out.extend(layer[t] for t in sorted(idx.tolist()))
        if len(out) == n_edges:
            return out
    raise ConfigurationError(
        f"ring lattice cannot host {n_edges} edges on {n} nodes"
    )


def _rewire_small_world(
    backbone: list[Edge], n: int, rewire_p: float, rng: np.random.Generator
) -> list[Edge]:
    """Rewire each backbone edge independently with probability rewire_p.

    rewire_p = 0 skips the pass entirely so that SW output matches the RR
    output drawn from the same generator state.
    """
    if rewire_p == 0.0:
        return backbone
    present = set(backbone)
    out: list[Edge] = []
    for i, j in backbone:
        present.discard((i, j))
        if rng.random() < rewire_p:
            candidates = [
                w for w in range(n)
                if w != i and tuple(sorted((i, w))) not in present
            ]
            if candidates:
                w = candidates[rng.integers(0, len(candidates))]
                i, j = tuple(sorted((i, w)))
        present.add((i, j))
        out.append((i, j))
    return sorted(present)


def _preferential_attachment_pairs(
    n: int, n_edges: int, rng: np.random.Generator
) -> list[Edge]:
    """Undirected scale-free backbone with exactly n_edges edges.

    Seeds a complete graph, attaches remaining nodes sequentially with
    degree-proportional target choice, then places leftover edges between
    degree-proportionally sampled non-adjacent pairs.
    """
    if n_edges < n - 1 or n_edges > n * (n - 1) // 2:
        raise ConfigurationError(
            f"preferential attachment needs n-1 <= edges <= n(n-1)/2, got {n_edges}"
        )
    m_att = 1
    while True:
        seed_nodes = m_att + 2
        base = (m_att + 1) * (m_att + 2) // 2 + (n - seed_nodes) * (m_att + 1)
        if seed_nodes > n or base > n_edges:
            break
        m_att += 1
    seed_nodes = m_att + 1
    edges = set(itertools.combinations(range(seed_nodes), 2))
    degree = np.zeros(n)
    degree[:seed_nodes] = seed_nodes - 1
    for new in range(seed_nodes, n):
        targets: set[int] = set()
        while len(targets) < m_att:
            probs = degree[:new] / degree[:new].sum()
            t = int(rng.choice(new, p=probs))
            targets.add(t)
        for t in targets:
            edges.add((t, new))
            degree[t] += 1
            degree[new] += 1
    guard = 0
    while len(edges) < n_edges:
        probs = degree / degree.sum()
        u, v = rng.choice(n, size=2, p=probs)
        e = tuple(sorted((int(u), int(v))))
        if u != v and e not in edges:
            edges.add(e)
            degree[e[0]] += 1
            degree[e[1]] += 1
        guard += 1
        if guard > 100_000:
            raise ConfigurationError("preferential attachment failed to place edges")
    return sorted(edges)


def gen_backbone(config: GraphConfig, rng: np.random.Generator) -> DirectedGraph:
    """Sample a BA, RR, or SW graph hitting the directed edge and reciprocity targets.

    Builds an undirected backbone with m - p edges, upgrades p of them to
    bidirectional pairs, and orients the rest uniformly at random.
    """
    n, m, p = config.n, config.m, config.reciprocal_pairs
    n_undirected = m - p
    if n_undirected > n * (n - 1) // 2:
        raise ConfigurationError(
            f"{n_undirected} undirected backbone edges exceed capacity for n={n}"
        )
    if config.model == "rr":
        backbone = _ring_lattice_pairs(n, n_undirected, rng)
    elif config.model == "sw":
        backbone = _ring_lattice_pairs(n, n_undirected, rng)
        backbone = _rewire_small_world(backbone, n, config.rewire_p, rng)
    elif config.model == "ba":
        backbone = _preferential_attachment_pairs(n, n_undirected, rng)
    else:
        raise ConfigurationError(f"model {config.model!r} has no backbone generator")
    edges = _orient_backbone(backbone, p, rng)
    return DirectedGraph(n, tuple(edges), delta=config.delta)


def gen_graph(config: GraphConfig, rng: np.random.Generator) -> DirectedGraph:
    """Dispatch to the generator for config.model (er is an alias of gnm)."""
    if config.model in ("gnm", "er"):
        return gen_gnm(config, rng)
    return gen_backbone(config, rng)


def gen_graph_non_nilpotent(
    config: GraphConfig, rng: np.random.Generator, max_attempts: int = 1000
) -> DirectedGraph:
    """Sample from config, rejecting nilpotent adjacency matrices."""
    for _ in range(max_attempts):
        g = gen_graph(config, rng)
        if not is_nilpotent(g):
            return g
    raise ConfigurationError(
        f"no non-nilpotent sample within {max_attempts} attempts for {config}"
    )


def assign_lags(g: DirectedGraph, delta: int, rng: np.random.Generator) -> DirectedGraph:
    """Assign each edge an independent lag uniform on {0, ..., delta}."""
    if delta < 0:
        raise ConfigurationError(f"delta must be >= 0, got {delta}")
    if delta == 0:
        lags = {e: 0 for e in g.edges}
    else:
        draws = rng.integers(0, delta + 1, size=g.m)
        lags = {e: int(k) for e, k in zip(g.edges, draws)}
    return DirectedGraph(g.n, g.edges, lags, delta=delta)


def is_nilpotent(g: DirectedGraph) -> bool:
    """True iff the boolean adjacency to the n-th power vanishes (no directed cycle)."""
    return _pattern_nilpotent(g.adjacency() != 0.0)


def normalize_adjacency(g: DirectedGraph) -> tuple[np.ndarray, list[np.ndarray]]:
    """Scale the adjacency to unit spectral radius and split it by edge lag.

    Returns (A / rho, [A1, ..., Ap]) where p = max lag + 1 and Ak holds the
    entries of edges with lag k - 1. The per-lag matrices sum to A / rho
    exactly. Raises NilpotentGraphError when rho = 0 so callers can resample.
    """
    a = g.adjacency()
    rho = spectral_radius(a)
    if rho == 0.0:
        raise NilpotentGraphError("adjacency matrix is nilpotent")
    p = max(g.lags.values()) + 1
    mats = [np.zeros((g.n, g.n)) for _ in range(p)]
    for (u, v), lag in g.lags.items():
        mats[lag][v, u] = 1.0 / rho
    return a / rho, mats


def gen_shooting_star(n: int, hub_degree: int) -> DirectedGraph:
    """A star joined to a path by one edge, all edges bidirectional with lag 0.

    Node 0 is the hub with hub_degree - 1 leaves; the remaining n - hub_degree
    nodes form a path whose first node connects to the hub, so the hub ends up
    with degree hub_degree. The result is a tree on n nodes.
    """
    if not 2 <= hub_degree <= n - 1:
        raise ConfigurationError(
            f"hub degree must lie in [2, n-1] = [2, {n - 1}], got {hub_degree}"
        )
    pairs = [(0, leaf) for leaf in range(1, hub_degree)]
    path = list(range(hub_degree, n))
    pairs.append((0, path[0]))
    pairs.extend(zip(path, path[1:]))
    edges = [(u, v) for u, v in pairs] + [(v, u) for u, v in pairs]
    return DirectedGraph(n, tuple(edges))


def _undirected_neighbors(g: DirectedGraph) -> list[set[int]]:
    nbrs: list[set[int]] = [set() for _ in range(g.n)]
    for u, v in g.edges:
        nbrs[u].add(v)
        nbrs[v].add(u)
    return nbrs


def anticlustering(g: DirectedGraph) -> tuple[np.ndarray, float]:
    """Per-node k_i * (1 - c_i) on the undirected projection, and its mean.

    k_i counts distinct neighbors in either direction; c_i is the local
    clustering coefficient (0 when k_i < 2). High values mark high-degree,
    low-clustering nodes.
    """
    nbrs = _undirected_neighbors(g)
    values = np.zeros(g.n)
    for i in range(g.n):
        k = len(nbrs[i])
        if k < 2:
            c = 0.0
        else:
            nb = sorted(nbrs[i])
            links = sum(
                1 for a in range(len(nb)) for b in range(a + 1, len(nb))
                if nb[b] in nbrs[nb[a]]
            )
            c = links / (k * (k - 1) / 2)
        values[i] = k * (1.0 - c)
    return values, float(values.mean())


def graph_metrics(g: DirectedGraph) -> tuple[float, float]:
    """(edge density, edge reciprocity) of a directed graph."""
    if g.m == 0:
        raise DataError("reciprocity is undefined for a graph with no edges")
    edge_set = set(g.edges)
    reciprocated = sum(1 for (u, v) in g.edges if (v, u) in edge_set)
    return g.m / (g.n * (g.n - 1)), reciprocated / g.m


def save_edge_list(g: DirectedGraph, path: str) -> None:
    """Write 'n m delta' then one 'source target lag' line per edge."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{g.n} {g.m} {g.delta}\n")
        for u, v in g.edges:
            fh.write(f"{u} {v} {g.lags[(u, v)]}\n")


def load_edge_list(path: str) -> DirectedGraph:
    """Parse an edge-list file, rejecting self-loops and out-of-range entries."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise FileFormatError(f"{path}: empty edge-list file")
    try:
        n, m, delta = (int(tok) for tok in lines[0].split())
    except ValueError as exc:
        raise FileFormatError(f"{path}:1: bad header {lines[0]!r}") from exc
    if len(lines) - 1 != m:
        raise FileFormatError(f"{path}: header claims {m} edges, found {len(lines) - 1}")
    edges = []
    lags = {}
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            u, v, lag = (int(tok) for tok in line.split())
        except ValueError as exc:
            raise FileFormatError(f"{path}:{lineno}: bad edge line {line!r}") from exc
        if u == v:
            raise FileFormatError(f"{path}:{lineno}: self-loop {u}->{v}")
        if not (0 <= u < n and 0 <= v < n):
            raise FileFormatError(f"{path}:{lineno}: node index out of range")
        if not 0 <= lag <= delta:
            raise FileFormatError(f"{path}:{lineno}: lag {lag} outside [0, {delta}]")
        edges.append((u, v))
        lags[(u, v)] = lag
    try:
        return DirectedGraph(n, tuple(edges), lags, delta=delta)
    except ConfigurationError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc
