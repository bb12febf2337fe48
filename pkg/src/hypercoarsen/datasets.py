"""Synthetic hypergraphs with known structure for tests, demos and benchmarks."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import Hypergraph


@dataclass(frozen=True)
class PlantedHypergraph:
    hypergraph: Hypergraph
    labels: np.ndarray
    planted_cut: float


def _rng(seed):
    return np.random.default_rng(seed)


def planted_partition(n: int = 500, blocks: int = 2, *, internal_degree: float = 6.0,
                      cross_edges: int | None = None, edge_size=(2, 4), seed=0) -> PlantedHypergraph:
    """Equal-size blocks of nodes joined by random small hyperedges.

    Every block gets a random spanning path so it is connected, plus random
    hyperedges until the average internal degree is reached.  ``cross_edges``
    hyperedges (default ``n // 50``) pick pins from two different blocks.
    """
    if blocks < 1 or n < 2 * blocks:
        raise ValueError("need at least two nodes per block")
    rng = _rng(seed)
    labels = np.repeat(np.arange(blocks), int(np.ceil(n / blocks)))[:n]
    labels = labels[rng.permutation(n)]
    members = [np.flatnonzero(labels == b) for b in range(blocks)]
    lo, hi = edge_size
    edges = []
    for mem in members:
        order = rng.permutation(mem)
        edges.extend([int(a), int(b)] for a, b in zip(order[:-1], order[1:]))
        pins_needed = internal_degree * mem.size - 2 * (mem.size - 1)
        while pins_needed > 0:
            size = int(rng.integers(lo, hi + 1))
            size = min(size, mem.size)
            edges.append(rng.choice(mem, size, replace=False).tolist())
            pins_needed -= size
    cross = n // 50 if cross_edges is None else cross_edges
    for _ in range(cross if blocks > 1 else 0):
        a, b = rng.choice(blocks, 2, replace=False)
        size = int(rng.integers(lo, hi + 1))
        na = int(rng.integers(1, size))
        pins = np.concatenate([rng.choice(members[a], min(na, members[a].size), replace=False),
                               rng.choice(members[b], min(size - na, members[b].size), replace=False)])
        edges.append(pins.tolist())
    h = Hypergraph.from_edges(edges, num_nodes=n)
    pl = labels[h.pins]
    split = h.edge_reduce(pl, np.minimum) != h.edge_reduce(pl, np.maximum)
    return PlantedHypergraph(h, labels, float(h.edge_weights[split].sum()))


def barbell() -> Hypergraph:
    """Two triangles of 2-pin unit edges joined by the bridge ``{2, 3}``."""
    return Hypergraph.from_edges([[0, 1], [1, 2], [0, 2], [2, 3], [3, 4], [4, 5], [3, 5]])


def bridged_blobs(size: int = 8, density: float = 1.0, seed=0) -> tuple[Hypergraph, int]:
    """Two dense blobs of 2-pin unit edges joined by one bridge; returns ``(h, bridge_edge_id)``.

    Each blob is a ring plus every chord kept with probability ``density``.
    The bridge joins node ``0`` and node ``size``.
    """
    if size < 3:
        raise ValueError("blobs need at least three nodes")
    rng = _rng(seed)
    edges = []
    for off in (0, size):
        for i in range(size):
            edges.append([off + i, off + (i + 1) % size])
        for i, j in itertools.combinations(range(size), 2):
            if (j - i) % size in (1, size - 1):
                continue
            if rng.random() < density:
                edges.append([off + i, off + j])
    edges.append([0, size])
    return Hypergraph.from_edges(edges, num_nodes=2 * size), len(edges) - 1


def random_hypergraph(n: int, m: int, max_size: int = 4, *, weighted: bool = False,
                      node_weighted: bool = False, seed=0) -> Hypergraph:
    """Hyperedges with 2..max_size distinct random pins (sizes capped at ``n``)."""
    rng = _rng(seed)
    edges = []
    for _ in range(m):
        size = int(rng.integers(2, max(2, min(max_size, n)) + 1))
        edges.append(rng.choice(n, size, replace=False).tolist())
    ew = rng.integers(1, 6, m).astype(float) if weighted else None
    nw = rng.integers(1, 4, n).astype(float) if node_weighted else None
    return Hypergraph.from_edges(edges, num_nodes=n, edge_weights=ew, node_weights=nw)


def random_connected_graph(n: int, extra: int, seed=0) -> Hypergraph:
    """Random spanning tree plus ``extra`` random 2-pin edges (duplicates collapse)."""
    rng = _rng(seed)
    perm = rng.permutation(n)
    pairs = set()
    for i in range(1, n):
        j = perm[int(rng.integers(0, i))]
        pairs.add((min(perm[i], j), max(perm[i], j)))
    for _ in range(extra):
        a, b = rng.choice(n, 2, replace=False)
        pairs.add((min(a, b), max(a, b)))
    return Hypergraph.from_edges(sorted((int(a), int(b)) for a, b in pairs), num_nodes=n)


def disjoint_union(parts) -> Hypergraph:
    """Place hypergraphs side by side with consecutive node ids."""
    edges, ew, nw = [], [], []
    off = 0
    for h in parts:
        edges.extend([[p + off for p in e] for e in h.edges()])
        ew.extend(h.edge_weights.tolist())
        nw.extend(h.node_weights.tolist())
        off += h.num_nodes
    return Hypergraph.from_edges(edges, num_nodes=off, edge_weights=ew or None, node_weights=nw)
