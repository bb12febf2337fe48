"""Hypergraph to simple-graph expansions and the normalized adjacency operator."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .core import Hypergraph


@dataclass(frozen=True)
class StarExpansion:
    """Bipartite graph: original nodes ``0..n-1`` then one star vertex per hyperedge.

    The edge between node ``p`` and the star vertex of ``e`` weighs ``w(e) / |e|``.
    """

    graph: sp.csr_matrix
    star_offset: int

    @property
    def num_vertices(self) -> int:
        return self.graph.shape[0]


def _symmetric(rows, cols, vals, n) -> sp.csr_matrix:
    a = sp.coo_matrix((vals, (rows, cols)), shape=(n, n))
    a = (a + a.T).tocsr()
    a.sum_duplicates()
    a.sort_indices()
    return a


def star_expand(h: Hypergraph) -> StarExpansion:
    n, m = h.num_nodes, h.num_edges
    z = (h.edge_weights / h.edge_sizes)[h.edge_of_pin]
    g = _symmetric(h.pins, n + h.edge_of_pin, z, n + m)
    return StarExpansion(g, n)


def _clique_triplets(h: Hypergraph, edge_ids):
    rows, cols, vals = [], [], []
    for e in edge_ids:
        pins = h.edge(e)
        s = pins.size
        if s < 2:
            continue
        iu, ju = np.triu_indices(s, k=1)
        rows.append(pins[iu])
        cols.append(pins[ju])
        vals.append(np.full(iu.size, h.edge_weights[e] / (s - 1)))
    if not rows:
        return np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0)
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)


def clique_expand(h: Hypergraph) -> sp.csr_matrix:
    """Every hyperedge becomes a clique with pair weight ``w(e) / (|e| - 1)``; parallel pairs add up."""
    r, c, v = _clique_triplets(h, range(h.num_edges))
    return _symmetric(r, c, v, h.num_nodes)


def hybrid_expand(h: Hypergraph, size_threshold: int = 3) -> StarExpansion:
    """Clique-expand hyperedges with ``|e| <= size_threshold``, star-expand the rest.

    Star vertices for the large hyperedges are appended after the original nodes
    in hyperedge order.
    """
    if size_threshold < 1:
        raise ValueError("size_threshold must be >= 1")
    small = np.flatnonzero(h.edge_sizes <= size_threshold)
    large = np.flatnonzero(h.edge_sizes > size_threshold)
    n = h.num_nodes
    r, c, v = _clique_triplets(h, small)
    star_id = np.full(h.num_edges, -1, dtype=np.int64)
    star_id[large] = n + np.arange(large.size)
    in_large = star_id[h.edge_of_pin] >= 0
    z = (h.edge_weights / h.edge_sizes)[h.edge_of_pin]
    rows = np.concatenate([r, h.pins[in_large]])
    cols = np.concatenate([c, star_id[h.edge_of_pin][in_large]])
    vals = np.concatenate([v, z[in_large]])
    return StarExpansion(_symmetric(rows, cols, vals, n + large.size), n)


class NormalizedAdjacencyOp:
    """``x -> D^{-1/2} A D^{-1/2} x`` for a symmetric nonnegative adjacency ``A``.

    Zero-degree vertices are mapped to zero.
    """

    def __init__(self, adjacency):
        a = sp.csr_matrix(adjacency, dtype=np.float64)
        if a.shape[0] != a.shape[1]:
            raise ValueError("adjacency must be square")
        if a.nnz and a.data.min() < 0:
            raise ValueError("adjacency weights must be nonnegative")
        deg = np.asarray(a.sum(axis=1)).ravel()
        inv_sqrt = np.zeros_like(deg)
        pos = deg > 0
        inv_sqrt[pos] = 1.0 / np.sqrt(deg[pos])
        self.adjacency = a
        self.degrees = deg
        self.inv_sqrt_degrees = inv_sqrt
        scale = sp.diags(inv_sqrt)
        self.matrix = (scale @ a @ scale).tocsr()

    @property
    def shape(self):
        return self.matrix.shape

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=np.float64)

    __call__ = apply

    def __matmul__(self, x):
        return self.apply(x)


def normalized_adjacency(g) -> NormalizedAdjacencyOp:
    return NormalizedAdjacencyOp(g)
