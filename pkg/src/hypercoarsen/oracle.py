"""Brute-force reference computations for small instances.

Everything here is deliberately naive and shares no algorithmic code with
the main paths: dense pseudoinverses, exhaustive subset enumeration and
plain Python cut counting.
"""
from __future__ import annotations

import itertools
import math
from collections import deque

import numpy as np

from .core import Hypergraph, Partition

MAX_CUT_VERTICES = 20
MAX_HLC_NODES = 16
MAX_BIPARTITION_NODES = 18


def dense_laplacian(adjacency) -> np.ndarray:
    a = adjacency.toarray() if hasattr(adjacency, "toarray") else np.array(adjacency, dtype=float)
    a = np.asarray(a, dtype=float)
    if not np.allclose(a, a.T):
        raise ValueError("adjacency must be symmetric")
    np.fill_diagonal(a, 0.0)
    return np.diag(a.sum(axis=1)) - a


def _same_component(a: np.ndarray, p: int, q: int) -> bool:
    seen = {p}
    todo = deque([p])
    while todo:
        u = todo.popleft()
        if u == q:
            return True
        for v in np.flatnonzero(a[u] > 0):
            if v not in seen:
                seen.add(int(v))
                todo.append(int(v))
    return False


def exact_resistance(adjacency, p: int, q: int) -> float:
    """Effective resistance ``b_pq^T L^+ b_pq``; ``inf`` when p and q are disconnected."""
    lap = dense_laplacian(adjacency)
    if p == q:
        return 0.0
    a = -lap.copy()
    np.fill_diagonal(a, 0.0)
    if not _same_component(a, p, q):
        return math.inf
    lam, u = np.linalg.eigh(lap)
    keep = lam > 1e-9 * max(lam.max(), 1e-300)
    b = np.zeros(lap.shape[0])
    b[p], b[q] = 1.0, -1.0
    proj = u[:, keep].T @ b
    return float(np.sum(proj ** 2 / lam[keep]))


def all_pairs_resistance(adjacency) -> np.ndarray:
    lap = dense_laplacian(adjacency)
    lp = np.linalg.pinv(lap, hermitian=True)
    d = np.diag(lp)
    return d[:, None] + d[None, :] - 2 * lp


def brute_min_cut(net) -> tuple[float, list[int]]:
    """Exhaustive minimum s-t cut over every source-side assignment.

    ``net`` needs ``num_vertices``, ``source``, ``sink`` and ``arcs()`` giving
    ``(u, v, capacity)`` with ``math.inf`` for uncuttable arcs.  Returns the
    value and the source-side non-terminal vertices.
    """
    s, t = net.source, net.sink
    inner = [v for v in range(net.num_vertices) if v not in (s, t)]
    if len(inner) > MAX_CUT_VERTICES:
        raise ValueError(f"brute_min_cut refuses {len(inner)} > {MAX_CUT_VERTICES} vertices")
    pos = {v: i for i, v in enumerate(inner)}
    arcs = [a for a in net.arcs() if a[2] > 0]
    best, best_side = math.inf, None
    n = len(inner)
    # bit i set -> inner[i] on the source side
    masks = np.arange(1 << n, dtype=np.int64)
    total = np.zeros(masks.size)

    def side_of(v):
        if v == s:
            return np.ones(masks.size, dtype=bool)
        if v == t:
            return np.zeros(masks.size, dtype=bool)
        return ((masks >> pos[v]) & 1).astype(bool)

    for u, v, cap in arcs:
        crossing = side_of(u) & ~side_of(v)
        if math.isinf(cap):
            total[crossing] = math.inf
        else:
            total[crossing] += cap
    i = int(np.argmin(total))
    best = float(total[i])
    best_side = [inner[j] for j in range(n) if (i >> j) & 1]
    return best, best_side


def _edge_sets(h: Hypergraph):
    return [(set(h.edge(e).tolist()), float(h.edge_weights[e])) for e in range(h.num_edges)]


def _plain_cut(edges, s: set) -> float:
    return sum(w for pins, w in edges if pins & s and pins - s)


def _plain_degrees(h: Hypergraph, edges):
    d = [0.0] * h.num_nodes
    for pins, w in edges:
        for v in pins:
            d[v] += w
    return d


def brute_best_hlc(h: Hypergraph, c_ref, beta: float) -> tuple[list[int], float]:
    """Minimum localized conductance over every nonempty node subset with positive denominator."""
    n = h.num_nodes
    if n > MAX_HLC_NODES:
        raise ValueError(f"brute_best_hlc refuses {n} > {MAX_HLC_NODES} nodes")
    edges = _edge_sets(h)
    d = _plain_degrees(h, edges)
    c_ref = set(int(v) for v in c_ref)
    best, best_s = math.inf, None
    for size in range(1, n + 1):
        for combo in itertools.combinations(range(n), size):
            s = set(combo)
            denom = sum(d[v] for v in s & c_ref) - beta * sum(d[v] for v in s - c_ref)
            if denom <= 0:
                continue
            val = _plain_cut(edges, s) / denom
            if val < best - 1e-15:
                best, best_s = val, sorted(s)
    if best_s is None:
        raise ValueError("no node set has a positive local-conductance denominator")
    return best_s, best


def brute_best_bipartition(h: Hypergraph, epsilon: float) -> tuple[Partition, float]:
    """Minimum-cut bipartition among all that satisfy the epsilon balance bounds."""
    n = h.num_nodes
    if n > MAX_BIPARTITION_NODES:
        raise ValueError(f"brute_best_bipartition refuses {n} > {MAX_BIPARTITION_NODES} nodes")
    edges = _edge_sets(h)
    w = [float(x) for x in h.node_weights]
    total = sum(w)
    lo, hi = (0.5 - epsilon) * total, (0.5 + epsilon) * total
    slack = 1e-9 * max(1.0, total)
    best, best_s = math.inf, None
    # node 0 stays in block 0; the mirrored assignment has the same cut and loads
    for bits in range(1 << (n - 1)):
        s = {0} | {i + 1 for i in range(n - 1) if not (bits >> i) & 1}
        load0 = sum(w[v] for v in s)
        if not (lo - slack <= load0 <= hi + slack and lo - slack <= total - load0 <= hi + slack):
            continue
        val = _plain_cut(edges, s)
        if val < best:
            best, best_s = val, s
    if best_s is None:
        raise ValueError("no bipartition satisfies the balance constraint")
    blocks = np.array([0 if v in best_s else 1 for v in range(n)])
    return Partition(blocks, 2, epsilon), best
