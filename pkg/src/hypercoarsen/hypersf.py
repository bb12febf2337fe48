"""Strongly-local flow refinement of node clusters.

A seed cluster is grown or trimmed inside a small neighborhood by repeatedly
solving an s-t min-cut problem whose optimum certifies a lower localized
conductance (a Dinkelbach iteration on the ratio).  Hyperedges become
directed gadgets ``e_in -> e_out`` so that a hyperedge costs its weight
exactly when it is split.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .core import ClusterMap, Hypergraph, as_mask, hlc_score
from .exceptions import UndefinedMetricError

SOURCE, SINK = 0, 1
DEFAULT_BETA = 1.0
DEFAULT_XI = 1e-3
DEFAULT_MAX_EXPANSIONS = 3
UNDEFINED_ALPHA = 1.0
_IMPROVE_TOL = 1e-12


def neighborhood(h: Hypergraph, s) -> np.ndarray:
    """Sorted ids of nodes sharing a hyperedge with ``s``, excluding ``s``."""
    mask = as_mask(h, s)
    if not mask.any() or h.num_edges == 0:
        return np.zeros(0, dtype=np.int64)
    hit = h.edge_reduce(mask[h.pins].astype(np.int64)) > 0
    near = np.zeros(h.num_nodes, dtype=bool)
    near[h.pins[hit[h.edge_of_pin]]] = True
    near &= ~mask
    return np.flatnonzero(near)


class FlowNetwork:
    """Directed network in adjacency-array form with paired residual arcs.

    Vertex 0 is the source and 1 the sink; local nodes follow in the order of
    ``node_ids``, then one ``(e_in, e_out)`` pair per included hyperedge.
    """

    def __init__(self, num_vertices: int):
        self.num_vertices = num_vertices
        self.source, self.sink = SOURCE, SINK
        self._tail: list[int] = []
        self._head: list[int] = []
        self._cap: list[float] = []
        self.node_ids = np.zeros(0, dtype=np.int64)
        self.edge_ids = np.zeros(0, dtype=np.int64)
        self.alpha = math.nan
        self.constant = 0.0

    def add_arc(self, u: int, v: int, cap: float) -> None:
        if cap < 0:
            raise ValueError("capacities must be nonnegative")
        if u == self.sink or v == self.source:
            raise ValueError("the source has only outgoing and the sink only incoming arcs")
        self._tail.append(u)
        self._head.append(v)
        self._cap.append(cap)

    def arcs(self):
        return list(zip(self._tail, self._head, self._cap))

    @property
    def num_arcs(self) -> int:
        return len(self._cap)

    def cut_capacity(self, source_side) -> float:
        """Capacity of the cut whose source side is ``{s} | source_side``."""
        side = np.zeros(self.num_vertices, dtype=bool)
        side[list(source_side)] = True
        side[self.source], side[self.sink] = True, False
        total = 0.0
        for u, v, c in self.arcs():
            if side[u] and not side[v]:
                total += c
        return total


def _max_flow_arrays(n, tail, head, cap, s, t):
    """Dinic's algorithm.  Returns ``(flow, residual capacities, arc arrays)``."""
    m = len(cap)
    # arc 2i is forward, 2i+1 its reverse
    to = np.empty(2 * m, dtype=np.int64)
    to[0::2], to[1::2] = head, tail
    frm = np.empty(2 * m, dtype=np.int64)
    frm[0::2], frm[1::2] = tail, head
    res = np.zeros(2 * m)
    res[0::2] = cap
    order = np.argsort(frm, kind="stable")
    start = np.searchsorted(frm[order], np.arange(n + 1))
    adj = [order[start[u]:start[u + 1]].tolist() for u in range(n)]
    to_l = to.tolist()
    r = res.tolist()
    flow = 0.0
    while True:
        level = [-1] * n
        level[s] = 0
        dq = deque([s])
        while dq:
            u = dq.popleft()
            for a in adj[u]:
                if r[a] > 0 and level[to_l[a]] < 0:
                    level[to_l[a]] = level[u] + 1
                    dq.append(to_l[a])
        if level[t] < 0:
            break
        it = [0] * n
        while True:
            # iterative DFS for one augmenting path in the level graph
            path = []
            u = s
            while u != t:
                lst = adj[u]
                while it[u] < len(lst):
                    a = lst[it[u]]
                    v = to_l[a]
                    if r[a] > 0 and level[v] == level[u] + 1:
                        break
                    it[u] += 1
                if it[u] == len(lst):
                    if u == s:
                        break
                    level[u] = -1
                    a = path.pop()
                    u = to_l[a ^ 1]
                    it[u] += 1
                    continue
                path.append(lst[it[u]])
                u = to_l[lst[it[u]]]
            if u != t:
                break
            push = min(r[a] for a in path)
            for a in path:
                r[a] -= push
                r[a ^ 1] += push
            flow += push
    return flow, r, adj, to_l


def max_flow(net: FlowNetwork) -> tuple[float, np.ndarray]:
    """Maximum s-t flow value and the source side of a minimum cut.

    Infinite capacities are replaced by one more than the sum of all finite
    capacities.  The cut side is the set of vertices reachable from the
    source in the final residual network, returned as local node ids.
    """
    caps = np.array(net._cap, dtype=np.float64)
    finite = np.isfinite(caps)
    big = float(caps[finite].sum()) + 1.0
    caps[~finite] = big
    flow, r, adj, to = _max_flow_arrays(net.num_vertices, net._tail, net._head, caps.tolist(),
                                        net.source, net.sink)
    seen = [False] * net.num_vertices
    seen[net.source] = True
    dq = deque([net.source])
    while dq:
        u = dq.popleft()
        for a in adj[u]:
            if r[a] > 0 and not seen[to[a]]:
                seen[to[a]] = True
                dq.append(to[a])
    k = len(net.node_ids)
    side = np.array([i for i in range(k) if seen[2 + i]], dtype=np.int64)
    return flow, net.node_ids[side] if k else side


def build_flow_network(h: Hypergraph, local_nodes, reference, alpha: float,
                       beta: float = DEFAULT_BETA) -> FlowNetwork:
    """Network whose min cut minimizes ``cut(S) + alpha*vol(C - S) + alpha*beta*vol(S - C)``.

    ``S`` ranges over subsets of ``local_nodes`` and ``C = reference`` must be
    contained in them.  Hyperedges touching the local set get a gadget; their
    pins outside the local set are merged into the sink.  ``net.constant``
    holds ``alpha * vol(C)`` so that ``capacity - constant`` is
    ``cut(S) - alpha * (vol(S & C) - beta * vol(S - C))``.
    """
    if not alpha > 0 or not math.isfinite(alpha):
        raise ValueError("alpha must be positive and finite")
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    local = as_mask(h, local_nodes)
    ref = as_mask(h, reference)
    if np.any(ref & ~local):
        raise ValueError("the reference set must lie inside the local node set")
    ids = np.flatnonzero(local)
    vid = np.full(h.num_nodes, -1, dtype=np.int64)
    vid[ids] = 2 + np.arange(ids.size)
    touched = h.edge_reduce(local[h.pins].astype(np.int64)) > 0 if h.num_edges else \
        np.zeros(0, dtype=bool)
    edges = np.flatnonzero(touched)
    net = FlowNetwork(2 + ids.size + 2 * edges.size)
    net.node_ids = ids
    net.edge_ids = edges
    net.alpha = float(alpha)
    d = h.degrees
    for v in ids:
        if ref[v]:
            if d[v] > 0:
                net.add_arc(SOURCE, int(vid[v]), alpha * d[v])
        elif beta * d[v] > 0:
            net.add_arc(int(vid[v]), SINK, alpha * beta * d[v])
    base = 2 + ids.size
    for j, e in enumerate(edges):
        e_in, e_out = base + 2 * j, base + 2 * j + 1
        net.add_arc(e_in, e_out, float(h.edge_weights[e]))
        outside = False
        for v in h.edge(e):
            if local[v]:
                net.add_arc(int(vid[v]), e_in, math.inf)
                net.add_arc(e_out, int(vid[v]), math.inf)
            else:
                outside = True
        if outside:
            net.add_arc(e_out, SINK, math.inf)
    net.constant = float(alpha * d[ref].sum())
    return net


@dataclass(frozen=True)
class Refinement:
    nodes: np.ndarray
    hlc: float
    alphas: tuple
    visited: np.ndarray
    flow_solves: int
    reference: np.ndarray = field(repr=False, default=None)


def _reference(h: Hypergraph, seed_mask: np.ndarray, reference) -> np.ndarray:
    if reference is None or (isinstance(reference, str) and reference == "seed"):
        return seed_mask.copy()
    if isinstance(reference, str):
        if reference != "neighborhood":
            raise ValueError(f"unknown reference {reference!r}")
        ref = seed_mask.copy()
        ref[neighborhood(h, seed_mask)] = True
        return ref
    return as_mask(h, reference).copy()


def refine_seed_detailed(h: Hypergraph, seed, beta: float = DEFAULT_BETA, xi: float = DEFAULT_XI,
                         max_expansions: int = DEFAULT_MAX_EXPANSIONS,
                         reference=None) -> Refinement:
    """Dinkelbach refinement of ``seed`` under localized conductance.

    ``reference`` selects the reference set ``C``: ``None``/``"seed"`` uses the
    seed, ``"neighborhood"`` the seed plus its neighbors, or pass node ids.
    The local node set starts as ``C | seed | neighbors(seed)`` and grows by
    the neighbors of the current set each round; at most ``max_expansions``
    flow problems are solved.
    """
    s_mask = as_mask(h, seed).copy()
    if not s_mask.any():
        raise ValueError("seed must be nonempty")
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    if not xi > 0:
        raise ValueError("xi must be positive")
    if max_expansions < 1:
        raise ValueError("max_expansions must be >= 1")
    ref = _reference(h, s_mask, reference)
    alpha = hlc_score(h, s_mask, ref, beta)
    current = alpha
    alphas = [alpha]
    visited = ref | s_mask
    solves = 0
    if alpha == 0:
        return Refinement(np.flatnonzero(s_mask), 0.0, tuple(alphas), np.flatnonzero(visited),
                          0, np.flatnonzero(ref))
    if not math.isfinite(alpha):
        alpha = UNDEFINED_ALPHA
    local = visited.copy()
    for _ in range(max_expansions):
        local[neighborhood(h, s_mask)] = True
        local |= s_mask
        visited |= local
        net = build_flow_network(h, local, ref, alpha, beta)
        value, side = max_flow(net)
        solves += 1
        if value >= net.constant - _IMPROVE_TOL * max(1.0, net.constant) or side.size == 0:
            break
        cand = np.zeros(h.num_nodes, dtype=bool)
        cand[side] = True
        score = hlc_score(h, cand, ref, beta)
        if not score < current:
            break
        s_mask, previous, current = cand, current, score
        alphas.append(score)
        alpha = score
        if score == 0 or (math.isfinite(previous) and previous - score <= xi):
            break
    return Refinement(np.flatnonzero(s_mask), float(current), tuple(alphas),
                      np.flatnonzero(visited), solves, np.flatnonzero(ref))


def refine_seed(h: Hypergraph, seed, beta: float = DEFAULT_BETA, xi: float = DEFAULT_XI,
                max_expansions: int = DEFAULT_MAX_EXPANSIONS, reference=None) -> np.ndarray:
    """Node ids of the refined cluster; see :func:`refine_seed_detailed`."""
    return refine_seed_detailed(h, seed, beta, xi, max_expansions, reference).nodes


def select_seeds(hier, count_limit: int | None = None) -> list[np.ndarray]:
    """Singleton clusters of a coarsening hierarchy, smallest resistance first.

    Each seed is a one-node array.  Seeds are ordered by their accumulated
    weight, then by the smallest finest-level resistance among their
    hyperedges, then by node id.
    """
    h = hier.source
    cm = hier.cluster_map()
    sizes = cm.sizes()
    single = np.flatnonzero(sizes[cm.cluster_of] == 1)
    if single.size == 0:
        return []
    eta = hier.eta[cm.cluster_of[single]]
    if hier.levels and h.num_edges:
        r = hier.levels[0].resistances.r
        best = np.full(h.num_nodes, np.inf)
        np.minimum.at(best, h.pins, r[h.edge_of_pin])
        diam = best[single]
    else:
        diam = np.zeros(single.size)
    order = np.lexsort((single, diam, eta))
    seeds = [np.array([v]) for v in single[order]]
    return seeds if count_limit is None else seeds[:count_limit]


def absorb_singletons(hier, beta: float = DEFAULT_BETA, xi: float = DEFAULT_XI,
                      max_expansions: int = DEFAULT_MAX_EXPANSIONS,
                      count_limit: int | None = None) -> tuple[ClusterMap, int]:
    """Refine every singleton seed of ``hier`` and move it into the cluster that
    holds most of its refined set (non-singleton clusters preferred).

    The seed's neighbors join it in the reference set; a single node as
    reference makes every larger set infeasible at ``beta >= 1``.  Moves are
    decided against the unrefined clustering, so the result does not depend
    on the seed order.  Returns the new map and the number of moved nodes.
    """
    h = hier.source
    cm = hier.cluster_map()
    if not hier.levels:
        return cm, 0
    labels = cm.cluster_of.copy()
    sizes = cm.sizes()
    moved = 0
    for s in select_seeds(hier, count_limit):
        v = int(s[0])
        if h.degrees[v] == 0:
            continue
        got = refine_seed(h, s, beta, xi, max_expansions, reference="neighborhood")
        others = got[got != v]
        if others.size == 0:
            continue
        cl = cm.cluster_of[others]
        big = cl[sizes[cl] > 1]
        cl = big if big.size else cl
        labels[v] = int(np.argmax(np.bincount(cl)))
        moved += 1
    return ClusterMap.from_labels(labels), moved


def local_hlc_or_nan(h: Hypergraph, s, c_ref, beta: float) -> float:
    try:
        v = hlc_score(h, s, c_ref, beta)
    except UndefinedMetricError:
        return math.nan
    return v if math.isfinite(v) else math.nan
