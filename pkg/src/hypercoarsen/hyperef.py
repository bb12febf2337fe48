"""Multilevel coarsening driven by hyperedge effective-resistance estimates.

Each level embeds the current hypergraph, estimates one resistance per
hyperedge, inflates it by the accumulated weight of the supernodes it touches
and contracts low-resistance hyperedges greedily.  Edges bridging otherwise
well-connected regions carry large resistance and survive.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import ClusterMap, Hypergraph
from .embedding import DEFAULT_RHO, embed
from .exceptions import DegenerateInputError, HypergraphError
from .resistance import DEFAULT_M, ResistanceVector, estimate_resistances

DEFAULT_LEVELS = 10
DEFAULT_REDUCTION = 0.75
DEFAULT_PERCENTILE = 50.0
DEFAULT_MAX_LEVEL_REDUCTION = 0.5
DEFAULT_MAX_EDGE_SIZE = 300


@dataclass(frozen=True)
class CoarseningLevel:
    """One contraction step.

    ``cluster_map`` sends the nodes of the finer hypergraph to the nodes of
    ``hypergraph``; ``resistances`` (raw) and ``adjusted`` (after node-weight
    propagation) are indexed by the finer level's hyperedges.
    """

    hypergraph: Hypergraph
    cluster_map: ClusterMap
    eta: np.ndarray
    resistances: ResistanceVector
    adjusted: np.ndarray
    delta: float
    edge_map: np.ndarray


@dataclass(frozen=True)
class CoarseningHierarchy:
    source: Hypergraph
    levels: tuple
    params: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.levels)

    @property
    def coarsest(self) -> Hypergraph:
        return self.levels[-1].hypergraph if self.levels else self.source

    def node_counts(self) -> list[int]:
        return [self.source.num_nodes] + [lv.hypergraph.num_nodes for lv in self.levels]

    def cluster_map(self, level: int | None = None) -> ClusterMap:
        """Composed map from the source nodes to the nodes of ``level`` (default: coarsest)."""
        upto = len(self.levels) if level is None else level
        if not 0 <= upto <= len(self.levels):
            raise IndexError("level out of range")
        cm = ClusterMap.identity(self.source.num_nodes)
        for lv in self.levels[:upto]:
            cm = cm.compose(lv.cluster_map)
        return cm

    @property
    def eta(self) -> np.ndarray:
        return self.levels[-1].eta if self.levels else np.zeros(self.source.num_nodes)


def apply_nwp(h: Hypergraph, r, eta) -> np.ndarray:
    """Add the accumulated weight of every pin to its hyperedge's resistance."""
    rr = np.asarray(r.r if isinstance(r, ResistanceVector) else r, dtype=np.float64)
    eta = np.asarray(eta, dtype=np.float64)
    if eta.shape != (h.num_nodes,):
        raise ValueError("eta must have one entry per node")
    if rr.shape != (h.num_edges,):
        raise ValueError("resistances must have one entry per hyperedge")
    if h.num_edges == 0:
        return rr.copy()
    return rr + h.edge_reduce(eta[h.pins])


def percentile_delta(r: np.ndarray, percentile: float = DEFAULT_PERCENTILE) -> float:
    """Threshold that marks roughly ``percentile`` percent of the values as candidates.

    The value just above the percentile is returned, so ties at the cut point
    are included and ``percentile=100`` admits everything.
    """
    r = np.asarray(r, dtype=np.float64)
    if r.size == 0:
        return -np.inf
    if not 0 <= percentile <= 100:
        raise ValueError("percentile must lie in [0, 100]")
    q = float(np.percentile(r, percentile, method="inverted_cdf")) if percentile > 0 else -np.inf
    return float(np.nextafter(q, np.inf))


def select_contractions(h: Hypergraph, r, delta: float, *,
                        max_edge_size: int | None = DEFAULT_MAX_EDGE_SIZE,
                        max_removed: int | None = None) -> tuple[ClusterMap, np.ndarray]:
    """Greedy disjoint contraction in ascending-resistance order.

    A hyperedge with ``r[e] < delta`` is contracted when none of its pins has
    been claimed yet.  ``max_removed`` bounds the number of nodes that
    disappear.  Returns the cluster map and, per cluster, the hyperedge that
    defined it (``-1`` for singletons).
    """
    r = np.asarray(r.r if isinstance(r, ResistanceVector) else r, dtype=np.float64)
    if r.shape != (h.num_edges,):
        raise ValueError("resistances must have one entry per hyperedge")
    if not np.all(np.isfinite(r)):
        raise ValueError("resistances must be finite")
    n = h.num_nodes
    label = np.full(n, -1, dtype=np.int64)
    budget = n if max_removed is None else int(max_removed)
    sizes = h.edge_sizes
    ok = (r < delta) & (sizes >= 2)
    if max_edge_size is not None:
        ok &= sizes <= max_edge_size
    cand = np.flatnonzero(ok)
    cand = cand[np.argsort(r[cand], kind="stable")]
    defining = []
    for e in cand:
        if budget <= 0:
            break
        pins = h.edge(e)
        if np.any(label[pins] >= 0) or pins.size - 1 > budget:
            continue
        label[pins] = len(defining)
        defining.append(int(e))
        budget -= pins.size - 1
    # clusters numbered in order of their smallest member
    free = label < 0
    label[free] = len(defining) + np.arange(int(free.sum()))
    cm = ClusterMap.from_labels(label)
    by_cluster = np.full(cm.num_clusters, -1, dtype=np.int64)
    for old, e in enumerate(defining):
        node = h.edge(e)[0]
        by_cluster[cm.cluster_of[node]] = e
    return cm, by_cluster


def contract(h: Hypergraph, c: ClusterMap) -> tuple[Hypergraph, np.ndarray]:
    """Contract ``h`` along ``c``.

    Pins are mapped and deduplicated, hyperedges left with one pin vanish and
    hyperedges with identical pin sets merge with summed weight.  Returns the
    coarse hypergraph and, per fine hyperedge, its coarse hyperedge (or -1).
    """
    if c.cluster_of.size != h.num_nodes:
        raise HypergraphError("cluster map does not cover the hypergraph")
    node_w = np.bincount(c.cluster_of, weights=h.node_weights, minlength=c.num_clusters)
    edge_map = np.full(h.num_edges, -1, dtype=np.int64)
    index: dict[tuple, int] = {}
    eptr, pins, weights = [0], [], []
    mapped = c.cluster_of[h.pins]
    for e in range(h.num_edges):
        cp = np.unique(mapped[h.eptr[e]:h.eptr[e + 1]])
        if cp.size < 2:
            continue
        key = cp.tobytes()
        j = index.get(key)
        if j is None:
            j = index[key] = len(weights)
            pins.append(cp)
            eptr.append(eptr[-1] + cp.size)
            weights.append(0.0)
        weights[j] += float(h.edge_weights[e])
        edge_map[e] = j
    flat = np.concatenate(pins) if pins else np.zeros(0, dtype=np.int64)
    coarse = Hypergraph(c.num_clusters, np.array(eptr), flat,
                        np.array(weights) if weights else None, node_w)
    return coarse, edge_map


def _level_seed(seed, level: int):
    if seed is None:
        return None
    return [int(seed), level]


def coarsen(h: Hypergraph, levels: int = DEFAULT_LEVELS, rho: int = DEFAULT_RHO,
            m: int = DEFAULT_M, reduction_target: float = DEFAULT_REDUCTION, seed=0, *,
            delta: float | None = None, percentile: float = DEFAULT_PERCENTILE,
            max_level_reduction: float = DEFAULT_MAX_LEVEL_REDUCTION,
            max_edge_size: int | None = DEFAULT_MAX_EDGE_SIZE,
            expansion: str = "star") -> CoarseningHierarchy:
    """Build up to ``levels`` coarsening levels.

    Stops once the node count reaches ``(1 - reduction_target) * n``, when a
    level contracts nothing, or when the hypergraph runs out of hyperedges.
    ``delta`` fixes the contraction threshold; otherwise it is recomputed per
    level from ``percentile``.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    if not 0 <= reduction_target < 1:
        raise ValueError("reduction_target must lie in [0, 1)")
    if not 0 < max_level_reduction <= 1:
        raise ValueError("max_level_reduction must lie in (0, 1]")
    if h.num_nodes == 0:
        raise ValueError("empty hypergraph")
    params = dict(levels=levels, rho=rho, m=m, reduction_target=reduction_target, seed=seed,
                  delta=delta, percentile=percentile, max_level_reduction=max_level_reduction,
                  max_edge_size=max_edge_size, expansion=expansion)
    target = max(1, int(np.ceil((1.0 - reduction_target) * h.num_nodes - 1e-9)))
    cur = h
    eta = np.zeros(h.num_nodes)
    out = []
    for lvl in range(levels):
        n = cur.num_nodes
        if n <= target or cur.num_edges == 0 or n < 2:
            break
        try:
            emb = embed(cur, rho, _level_seed(seed, lvl), expansion=expansion)
        except DegenerateInputError:
            break
        res = estimate_resistances(cur, emb, m)
        adj = apply_nwp(cur, res, eta)
        d = percentile_delta(adj, percentile) if delta is None else float(delta)
        cap = min(int(np.floor(max_level_reduction * n)), n - target)
        cm, defining = select_contractions(cur, adj, d, max_edge_size=max_edge_size,
                                           max_removed=cap)
        if cm.num_clusters == n:
            break
        new_eta = np.bincount(cm.cluster_of, weights=eta, minlength=cm.num_clusters)
        has = defining >= 0
        new_eta[has] += res.r[defining[has]]
        coarse, edge_map = contract(cur, cm)
        out.append(CoarseningLevel(coarse, cm, new_eta, res, adj, d, edge_map))
        cur, eta = coarse, new_eta
    return CoarseningHierarchy(h, tuple(out), params)
