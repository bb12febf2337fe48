"""Hypergraph data model and partition / clustering quality metrics.

Hyperedges are stored in compressed-row layout: the pins of hyperedge ``e``
are ``pins[eptr[e]:eptr[e + 1]]``.  Node ids are 0-based.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .exceptions import HypergraphError, UndefinedMetricError


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


class Hypergraph:
    """Immutable weighted hypergraph.

    Parameters
    ----------
    num_nodes : int
    eptr : array of int, shape (num_edges + 1,)
        Offsets into ``pins``.
    pins : array of int
        Node ids grouped per hyperedge.
    edge_weights : array of float, optional
        Strictly positive weight per hyperedge (default 1).
    node_weights : array of float, optional
        Nonnegative weight per node (default 1).
    """

    def __init__(self, num_nodes, eptr, pins, edge_weights=None, node_weights=None):
        num_nodes = int(num_nodes)
        if num_nodes < 0:
            raise HypergraphError("num_nodes must be nonnegative")
        eptr = np.array(eptr, dtype=np.int64).ravel()
        pins = np.array(pins, dtype=np.int64).ravel()
        if eptr.size == 0 or eptr[0] != 0 or eptr[-1] != pins.size:
            raise HypergraphError("eptr must start at 0 and end at len(pins)")
        sizes = np.diff(eptr)
        if np.any(sizes < 1):
            raise HypergraphError("every hyperedge needs at least one pin")
        num_edges = sizes.size
        if pins.size and (pins.min() < 0 or pins.max() >= num_nodes):
            raise HypergraphError("pin id out of range")

        if edge_weights is None:
            edge_weights = np.ones(num_edges)
        edge_weights = np.array(edge_weights, dtype=np.float64).ravel()
        if edge_weights.size != num_edges:
            raise HypergraphError("edge_weights length must equal num_edges")
        if not np.all(np.isfinite(edge_weights)) or np.any(edge_weights <= 0):
            raise HypergraphError("edge weights must be finite and > 0")

        if node_weights is None:
            node_weights = np.ones(num_nodes)
        node_weights = np.array(node_weights, dtype=np.float64).ravel()
        if node_weights.size != num_nodes:
            raise HypergraphError("node_weights length must equal num_nodes")
        if not np.all(np.isfinite(node_weights)) or np.any(node_weights < 0):
            raise HypergraphError("node weights must be finite and >= 0")

        if pins.size:
            # duplicate pins: after sorting within each edge, equal neighbours in the same edge
            edge_of_pin = np.repeat(np.arange(num_edges), sizes)
            order = np.lexsort((pins, edge_of_pin))
            sp, se = pins[order], edge_of_pin[order]
            if np.any((sp[1:] == sp[:-1]) & (se[1:] == se[:-1])):
                raise HypergraphError("duplicate pin inside a hyperedge")

        self._num_nodes = num_nodes
        self.eptr = _frozen(eptr)
        self.pins = _frozen(pins)
        self.edge_weights = _frozen(edge_weights)
        self.node_weights = _frozen(node_weights)

    @classmethod
    def from_edges(cls, edges: Iterable[Sequence[int]], num_nodes=None, edge_weights=None,
                   node_weights=None) -> "Hypergraph":
        """Build from a list of pin lists, e.g. ``[[0, 1], [1, 2, 3]]``."""
        edges = [list(map(int, e)) for e in edges]
        sizes = [len(e) for e in edges]
        eptr = np.concatenate([[0], np.cumsum(sizes, dtype=np.int64)]) if edges else np.zeros(1, np.int64)
        pins = np.fromiter((p for e in edges for p in e), dtype=np.int64, count=int(sum(sizes)))
        if num_nodes is None:
            num_nodes = int(pins.max()) + 1 if pins.size else 0
        return cls(num_nodes, eptr, pins, edge_weights, node_weights)

    @property
    def num_nodes(self) -> int:
        return self._num_nodes

    @property
    def num_edges(self) -> int:
        return self.eptr.size - 1

    @property
    def num_pins(self) -> int:
        return self.pins.size

    def edge(self, e: int) -> np.ndarray:
        return self.pins[self.eptr[e]:self.eptr[e + 1]]

    def edges(self) -> list[list[int]]:
        return [self.edge(e).tolist() for e in range(self.num_edges)]

    @cached_property
    def edge_sizes(self) -> np.ndarray:
        return _frozen(np.diff(self.eptr))

    @cached_property
    def edge_of_pin(self) -> np.ndarray:
        return _frozen(np.repeat(np.arange(self.num_edges), self.edge_sizes))

    @cached_property
    def degrees(self) -> np.ndarray:
        """Weighted degree per node, ``d_v = sum of w(e) over e containing v``."""
        d = np.bincount(self.pins, weights=self.edge_weights[self.edge_of_pin],
                        minlength=self.num_nodes)
        return _frozen(d.astype(np.float64))

    @cached_property
    def _incidence(self):
        order = np.argsort(self.pins, kind="stable")
        vptr = np.zeros(self.num_nodes + 1, dtype=np.int64)
        np.cumsum(np.bincount(self.pins, minlength=self.num_nodes), out=vptr[1:])
        return _frozen(vptr), _frozen(self.edge_of_pin[order])

    def incident_edges(self, v: int) -> np.ndarray:
        vptr, vedges = self._incidence
        return vedges[vptr[v]:vptr[v + 1]]

    @property
    def total_node_weight(self) -> float:
        return float(self.node_weights.sum())

    def edge_reduce(self, values: np.ndarray, ufunc=np.add) -> np.ndarray:
        """Reduce a per-pin array over each hyperedge with ``ufunc`` (add, maximum, minimum)."""
        if self.num_edges == 0:
            return np.zeros(0, dtype=np.asarray(values).dtype)
        return ufunc.reduceat(values, self.eptr[:-1])

    def __eq__(self, other):
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (self.num_nodes == other.num_nodes
                and np.array_equal(self.eptr, other.eptr)
                and np.array_equal(self.pins, other.pins)
                and np.array_equal(self.edge_weights, other.edge_weights)
                and np.array_equal(self.node_weights, other.node_weights))

    __hash__ = None

    def __repr__(self):
        return f"Hypergraph(num_nodes={self.num_nodes}, num_edges={self.num_edges}, num_pins={self.num_pins})"


def as_mask(h: Hypergraph, s) -> np.ndarray:
    """Normalize a node set (boolean mask or iterable of ids) to a boolean mask."""
    if isinstance(s, np.ndarray) and s.dtype == bool:
        if s.shape != (h.num_nodes,):
            raise HypergraphError("boolean node mask has wrong length")
        return s
    ids = np.fromiter((int(v) for v in s), dtype=np.int64) if not isinstance(s, np.ndarray) \
        else s.astype(np.int64).ravel()
    if ids.size and (ids.min() < 0 or ids.max() >= h.num_nodes):
        raise HypergraphError("node id out of range")
    mask = np.zeros(h.num_nodes, dtype=bool)
    mask[ids] = True
    if int(mask.sum()) != ids.size:
        raise HypergraphError("duplicate node id in node set")
    return mask


@dataclass(frozen=True)
class ClusterMap:
    """Assignment of every node to one of ``num_clusters`` dense cluster ids."""

    cluster_of: np.ndarray
    num_clusters: int

    def __post_init__(self):
        c = np.asarray(self.cluster_of, dtype=np.int64).ravel()
        n = int(self.num_clusters)
        if c.size and (c.min() < 0 or c.max() >= n):
            raise HypergraphError("cluster id out of range")
        if np.unique(c).size != n:
            raise HypergraphError("cluster ids must be dense in [0, num_clusters)")
        object.__setattr__(self, "cluster_of", _frozen(c.copy()))
        object.__setattr__(self, "num_clusters", n)

    @classmethod
    def from_labels(cls, labels) -> "ClusterMap":
        """Relabel arbitrary labels densely in order of first appearance."""
        labels = np.asarray(labels).ravel()
        _, first, inv = np.unique(labels, return_index=True, return_inverse=True)
        rank = np.empty(first.size, dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(first.size)
        return cls(rank[inv], first.size)

    @classmethod
    def identity(cls, n: int) -> "ClusterMap":
        return cls(np.arange(n), n)

    def members(self) -> list[np.ndarray]:
        order = np.argsort(self.cluster_of, kind="stable")
        bounds = np.searchsorted(self.cluster_of[order], np.arange(self.num_clusters + 1))
        return [order[bounds[i]:bounds[i + 1]] for i in range(self.num_clusters)]

    def sizes(self) -> np.ndarray:
        return np.bincount(self.cluster_of, minlength=self.num_clusters)

    def compose(self, coarser: "ClusterMap") -> "ClusterMap":
        """Map fine nodes straight to the clusters of ``coarser`` (which clusters our clusters)."""
        return ClusterMap(coarser.cluster_of[self.cluster_of], coarser.num_clusters)


@dataclass(frozen=True)
class Partition:
    """k-way partition with imbalance parameter ``epsilon``."""

    block_of: np.ndarray
    k: int
    epsilon: float = 0.0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        b = np.asarray(self.block_of, dtype=np.int64).ravel()
        k = int(self.k)
        if k < 1:
            raise HypergraphError("k must be >= 1")
        if b.size and (b.min() < 0 or b.max() >= k):
            raise HypergraphError("block id out of range")
        if not 0.0 <= self.epsilon <= 1.0 / k + 1e-12:
            raise HypergraphError("epsilon must lie in [0, 1/k]")
        object.__setattr__(self, "block_of", _frozen(b.copy()))
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "epsilon", float(self.epsilon))

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return (self.k == other.k and self.epsilon == other.epsilon
                and np.array_equal(self.block_of, other.block_of))

    __hash__ = None


class BalanceReport(NamedTuple):
    feasible: bool
    loads: np.ndarray
    lower: float
    upper: float


# --------------------------------------------------------------------------
# metrics
# --------------------------------------------------------------------------

def degree(h: Hypergraph, v: int) -> float:
    if not 0 <= int(v) < h.num_nodes:
        raise HypergraphError(f"node {v} out of range")
    return float(h.degrees[int(v)])


def volume(h: Hypergraph, s) -> float:
    return float(h.degrees[as_mask(h, s)].sum())


def _pins_inside(h: Hypergraph, mask: np.ndarray) -> np.ndarray:
    return h.edge_reduce(mask[h.pins].astype(np.int64))


def cut(h: Hypergraph, s) -> float:
    """Total weight of hyperedges with pins both inside and outside ``s``."""
    mask = as_mask(h, s)
    inside = _pins_inside(h, mask)
    crossing = (inside > 0) & (inside < h.edge_sizes)
    return float(h.edge_weights[crossing].sum())


def conductance(h: Hypergraph, s) -> float:
    mask = as_mask(h, s)
    k = int(mask.sum())
    if k == 0 or k == h.num_nodes:
        raise UndefinedMetricError("conductance needs a nonempty proper subset")
    vol_s = float(h.degrees[mask].sum())
    denom = min(vol_s, float(h.degrees.sum()) - vol_s)
    if denom <= 0:
        raise UndefinedMetricError("zero volume on the smaller side")
    return cut(h, mask) / denom


def avg_conductance(h: Hypergraph, c: ClusterMap) -> float:
    """Mean conductance over clusters; clusters with undefined conductance are skipped."""
    if c.num_clusters < 2:
        raise UndefinedMetricError("average conductance needs at least two clusters")
    vals = cluster_conductances(h, c)
    vals = vals[np.isfinite(vals)]
    if vals.size == 0:
        raise UndefinedMetricError("no cluster has a defined conductance")
    return float(vals.mean())


def cluster_conductances(h: Hypergraph, c: ClusterMap) -> np.ndarray:
    """Conductance of every cluster at once (NaN where undefined)."""
    cl = c.cluster_of
    vol = np.bincount(cl, weights=h.degrees, minlength=c.num_clusters)
    total = float(h.degrees.sum())
    cut_w = np.zeros(c.num_clusters)
    if h.num_edges:
        pc = cl[h.pins]
        lo = h.edge_reduce(pc, np.minimum)
        hi = h.edge_reduce(pc, np.maximum)
        split = lo != hi
        # a split edge is cut for every cluster it touches
        touched = np.unique(np.stack([h.edge_of_pin, pc]), axis=1)
        te, tc = touched
        sel = split[te]
        np.add.at(cut_w, tc[sel], h.edge_weights[te[sel]])
    denom = np.minimum(vol, total - vol)
    out = np.full(c.num_clusters, np.nan)
    ok = denom > 0
    out[ok] = cut_w[ok] / denom[ok]
    return out


def local_conductance(h: Hypergraph, s, c_ref, beta: float) -> float:
    """Localized conductance of ``s`` relative to the reference set ``c_ref``.

    ``cut(S) / (vol(S & C) - beta * vol(S - C))``.  The value is returned even
    when the denominator is negative; a zero denominator raises.
    """
    s = as_mask(h, s)
    c_ref = as_mask(h, c_ref)
    d = h.degrees
    denom = float(d[s & c_ref].sum()) - beta * float(d[s & ~c_ref].sum())
    if denom == 0:
        raise UndefinedMetricError("local conductance denominator is zero")
    return cut(h, s) / denom


def hlc_score(h: Hypergraph, s, c_ref, beta: float) -> float:
    """Local conductance as a minimization score: ``inf`` when the denominator is nonpositive."""
    s = as_mask(h, s)
    c_ref = as_mask(h, c_ref)
    d = h.degrees
    denom = float(d[s & c_ref].sum()) - beta * float(d[s & ~c_ref].sum())
    if denom <= 0:
        return np.inf
    return cut(h, s) / denom


def balance_bounds(total_weight: float, k: int, epsilon: float) -> tuple[float, float]:
    return (1.0 / k - epsilon) * total_weight, (1.0 / k + epsilon) * total_weight


def block_loads(h: Hypergraph, p: Partition) -> np.ndarray:
    return np.bincount(p.block_of, weights=h.node_weights, minlength=p.k)


def check_balance(h: Hypergraph, p: Partition, tol: float = 1e-9) -> BalanceReport:
    if p.block_of.size != h.num_nodes:
        raise HypergraphError("partition does not cover the hypergraph")
    loads = block_loads(h, p)
    lower, upper = balance_bounds(h.total_node_weight, p.k, p.epsilon)
    slack = tol * max(1.0, h.total_node_weight)
    feasible = bool(np.all(loads >= lower - slack) and np.all(loads <= upper + slack))
    return BalanceReport(feasible, loads, lower, upper)


def cutsize(h: Hypergraph, p: Partition) -> float:
    """Total weight of hyperedges not contained in a single block."""
    if p.block_of.size != h.num_nodes:
        raise HypergraphError("partition does not cover the hypergraph")
    if h.num_edges == 0:
        return 0.0
    pb = p.block_of[h.pins]
    split = h.edge_reduce(pb, np.minimum) != h.edge_reduce(pb, np.maximum)
    return float(h.edge_weights[split].sum())
