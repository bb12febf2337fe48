"""Multilevel balanced k-way partitioning with resistance-guided coarsening.

Pipeline for one bisection: estimate hyperedge resistances, detect
communities (resistance coarsening followed by flow refinement of the
leftover singletons), contract vertex pairs inside communities, bisect the
coarsest hypergraph greedily, then project back level by level with
Fiduccia-Mattheyses refinement.  ``k > 2`` uses recursive bisection.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import ClusterMap, Hypergraph, Partition, balance_bounds, check_balance, cutsize
from .embedding import DEFAULT_RHO, embed
from .exceptions import DegenerateInputError, InfeasibleError
from .hyperef import DEFAULT_MAX_EDGE_SIZE, coarsen, contract
from .hypersf import DEFAULT_BETA, DEFAULT_MAX_EXPANSIONS, DEFAULT_XI, absorb_singletons
from .resistance import DEFAULT_M, ResistanceVector, estimate_resistances

RATING_EPS = 1e-6
WEIGHT_CAP_FACTOR = 1.5
RATINGS = ("resistance", "heavy-edge")
COMMUNITY_MODES = ("flow", "off")


# --------------------------------------------------------------------------
# ratings
# --------------------------------------------------------------------------

def _shared_edges(h: Hypergraph, p: int, q: int) -> np.ndarray:
    if p == q:
        raise ValueError("a rating needs two distinct nodes")
    return np.intersect1d(h.incident_edges(p), h.incident_edges(q), assume_unique=True)


def heavy_edge_rating(h: Hypergraph, p: int, q: int) -> float:
    """``sum of w(e) / (|e| - 1)`` over hyperedges containing both nodes."""
    shared = _shared_edges(h, p, q)
    return float(np.sum(h.edge_weights[shared] / (h.edge_sizes[shared] - 1)))


def normalized_resistance(r) -> np.ndarray:
    """Resistances divided by their maximum (all ones when the maximum is zero)."""
    r = np.asarray(r.r if isinstance(r, ResistanceVector) else r, dtype=np.float64)
    top = float(r.max()) if r.size else 0.0
    if top <= 0:
        return np.ones_like(r)
    return r / top


def resistance_rating(h: Hypergraph, r, p: int, q: int) -> float:
    """``sum of w(e) / (R_e / max R + 1e-6)`` over hyperedges containing both nodes."""
    shared = _shared_edges(h, p, q)
    rhat = normalized_resistance(r)
    return float(np.sum(h.edge_weights[shared] / (rhat[shared] + RATING_EPS)))


def edge_scores(h: Hypergraph, rating: str, r=None) -> np.ndarray:
    """Per-hyperedge contribution to the pair rating."""
    if rating == "heavy-edge":
        return h.edge_weights / np.maximum(h.edge_sizes - 1, 1)
    if rating == "resistance":
        if r is None:
            raise ValueError("resistance rating needs resistances")
        return h.edge_weights / (normalized_resistance(r) + RATING_EPS)
    raise ValueError(f"unknown rating {rating!r}")


def estimate_or_uniform(h: Hypergraph, rho: int, m: int, seed) -> np.ndarray:
    """Resistance estimates, or all ones when the hypergraph cannot be embedded."""
    if h.num_nodes < 2 or h.num_edges == 0:
        return np.ones(h.num_edges)
    try:
        return estimate_resistances(h, embed(h, rho, seed), min(m, rho)).r
    except DegenerateInputError:
        return np.ones(h.num_edges)


# --------------------------------------------------------------------------
# communities
# --------------------------------------------------------------------------

def detect_communities(h: Hypergraph, num_communities: int | None = None, *,
                       reduction: float | None = None, levels: int = 30,
                       rho: int = DEFAULT_RHO, m: int = DEFAULT_M, seed=0,
                       beta: float = DEFAULT_BETA, xi: float = DEFAULT_XI,
                       max_expansions: int = DEFAULT_MAX_EXPANSIONS,
                       refine: bool = True) -> ClusterMap:
    """Resistance coarsening to a target cluster count, then flow refinement of singletons.

    Give either ``num_communities`` or ``reduction`` (fraction of nodes
    removed).  Each node left alone by coarsening is refined with the flow
    method using itself and its neighbors as reference set; it joins the
    cluster that holds most of the refined set.
    """
    n = h.num_nodes
    if reduction is None:
        target = n if num_communities is None else max(1, min(int(num_communities), n))
        reduction = 1.0 - target / n
    reduction = min(max(float(reduction), 0.0), 1.0 - 1.0 / n) if n > 1 else 0.0
    hier = coarsen(h, levels, rho, m, reduction, seed)
    if not refine:
        return hier.cluster_map()
    return absorb_singletons(hier, beta, xi, max_expansions)[0]


# --------------------------------------------------------------------------
# pairwise coarsening
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ContractionLevel:
    """One pass of pair contractions.

    ``pairs`` is the memento: rows ``(u, v)`` of fine nodes merged into one
    coarse node.  ``fine`` is kept so that uncoarsening can rebuild gains.
    """

    fine: Hypergraph
    coarse: Hypergraph
    cluster_map: ClusterMap
    pairs: np.ndarray
    edge_map: np.ndarray


@dataclass
class MultilevelState:
    source: Hypergraph
    levels: list
    communities: np.ndarray

    @property
    def coarsest(self) -> Hypergraph:
        return self.levels[-1].coarse if self.levels else self.source


def replay(state: MultilevelState) -> Hypergraph:
    """Undo every contraction from the mementos and return the finest hypergraph.

    Each level's pairs are checked against its cluster map before stepping
    back to the finer hypergraph.
    """
    h = state.coarsest
    for lv in reversed(state.levels):
        if lv.coarse is not h:
            raise ValueError("memento chain is broken")
        cm = ClusterMap.from_labels(_pair_labels(lv.fine.num_nodes, lv.pairs))
        if not np.array_equal(cm.cluster_of, lv.cluster_map.cluster_of):
            raise ValueError("memento does not match its cluster map")
        if not contract(lv.fine, cm)[0] == lv.coarse:
            raise ValueError("memento does not reproduce the coarse hypergraph")
        h = lv.fine
    return h


def _pair_labels(n: int, pairs: np.ndarray) -> np.ndarray:
    labels = np.arange(n)
    if len(pairs):
        labels[pairs[:, 1]] = pairs[:, 0]
    return labels


def _adjacency_lists(h: Hypergraph):
    eptr = h.eptr.tolist()
    pins = h.pins.tolist()
    edges = [pins[eptr[e]:eptr[e + 1]] for e in range(h.num_edges)]
    vptr, vedges = h._incidence
    vptr = vptr.tolist()
    ve = vedges.tolist()
    node_edges = [ve[vptr[v]:vptr[v + 1]] for v in range(h.num_nodes)]
    return edges, node_edges


def _merge_parallel(values: np.ndarray, edge_map: np.ndarray, num_coarse: int) -> np.ndarray:
    """Parallel composition of resistances for hyperedges that merge."""
    keep = edge_map >= 0
    cond = np.zeros(num_coarse)
    r = values[keep]
    inv = np.where(r > 0, 1.0 / np.maximum(r, 1e-300), np.inf)
    np.add.at(cond, edge_map[keep], inv)
    with np.errstate(divide="ignore"):
        out = 1.0 / cond
    return out


def coarsen_pairwise(h: Hypergraph, r, communities, target_nodes: int, *,
                     rating: str = "resistance", seed=0, rho: int = DEFAULT_RHO,
                     m: int = DEFAULT_M, weight_cap_factor: float = WEIGHT_CAP_FACTOR,
                     max_edge_size: int | None = DEFAULT_MAX_EDGE_SIZE,
                     recompute: bool = True) -> MultilevelState:
    """Contract rated vertex pairs until ``target_nodes`` remain or nothing can merge.

    Nodes are visited in seeded random order; each unmatched node merges with
    its best-rated unmatched neighbor in the same community provided the
    merged weight stays within ``weight_cap_factor * W / target_nodes``.
    Resistances are re-estimated whenever the node count halves.
    """
    if target_nodes < 1:
        raise ValueError("target_nodes must be >= 1")
    if rating not in RATINGS:
        raise ValueError(f"unknown rating {rating!r}")
    comm = np.zeros(h.num_nodes, dtype=np.int64) if communities is None else \
        np.asarray(communities.cluster_of if isinstance(communities, ClusterMap) else communities,
                   dtype=np.int64)
    if comm.shape != (h.num_nodes,):
        raise ValueError("communities must cover every node")
    rng = np.random.default_rng(seed)
    cap = weight_cap_factor * h.total_node_weight / target_nodes
    res = None
    if rating == "resistance":
        res = np.asarray(r.r if isinstance(r, ResistanceVector) else r, dtype=np.float64) \
            if r is not None else estimate_or_uniform(h, rho, m, seed)
        if res.shape != (h.num_edges,):
            raise ValueError("resistances must have one entry per hyperedge")
    state = MultilevelState(h, [], comm.copy())
    cur, cur_comm = h, comm
    last_estimate = h.num_nodes
    while cur.num_nodes > target_nodes:
        scores = edge_scores(cur, rating, res)
        pairs = _match_pass(cur, scores, cur_comm, cap, cur.num_nodes - target_nodes, rng,
                            max_edge_size)
        if len(pairs) == 0:
            break
        cm = ClusterMap.from_labels(_pair_labels(cur.num_nodes, pairs))
        coarse, emap = contract(cur, cm)
        state.levels.append(ContractionLevel(cur, coarse, cm, pairs, emap))
        new_comm = np.zeros(cm.num_clusters, dtype=np.int64)
        new_comm[cm.cluster_of] = cur_comm
        if res is not None:
            if recompute and coarse.num_nodes <= last_estimate // 2:
                res = estimate_or_uniform(coarse, rho, m, [int(rng.integers(2 ** 31)), len(state.levels)])
                last_estimate = coarse.num_nodes
            else:
                res = _merge_parallel(res, emap, coarse.num_edges)
        cur, cur_comm = coarse, new_comm
    state.communities = cur_comm
    return state


def _match_pass(h: Hypergraph, scores: np.ndarray, comm: np.ndarray, cap: float,
                max_pairs: int, rng, max_edge_size) -> np.ndarray:
    edges, node_edges = _adjacency_lists(h)
    sc = scores.tolist()
    usable = [max_edge_size is None or len(p) <= max_edge_size for p in edges]
    w = h.node_weights.tolist()
    cm = comm.tolist()
    matched = [False] * h.num_nodes
    pairs = []
    for u in rng.permutation(h.num_nodes).tolist():
        if matched[u]:
            continue
        acc: dict[int, float] = {}
        for e in node_edges[u]:
            if not usable[e]:
                continue
            s = sc[e]
            for v in edges[e]:
                if v != u:
                    acc[v] = acc.get(v, 0.0) + s
        best, best_key = -1, None
        for v, s in acc.items():
            if matched[v] or cm[v] != cm[u] or w[u] + w[v] > cap:
                continue
            key = (s, -w[v], -v)
            if best_key is None or key > best_key:
                best, best_key = v, key
        if best < 0:
            continue
        matched[u] = matched[best] = True
        pairs.append((min(u, best), max(u, best)))
        if len(pairs) >= max_pairs:
            break
    return np.array(pairs, dtype=np.int64).reshape(-1, 2)


# --------------------------------------------------------------------------
# bisection engine (explicit per-block bounds)
# --------------------------------------------------------------------------

class _Bisection:
    """Pin counts, loads and cut of a 2-way assignment with FM move support."""

    def __init__(self, h: Hypergraph, blocks, lists=None):
        self.h = h
        self.edges, self.node_edges = lists if lists is not None else _adjacency_lists(h)
        self.we = h.edge_weights.tolist()
        self.wv = h.node_weights.tolist()
        self.blocks = [int(b) for b in blocks]
        m = h.num_edges
        self.cnt = [[0] * m, [0] * m]
        for e, pins in enumerate(self.edges):
            for v in pins:
                self.cnt[self.blocks[v]][e] += 1
        self.load = [0.0, 0.0]
        for v, b in enumerate(self.blocks):
            self.load[b] += self.wv[v]
        self.cut = sum(self.we[e] for e in range(m) if self.cnt[0][e] and self.cnt[1][e])

    def gain(self, v: int) -> float:
        b = self.blocks[v]
        cf, ct = self.cnt[b], self.cnt[1 - b]
        g = 0.0
        for e in self.node_edges[v]:
            if cf[e] == 1:
                g += self.we[e]
            if ct[e] == 0:
                g -= self.we[e]
        return g

    def move(self, v: int, gains=None, locked=None, push=None) -> None:
        """Move ``v`` to the other block, updating gains of unlocked pins by FM delta rules."""
        b = self.blocks[v]
        o = 1 - b
        cf, ct = self.cnt[b], self.cnt[o]
        blocks = self.blocks
        track = gains is not None
        for e in self.node_edges[v]:
            we = self.we[e]
            pins = self.edges[e]
            if track:
                if ct[e] == 0:
                    for u in pins:
                        if u != v and not locked[u]:
                            gains[u] += we
                            push(u)
                elif ct[e] == 1:
                    for u in pins:
                        if blocks[u] == o:
                            if not locked[u]:
                                gains[u] -= we
                                push(u)
                            break
            if ct[e] == 0 and cf[e] > 1:
                self.cut += we
            cf[e] -= 1
            ct[e] += 1
            if cf[e] == 0 and ct[e] > 1:
                self.cut -= we
            if track:
                if cf[e] == 0:
                    for u in pins:
                        if u != v and not locked[u]:
                            gains[u] -= we
                            push(u)
                elif cf[e] == 1:
                    for u in pins:
                        if u != v and blocks[u] == b:
                            if not locked[u]:
                                gains[u] += we
                                push(u)
                            break
        blocks[v] = o
        self.load[b] -= self.wv[v]
        self.load[o] += self.wv[v]


def _fits(state: _Bisection, v: int, lo, hi, slack: float) -> bool:
    b = state.blocks[v]
    w = state.wv[v]
    return state.load[b] - w >= lo[b] - slack and state.load[1 - b] + w <= hi[1 - b] + slack


def _violation(load, lo, hi) -> float:
    return sum(max(0.0, lo[b] - load[b]) + max(0.0, load[b] - hi[b]) for b in (0, 1))


def _fm_passes(state: _Bisection, lo, hi, max_passes: int, stall_limit: int | None = None) -> None:
    n = state.h.num_nodes
    if n < 2:
        return
    slack = 1e-9 * max(1.0, sum(state.wv))
    wmin = min(state.wv)
    budget = n if stall_limit is None else stall_limit
    for _ in range(max_passes):
        gains = [state.gain(v) for v in range(n)]
        locked = [False] * n
        heaps = [[], []]
        for v in range(n):
            heaps[state.blocks[v]].append((-gains[v], v))
        for hp in heaps:
            heapq.heapify(hp)

        def push(u):
            heapq.heappush(heaps[state.blocks[u]], (-gains[u], u))

        start_cut = best_cut = state.cut
        moves: list[int] = []
        best_len = 0
        stall = 0
        while True:
            choice = None
            for b in (0, 1):
                if state.load[b] - wmin < lo[b] - slack or state.load[1 - b] + wmin > hi[1 - b] + slack:
                    continue
                hp = heaps[b]
                parked = []
                found = None
                while hp and len(parked) < 32:
                    g, v = hp[0]
                    if locked[v] or state.blocks[v] != b or -g != gains[v]:
                        heapq.heappop(hp)
                        continue
                    if _fits(state, v, lo, hi, slack):
                        found = (g, v)
                        break
                    parked.append(heapq.heappop(hp))
                for item in parked:
                    heapq.heappush(hp, item)
                if found is not None and (choice is None or found < choice):
                    choice = found
            if choice is None:
                break
            v = choice[1]
            locked[v] = True
            state.move(v, gains, locked, push)
            moves.append(v)
            if state.cut < best_cut - 1e-12:
                best_cut, best_len, stall = state.cut, len(moves), 0
            else:
                stall += 1
                if stall > budget:
                    break
        for v in reversed(moves[best_len:]):
            state.move(v)
        if not best_cut < start_cut - 1e-12:
            break


def _rebalance(state: _Bisection, lo, hi) -> None:
    """Move best-gain nodes out of an overloaded block until the bounds hold (if possible)."""
    slack = 1e-9 * max(1.0, sum(state.wv))
    for _ in range(state.h.num_nodes):
        over = [b for b in (0, 1) if state.load[b] > hi[b] + slack or state.load[1 - b] < lo[1 - b] - slack]
        if not over:
            return
        b = over[0]
        before = _violation(state.load, lo, hi)
        cand = [v for v in range(state.h.num_nodes) if state.blocks[v] == b]
        best, best_key = None, None
        for v in cand:
            w = state.wv[v]
            load = list(state.load)
            load[b] -= w
            load[1 - b] += w
            after = _violation(load, lo, hi)
            if after >= before:
                continue
            key = (after, -state.gain(v), v)
            if best_key is None or key < best_key:
                best, best_key = v, key
        if best is None:
            return
        state.move(best)


def _grow(h: Hypergraph, lists, lo, hi, rng) -> list[int]:
    """Greedy hypergraph growing: block 0 absorbs the cheapest node until its lower bound holds."""
    n = h.num_nodes
    state = _Bisection(h, [1] * n, lists)
    slack = 1e-9 * max(1.0, h.total_node_weight)
    prio = rng.permutation(n).tolist()
    gains = [state.gain(v) for v in range(n)]
    locked = [False] * n
    heap = [(-gains[v], prio[v], v) for v in range(n)]
    heapq.heapify(heap)

    def push(u):
        if state.blocks[u] == 1:
            heapq.heappush(heap, (-gains[u], prio[u], u))

    start = int(rng.integers(n))
    locked[start] = True
    state.move(start, gains, locked, push)
    parked = []
    while state.load[0] < lo[0] - slack and heap:
        g, _, v = heapq.heappop(heap)
        if locked[v] or state.blocks[v] != 1 or -g != gains[v]:
            continue
        if state.load[0] + state.wv[v] > hi[0] + slack or state.load[1] - state.wv[v] < lo[1] - slack:
            parked.append(v)
            continue
        locked[v] = True
        state.move(v, gains, locked, push)
    return state.blocks


def _check_weights(h: Hypergraph, hi) -> None:
    heaviest = float(h.node_weights.max()) if h.num_nodes else 0.0
    if heaviest > max(hi) + 1e-9 * max(1.0, h.total_node_weight):
        raise InfeasibleError(f"node weight {heaviest:g} exceeds every block's upper bound {max(hi):g}")


def _initial_bisection(h: Hypergraph, lo, hi, rng, tries: int, fm_passes: int) -> tuple[list[int], bool]:
    _check_weights(h, hi)
    if h.num_nodes == 1:
        blocks = [0]
        load = [float(h.node_weights[0]), 0.0]
        return blocks, _violation(load, lo, hi) <= 1e-9 * max(1.0, h.total_node_weight)
    lists = _adjacency_lists(h)
    best, best_key = None, None
    slack = 1e-9 * max(1.0, h.total_node_weight)
    for _ in range(max(1, tries)):
        state = _Bisection(h, _grow(h, lists, lo, hi, rng), lists)
        _rebalance(state, lo, hi)
        if _violation(state.load, lo, hi) <= slack:
            _fm_passes(state, lo, hi, fm_passes)
        viol = _violation(state.load, lo, hi)
        key = (viol > slack, viol, state.cut)
        if best_key is None or key < best_key:
            best, best_key = list(state.blocks), key
    return best, not best_key[0]


def _refine(h: Hypergraph, blocks, lo, hi, max_passes: int) -> list[int]:
    state = _Bisection(h, blocks)
    slack = 1e-9 * max(1.0, h.total_node_weight)
    if _violation(state.load, lo, hi) > slack:
        _rebalance(state, lo, hi)
        if _violation(state.load, lo, hi) > slack:
            return state.blocks
    _fm_passes(state, lo, hi, max_passes)
    return state.blocks


def _bounds(h: Hypergraph, k: int, epsilon: float):
    lower, upper = balance_bounds(h.total_node_weight, k, epsilon)
    return (lower, lower), (upper, upper)


# --------------------------------------------------------------------------
# public partitioning API
# --------------------------------------------------------------------------

def initial_partition(h: Hypergraph, k: int = 2, epsilon: float = 0.02, seed=0,
                      tries: int = 20, fm_passes: int = 10) -> Partition:
    """Best of ``tries`` greedy-growth bisections, each polished by FM.

    If no try meets the balance bounds the least violating one is returned
    with ``meta["feasible"] = False``.
    """
    if k != 2:
        raise ValueError("initial_partition bisects; use partition() for k > 2")
    if h.num_nodes < 2:
        raise ValueError("need at least two nodes")
    lo, hi = _bounds(h, 2, epsilon)
    blocks, ok = _initial_bisection(h, lo, hi, np.random.default_rng(seed), tries, fm_passes)
    return Partition(np.array(blocks), 2, epsilon, {"feasible": ok})


def fm_refine(h: Hypergraph, p: Partition, max_passes: int = 10) -> Partition:
    """Fiduccia-Mattheyses refinement of a bisection.

    Moves keep both blocks inside the balance bounds, each pass rolls back to
    its best prefix, and the cut never increases.  An infeasible input is
    first rebalanced; if that fails it is returned unchanged.
    """
    if p.k != 2:
        raise ValueError("fm_refine works on bisections")
    if p.block_of.size != h.num_nodes:
        raise ValueError("partition does not cover the hypergraph")
    lo, hi = _bounds(h, 2, p.epsilon)
    before = cutsize(h, p)
    blocks = _refine(h, p.block_of.tolist(), lo, hi, max_passes)
    out = Partition(np.array(blocks), 2, p.epsilon, dict(p.meta))
    if check_balance(h, p).feasible and cutsize(h, out) > before + 1e-9:
        return p
    return out


def project(blocks, cluster_map: ClusterMap) -> np.ndarray:
    """Give every fine node the block of its coarse node."""
    return np.asarray(blocks)[cluster_map.cluster_of]


def _uncoarsen(state: MultilevelState, blocks, lo, hi, max_passes: int) -> list[int]:
    cur = list(blocks)
    for lv in reversed(state.levels):
        fine = project(cur, lv.cluster_map).tolist()
        cur = _refine(lv.fine, fine, lo, hi, max_passes)
    if not state.levels:
        cur = _refine(state.source, cur, lo, hi, max_passes)
    return cur


def uncoarsen_and_refine(state: MultilevelState, p_coarse: Partition, max_passes: int = 10) -> Partition:
    """Project ``p_coarse`` level by level onto the source hypergraph with FM at each level."""
    if p_coarse.block_of.size != state.coarsest.num_nodes:
        raise ValueError("partition does not match the coarsest hypergraph")
    if p_coarse.k != 2:
        raise ValueError("uncoarsening refines bisections")
    lo, hi = _bounds(state.source, 2, p_coarse.epsilon)
    blocks = _uncoarsen(state, p_coarse.block_of.tolist(), lo, hi, max_passes)
    return Partition(np.array(blocks), 2, p_coarse.epsilon, dict(p_coarse.meta))


@dataclass
class PartitionConfig:
    rating: str = "resistance"
    community: str = "flow"
    seed: int = 0
    rho: int = DEFAULT_RHO
    m: int = DEFAULT_M
    expansion: str = "star"
    coarsest_per_block: int = 40
    community_per_block: int = 40
    community_levels: int = 30
    beta: float = DEFAULT_BETA
    xi: float = DEFAULT_XI
    max_expansions: int = DEFAULT_MAX_EXPANSIONS
    weight_cap_factor: float = WEIGHT_CAP_FACTOR
    initial_tries: int = 20
    fm_passes: int = 10
    coarsen: bool = True
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.rating not in RATINGS:
            raise ValueError(f"rating must be one of {RATINGS}")
        if self.community not in COMMUNITY_MODES:
            raise ValueError(f"community must be one of {COMMUNITY_MODES}")
        if self.rho < 1 or not 1 <= self.m <= self.rho:
            raise ValueError("need rho >= 1 and 1 <= m <= rho")

    def to_dict(self) -> dict:
        return asdict(self)


def _bisect(h: Hypergraph, lo, hi, cfg: PartitionConfig, rng) -> tuple[list[int], bool]:
    _check_weights(h, hi)
    n = h.num_nodes
    sub_seed = int(rng.integers(2 ** 31))
    if not cfg.coarsen or n <= 2 * cfg.coarsest_per_block or h.num_edges == 0:
        blocks, ok = _initial_bisection(h, lo, hi, rng, cfg.initial_tries, cfg.fm_passes)
        return _refine(h, blocks, lo, hi, cfg.fm_passes), ok
    target = 2 * cfg.coarsest_per_block
    comm = None
    if cfg.community == "flow":
        comm = detect_communities(h, min(n, 2 * cfg.community_per_block),
                                  levels=cfg.community_levels, rho=cfg.rho, m=cfg.m,
                                  seed=sub_seed, beta=cfg.beta, xi=cfg.xi,
                                  max_expansions=cfg.max_expansions)
    r = estimate_or_uniform(h, cfg.rho, cfg.m, sub_seed) if cfg.rating == "resistance" else None
    state = coarsen_pairwise(h, r, comm, target, rating=cfg.rating, seed=sub_seed, rho=cfg.rho,
                             m=cfg.m, weight_cap_factor=cfg.weight_cap_factor)
    coarse = state.coarsest
    blocks, ok = _initial_bisection(coarse, lo, hi, rng, cfg.initial_tries, cfg.fm_passes)
    blocks = _uncoarsen(state, blocks, lo, hi, cfg.fm_passes)
    slack = 1e-9 * max(1.0, h.total_node_weight)
    load = [0.0, 0.0]
    for v, b in enumerate(blocks):
        load[b] += float(h.node_weights[v])
    return blocks, _violation(load, lo, hi) <= slack


def _induced(h: Hypergraph, nodes: np.ndarray) -> Hypergraph:
    """Sub-hypergraph on ``nodes`` keeping only hyperedges entirely inside (cut nets drop out)."""
    local = np.full(h.num_nodes, -1, dtype=np.int64)
    local[nodes] = np.arange(nodes.size)
    if h.num_edges:
        inside = h.edge_reduce((local[h.pins] >= 0).astype(np.int64)) == h.edge_sizes
        keep = inside & (h.edge_sizes >= 2)
    else:
        keep = np.zeros(0, dtype=bool)
    sel = keep[h.edge_of_pin]
    sizes = h.edge_sizes[keep]
    eptr = np.concatenate([[0], np.cumsum(sizes)])
    return Hypergraph(nodes.size, eptr, local[h.pins[sel]],
                      h.edge_weights[keep] if keep.any() else None, h.node_weights[nodes])


def bisection_epsilon(k: int, epsilon: float) -> float:
    """Relative per-level slack so that ``ceil(log2 k)`` nested bisections meet ``(1/k + epsilon) W``."""
    depth = max(1, math.ceil(math.log2(k)))
    return (1.0 + k * epsilon) ** (1.0 / depth) - 1.0


def partition(h: Hypergraph, k: int = 2, epsilon: float = 0.02,
              config: PartitionConfig | None = None) -> Partition:
    """Balanced k-way partition minimizing the weight of cut hyperedges.

    Raises :class:`InfeasibleError` when the result violates the balance
    bounds; the offending partition is attached as ``exc.partition``.
    """
    cfg = config or PartitionConfig()
    if k < 2:
        raise ValueError("k must be >= 2")
    if not 0 < epsilon <= 1.0 / k:
        raise ValueError("epsilon must lie in (0, 1/k]")
    if h.num_nodes < k:
        raise InfeasibleError(f"{h.num_nodes} nodes cannot fill {k} blocks")
    rng = np.random.default_rng(cfg.seed)
    eps_rel = bisection_epsilon(k, epsilon)
    out = np.zeros(h.num_nodes, dtype=np.int64)
    ok_all = True

    def split(nodes: np.ndarray, kk: int, first: int):
        nonlocal ok_all
        if kk == 1:
            out[nodes] = first
            return
        k0 = kk // 2
        sub = _induced(h, nodes)
        total = sub.total_node_weight
        frac = (k0 / kk, (kk - k0) / kk)
        lo = tuple((1.0 - eps_rel) * f * total for f in frac)
        hi = tuple((1.0 + eps_rel) * f * total for f in frac)
        if kk == k == 2:
            lo, hi = _bounds(h, 2, epsilon)
        blocks, ok = _bisect(sub, lo, hi, cfg, rng)
        ok_all &= ok
        b = np.asarray(blocks)
        split(nodes[b == 0], k0, first)
        split(nodes[b == 1], kk - k0, first + k0)

    split(np.arange(h.num_nodes), k, 0)
    p = Partition(out, k, epsilon, {"config": cfg.to_dict()})
    report = check_balance(h, p)
    if not report.feasible:
        exc = InfeasibleError(f"no {epsilon:g}-balanced partition found; loads {report.loads.tolist()}")
        exc.partition = p
        raise exc
    return p
