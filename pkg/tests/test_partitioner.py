import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypercoarsen import (ClusterMap, Hypergraph, InfeasibleError, Partition, PartitionConfig,
                          check_balance, cutsize, embed, estimate_resistances, partition)
from hypercoarsen.datasets import (bridged_blobs, disjoint_union, planted_partition,
                                   random_connected_graph, random_hypergraph)
from hypercoarsen.hyperef import contract
from hypercoarsen.oracle import brute_best_bipartition
from hypercoarsen.partitioner import (bisection_epsilon, coarsen_pairwise, detect_communities,
                                      edge_scores, fm_refine, heavy_edge_rating,
                                      initial_partition, project, replay, resistance_rating,
                                      uncoarsen_and_refine)


def pair_sharing(labels, truth):
    same = truth[:, None] == truth[None, :]
    together = labels[:, None] == labels[None, :]
    off = ~np.eye(truth.size, dtype=bool)
    return (together & same & off).sum() / (same & off).sum()


def test_heavy_edge_examples():
    assert heavy_edge_rating(Hypergraph.from_edges([[0, 1]], edge_weights=[2]), 0, 1) == 2
    assert heavy_edge_rating(Hypergraph.from_edges([[0, 1, 2, 3, 4]]), 0, 1) == 0.25
    assert heavy_edge_rating(Hypergraph.from_edges([[0, 1], [0, 1, 2]]), 0, 1) == 1.5
    assert heavy_edge_rating(Hypergraph.from_edges([[0, 1], [2, 3]]), 0, 2) == 0
    with pytest.raises(ValueError):
        heavy_edge_rating(Hypergraph.from_edges([[0, 1]]), 0, 0)


def test_resistance_rating_monotone():
    h = Hypergraph.from_edges([[0, 1], [2, 3]])
    assert resistance_rating(h, [0.1, 0.9], 0, 1) > resistance_rating(h, [0.1, 0.9], 2, 3)


def test_resistance_rating_uniform_follows_weights():
    h = random_hypergraph(12, 20, weighted=True, seed=3)
    pairs = list(itertools.combinations(range(12), 2))
    uniform = [resistance_rating(h, np.full(20, 0.4), p, q) for p, q in pairs]
    weights = [float(h.edge_weights[np.intersect1d(h.incident_edges(p), h.incident_edges(q))].sum())
               for p, q in pairs]
    assert np.array_equal(np.argsort(uniform, kind="stable"), np.argsort(weights, kind="stable"))


def test_bridge_pair_rated_lowest():
    h, bridge = bridged_blobs(8, 1.0)
    r = estimate_resistances(h, embed(h, 4, 0), 2)
    ratings = {tuple(e): resistance_rating(h, r, *e) for e in h.edges()}
    b = tuple(h.edge(bridge))
    assert all(ratings[b] < v for e, v in ratings.items() if e != b)


@given(st.integers(0, 2 ** 31), st.floats(0.01, 100))
def test_resistance_argmax_scale_invariant(seed, lam):
    h = random_hypergraph(10, 16, seed=seed % 3000)
    r = np.random.default_rng(seed).random(16) + 0.01
    for p in range(10):
        nb = [q for q in range(10) if q != p]
        a = [resistance_rating(h, r, p, q) for q in nb]
        b = [resistance_rating(h, r * lam, p, q) for q in nb]
        assert np.argmax(a) == np.argmax(b)


def test_edge_scores_requires_resistance():
    with pytest.raises(ValueError):
        edge_scores(Hypergraph.from_edges([[0, 1]]), "resistance")


def test_communities_disconnected_components():
    h = disjoint_union([random_hypergraph(20, 40, seed=1), random_hypergraph(20, 40, seed=2)])
    cm = detect_communities(h, 2, seed=0)
    for members in cm.members():
        assert (members < 20).all() or (members >= 20).all()


def test_communities_planted():
    shares = []
    for seed in range(10):
        ph = planted_partition(400, 2, seed=seed)
        cm = detect_communities(ph.hypergraph, 2, seed=seed)
        shares.append(pair_sharing(cm.cluster_of, ph.labels))
    assert np.median(shares) >= 0.9


def test_communities_single_clique():
    h = Hypergraph.from_edges([list(c) for c in itertools.combinations(range(8), 2)])
    assert detect_communities(h, 1, seed=0).num_clusters == 1


def test_coarsen_pairwise_target_equals_n():
    h = random_hypergraph(20, 30, seed=1)
    assert coarsen_pairwise(h, None, None, 20, rating="heavy-edge").levels == []


def test_coarsen_pairwise_respects_communities():
    h = Hypergraph.from_edges([[0, 1], [2, 3], [1, 2]], edge_weights=[1, 1, 10])
    state = coarsen_pairwise(h, None, [0, 0, 1, 1], 2, rating="heavy-edge")
    cm = state.levels[0].cluster_map
    assert cm.cluster_of.tolist() == [0, 0, 1, 1]


@given(st.integers(0, 2 ** 31), st.sampled_from(["heavy-edge", "resistance"]))
def test_coarsen_pairwise_invariants(seed, rating):
    h = random_hypergraph(40, 70, seed=seed % 2000, node_weighted=True)
    comm = np.random.default_rng(seed).integers(0, 3, 40)
    target = 10
    state = coarsen_pairwise(h, None, comm, target, rating=rating, seed=seed)
    cap = 1.5 * h.total_node_weight / target
    assert replay(state) is h
    cur_comm = comm
    for lv in state.levels:
        for u, v in lv.pairs:
            assert cur_comm[u] == cur_comm[v]
        assert np.all(lv.coarse.node_weights <= cap + 1e-9)
        assert lv.coarse.total_node_weight == h.total_node_weight
        nxt = np.zeros(lv.cluster_map.num_clusters, dtype=np.int64)
        nxt[lv.cluster_map.cluster_of] = cur_comm
        cur_comm = nxt


def test_replay_detects_tampering():
    h = random_hypergraph(30, 50, seed=4)
    state = coarsen_pairwise(h, None, None, 10, rating="heavy-edge")
    lv = state.levels[0]
    bad = lv.pairs.copy()
    bad[0, 1] = (bad[0, 1] + 1) % 30
    state.levels[0] = type(lv)(lv.fine, lv.coarse, lv.cluster_map, bad, lv.edge_map)
    with pytest.raises(ValueError):
        replay(state)


def test_initial_two_nodes():
    h = Hypergraph.from_edges([[0, 1]], edge_weights=[3])
    p = initial_partition(h, 2, 0.1)
    assert sorted(p.block_of.tolist()) == [0, 1] and cutsize(h, p) == 3


def test_initial_disconnected_zero_cut():
    h = disjoint_union([random_connected_graph(10, 8, seed=1), random_connected_graph(10, 8, seed=2)])
    zero = sum(cutsize(h, initial_partition(h, 2, 0.02, seed=s)) == 0 for s in range(10))
    assert zero >= 9


def test_initial_deterministic_and_infeasible():
    h = random_hypergraph(30, 50, seed=2)
    a = initial_partition(h, 2, 0.05, seed=3, tries=1)
    assert a == initial_partition(h, 2, 0.05, seed=3, tries=1)
    heavy = Hypergraph.from_edges([[0, 1], [1, 2]], node_weights=[10, 1, 1])
    with pytest.raises(InfeasibleError):
        initial_partition(heavy, 2, 0.1)


def test_fm_local_optimum_unchanged():
    h = Hypergraph.from_edges([[0, 1], [2, 3], [1, 2]])
    p = Partition([0, 0, 1, 1], 2, 0.25)
    assert fm_refine(h, p) == p


def test_fm_moves_misplaced_node():
    h = Hypergraph.from_edges([[0, 1], [0, 2], [0, 3], [4, 5], [5, 6], [6, 7], [3, 4]])
    p = Partition([1, 0, 0, 0, 1, 1, 1, 1], 2, 0.125)
    q = fm_refine(h, p)
    assert q.block_of.tolist() == [0, 0, 0, 0, 1, 1, 1, 1]
    assert cutsize(h, q) == cutsize(h, p) - 3


@given(st.integers(0, 2 ** 31), st.sampled_from([0.05, 0.1, 0.25]))
def test_fm_bounded_by_brute_force(seed, eps):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 13))
    h = random_hypergraph(n, int(rng.integers(n, 2 * n)), 4, weighted=True, seed=seed % 4000)
    lo, hi = (0.5 - eps) * n, (0.5 + eps) * n
    size = int(np.ceil(lo))
    if size > hi:
        return
    blocks = np.ones(n, dtype=int)
    blocks[rng.choice(n, size, replace=False)] = 0
    p = Partition(blocks, 2, eps)
    q = fm_refine(h, p)
    _, best = brute_best_bipartition(h, eps)
    assert best - 1e-9 <= cutsize(h, q) <= cutsize(h, p) + 1e-9
    assert check_balance(h, q).feasible


def test_uncoarsen_no_levels_is_fm():
    h = random_hypergraph(20, 30, seed=5)
    p = initial_partition(h, 2, 0.1, seed=0, tries=1, fm_passes=0)
    state = coarsen_pairwise(h, None, None, 20, rating="heavy-edge")
    assert uncoarsen_and_refine(state, p) == fm_refine(h, p)


def test_projection_preserves_cut_and_refinement_improves():
    ph = planted_partition(300, 2, seed=1)
    h = ph.hypergraph
    state = coarsen_pairwise(h, None, None, 40, rating="heavy-edge", seed=1)
    coarse = state.coarsest
    pc = initial_partition(coarse, 2, 0.05, seed=1)
    cm = state.levels[0].cluster_map
    for lv in state.levels[1:]:
        cm = cm.compose(lv.cluster_map)
    projected = Partition(project(pc.block_of, cm), 2, 0.05)
    assert cutsize(h, projected) == cutsize(coarse, pc)
    out = uncoarsen_and_refine(state, pc)
    assert cutsize(h, out) <= cutsize(h, projected)
    assert check_balance(h, out).feasible


def test_bisection_epsilon():
    assert bisection_epsilon(2, 0.02) == pytest.approx(0.04)
    k, eps = 8, 0.02
    e = bisection_epsilon(k, eps)
    assert (1 + e) ** 3 / k == pytest.approx(1 / k + eps)


def test_partition_four_components():
    parts = [random_connected_graph(12, 10, seed=i) for i in range(4)]
    h = disjoint_union(parts)
    zero = 0
    for seed in range(10):
        p = partition(h, 4, 0.05, PartitionConfig(seed=seed))
        assert check_balance(h, p).feasible
        zero += cutsize(h, p) == 0
    assert zero >= 9


def test_partition_deterministic_and_feasible():
    h = planted_partition(300, 2, seed=4).hypergraph
    cfg = PartitionConfig(seed=7)
    a, b = partition(h, 2, 0.02, cfg), partition(h, 2, 0.02, cfg)
    assert a == b and check_balance(h, a).feasible


def test_partition_three_way_balance():
    h = planted_partition(300, 3, seed=2).hypergraph
    p = partition(h, 3, 0.03, PartitionConfig(seed=1))
    assert check_balance(h, p).feasible and p.k == 3


def test_partition_errors():
    h = random_hypergraph(10, 10, seed=1)
    with pytest.raises(ValueError):
        partition(h, 1, 0.1)
    with pytest.raises(ValueError):
        partition(h, 2, 0.6)
    with pytest.raises(ValueError):
        PartitionConfig(rating="nope")
    heavy = Hypergraph.from_edges([[0, 1], [1, 2]], node_weights=[10, 1, 1])
    with pytest.raises(InfeasibleError):
        partition(heavy, 2, 0.1)
