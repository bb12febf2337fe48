import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypercoarsen import Hypergraph, coarsen, cut, hlc_score, refine_seed
from hypercoarsen.datasets import barbell, disjoint_union, random_hypergraph
from hypercoarsen.hypersf import (FlowNetwork, absorb_singletons, build_flow_network, max_flow,
                                  neighborhood, refine_seed_detailed, select_seeds)
from hypercoarsen.oracle import brute_best_hlc, brute_min_cut

from conftest import hypergraphs


def objective(h, local, ref, alpha, beta):
    """Brute-force minimum of cut(S) + alpha*vol(C - S) + alpha*beta*vol(S - C) over S within local."""
    d = h.degrees
    local = sorted(local)
    best = math.inf
    for r in range(len(local) + 1):
        for combo in itertools.combinations(local, r):
            s = np.zeros(h.num_nodes, bool)
            s[list(combo)] = True
            c = np.zeros(h.num_nodes, bool)
            c[list(ref)] = True
            val = cut(h, s) + alpha * d[c & ~s].sum() + alpha * beta * d[s & ~c].sum()
            best = min(best, val)
    return best


def objective_at(h, side, ref, alpha, beta):
    s = np.zeros(h.num_nodes, bool)
    s[side] = True
    c = np.zeros(h.num_nodes, bool)
    c[list(ref)] = True
    d = h.degrees
    return cut(h, s) + alpha * d[c & ~s].sum() + alpha * beta * d[s & ~c].sum()


def test_neighborhood_examples(path4):
    assert neighborhood(Hypergraph.from_edges([[0, 1]], num_nodes=3), [2]).size == 0
    assert neighborhood(Hypergraph.from_edges([[0, 1, 2]]), [0]).tolist() == [1, 2]
    assert neighborhood(path4, [1]).tolist() == [0, 2]


def test_parallel_paths():
    net = FlowNetwork(4)
    net.add_arc(0, 2, 2)
    net.add_arc(2, 1, 10)
    net.add_arc(0, 3, 10)
    net.add_arc(3, 1, 3)
    value, _ = max_flow(net)
    assert value == 5
    assert brute_min_cut(net)[0] == 5


def test_network_rejects_bad_arcs():
    net = FlowNetwork(3)
    with pytest.raises(ValueError):
        net.add_arc(1, 2, 1)
    with pytest.raises(ValueError):
        net.add_arc(2, 0, 1)
    with pytest.raises(ValueError):
        net.add_arc(0, 2, -1)


def test_single_gadget():
    h = Hypergraph.from_edges([[0, 1]], edge_weights=[3])
    net = build_flow_network(h, [0, 1], [0], 100.0, 1.0)
    value, side = max_flow(net)
    assert value == 3 and side.tolist() == [0]
    # S = C: only the gadget is paid, no penalty
    assert objective_at(h, [0], [0], 100.0, 1.0) == 3


def test_build_rejects_bad_alpha():
    h = Hypergraph.from_edges([[0, 1]])
    for alpha in (0, -1, math.inf):
        with pytest.raises(ValueError):
            build_flow_network(h, [0, 1], [0], alpha)
    with pytest.raises(ValueError):
        build_flow_network(h, [0], [1], 1.0)


def test_outside_pins_go_to_sink():
    h = Hypergraph.from_edges([[0, 1, 2]])
    net = build_flow_network(h, [0, 1], [0, 1], 10.0)
    value, side = max_flow(net)
    assert value == 1 and side.tolist() == [0, 1]


@given(st.integers(0, 2 ** 31))
def test_max_flow_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 12))
    net = FlowNetwork(n)
    for _ in range(int(rng.integers(1, 3 * n))):
        u, v = rng.choice(n, 2, replace=False)
        if u == 1 or v == 0:
            continue
        net.add_arc(int(u), int(v), float(rng.integers(0, 11)))
    assert max_flow(net)[0] == pytest.approx(brute_min_cut(net)[0], abs=1e-9)


@given(st.integers(0, 2 ** 31), st.floats(0.05, 3), st.sampled_from([0.0, 0.5, 1.0, 2.0]))
def test_gadget_network_is_exact(seed, alpha, beta):
    rng = np.random.default_rng(seed)
    h = random_hypergraph(10, 12, 4, weighted=True, seed=seed % 5000)
    local = sorted(rng.choice(10, int(rng.integers(2, 8)), replace=False).tolist())
    ref = local[: max(1, len(local) // 2)]
    net = build_flow_network(h, local, ref, alpha, beta)
    value, side = max_flow(net)
    assert value == pytest.approx(objective(h, local, ref, alpha, beta), abs=1e-9)
    assert value == pytest.approx(objective_at(h, side, ref, alpha, beta), abs=1e-9)
    if net.num_vertices - 2 <= 16:
        assert value == pytest.approx(brute_min_cut(net)[0], abs=1e-9)


def test_refine_component_unchanged():
    h = Hypergraph.from_edges([[0, 1], [1, 2], [3, 4]])
    res = refine_seed_detailed(h, [0, 1, 2])
    assert res.nodes.tolist() == [0, 1, 2] and res.hlc == 0 and res.flow_solves == 0


def test_refine_barbell_matches_brute_force():
    h = barbell()
    s_best, v_best = brute_best_hlc(h, [0], 1.0)
    assert refine_seed(h, [0]).tolist() == s_best == [0] and v_best == 1.0
    s_best, v_best = brute_best_hlc(h, [0, 1, 2], 1.0)
    res = refine_seed_detailed(h, [0], reference="neighborhood")
    assert res.nodes.tolist() == s_best == [0, 1, 2]
    assert res.hlc == pytest.approx(v_best) and v_best == pytest.approx(1 / 7)


def test_refine_xi_infinite_single_solve():
    h = barbell()
    res = refine_seed_detailed(h, [0], xi=math.inf, reference="neighborhood")
    assert res.flow_solves == 1
    assert res.hlc <= hlc_score(h, [0], res.reference, 1.0)


def test_refine_rejects_bad_arguments():
    h = barbell()
    with pytest.raises(ValueError):
        refine_seed(h, [])
    with pytest.raises(ValueError):
        refine_seed(h, [0], beta=-1)
    with pytest.raises(ValueError):
        refine_seed(h, [0], xi=0)


@given(hypergraphs(min_nodes=3, max_nodes=12, max_edges=14), st.data())
def test_refine_monotone_and_local(h, data):
    v = data.draw(st.integers(0, h.num_nodes - 1))
    size = data.draw(st.integers(1, 3))
    seed = sorted({v, *data.draw(st.lists(st.integers(0, h.num_nodes - 1), max_size=size))})
    reference = data.draw(st.sampled_from(["seed", "neighborhood"]))
    beta = data.draw(st.sampled_from([0.0, 0.5, 1.0]))
    res = refine_seed_detailed(h, seed, beta=beta, max_expansions=3, reference=reference)
    start = hlc_score(h, seed, res.reference, beta)
    alphas = res.alphas
    assert all(b <= a + 1e-12 for a, b in zip(alphas, alphas[1:]))
    if math.isfinite(start):
        assert res.hlc <= start + 1e-12
    ball = np.zeros(h.num_nodes, bool)
    ball[seed] = True
    ball[res.reference] = True
    for _ in range(3):
        ball[neighborhood(h, ball)] = True
    assert ball[res.visited].all()


def test_select_seeds_all_merged():
    h = Hypergraph.from_edges([[0, 1], [2, 3]])
    hier = coarsen(h, 1, reduction_target=0.5, delta=math.inf)
    assert hier.coarsest.num_nodes == 2
    assert select_seeds(hier) == []


def test_select_seeds_single():
    h = Hypergraph.from_edges([[0, 1], [1, 2]])
    hier = coarsen(h, 1, reduction_target=0.34, delta=math.inf)
    seeds = select_seeds(hier)
    assert len(seeds) == 1 and seeds[0].size == 1


def test_select_seeds_order():
    h = random_hypergraph(40, 60, seed=6)
    hier = coarsen(h, 10, reduction_target=0.5)
    cm = hier.cluster_map()
    r = hier.levels[0].resistances.r
    single = [v for v in range(40) if cm.sizes()[cm.cluster_of[v]] == 1]
    key = {v: (hier.eta[cm.cluster_of[v]], min(r[e] for e in h.incident_edges(v))
               if h.incident_edges(v).size else math.inf, v) for v in single}
    expected = sorted(single, key=key.get)
    got = [int(s[0]) for s in select_seeds(hier)]
    assert got == expected
    assert [int(s[0]) for s in select_seeds(hier, 3)] == expected[:3]


def test_absorb_singletons_stays_in_component():
    parts = [random_hypergraph(15, 30, seed=i) for i in range(2)]
    h = disjoint_union(parts)
    hier = coarsen(h, 10, reduction_target=0.8)
    cm, moved = absorb_singletons(hier)
    assert moved >= 0
    for members in cm.members():
        assert (members < 15).all() or (members >= 15).all()
