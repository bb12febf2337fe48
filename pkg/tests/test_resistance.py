import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import spearmanr

from hypercoarsen import Hypergraph, UndefinedMetricError, cut, embed, estimate_resistances
from hypercoarsen.datasets import random_connected_graph, random_hypergraph
from hypercoarsen.embedding import Embedding
from hypercoarsen.expansion import clique_expand
from hypercoarsen.oracle import all_pairs_resistance
from hypercoarsen.resistance import quadratic_form, resistance_ratio, resistance_ratios

from conftest import hypergraph_and_subset


def test_quadratic_form_examples():
    h = Hypergraph.from_edges([[0, 1], [1, 2]])
    assert quadratic_form(h, [3, 3, 3]) == 0
    assert quadratic_form(h, [1, 0, 0]) == 1


@given(hypergraph_and_subset(max_nodes=12, max_edges=15))
def test_quadratic_form_of_indicator_is_cut(hs):
    h, s = hs
    assert abs(quadratic_form(h, s.astype(float)) - cut(h, s)) <= 1e-12


def test_ratio_examples():
    h = Hypergraph.from_edges([[0], [0, 1]], edge_weights=[1, 4])
    assert resistance_ratio(h, [2.0, -1.0], 0) == 0
    assert resistance_ratio(h, [2.0, -1.0], 1) == pytest.approx(1 / 4)
    with pytest.raises(UndefinedMetricError):
        resistance_ratio(h, [1.0, 1.0], 1)


def test_triangle_fiedler_ratio_below_exact():
    tri = Hypergraph.from_edges([[0, 1], [1, 2], [0, 2]])
    fiedler = np.array([1.0, -1.0, 0.0])
    for e in range(3):
        assert resistance_ratio(tri, fiedler, e) <= 2 / 3 + 1e-12


def test_estimate_m_equals_rho_one():
    h = random_hypergraph(20, 30, seed=2)
    emb = embed(h, 1, 0)
    rv = estimate_resistances(h, emb, 1)
    assert np.allclose(rv.r, resistance_ratios(h, emb)[0])
    assert (rv.m_used, rv.rho_used) == (1, 1)


def test_single_edge_estimate():
    h = Hypergraph.from_edges([[0, 1]], edge_weights=[4])
    emb = Embedding(np.array([[1.0, -1.0], [0.3, 0.1]]), 2, None)
    assert estimate_resistances(h, emb, 2).r[0] == pytest.approx(2 * 0.25)
    with pytest.raises(ValueError):
        estimate_resistances(h, emb, 3)


def test_constant_vector_contributes_zero():
    h = Hypergraph.from_edges([[0, 1], [1, 2]])
    emb = Embedding(np.array([[1.0, 1.0, 1.0], [1.0, 0.0, 0.0]]), 2, None)
    assert resistance_ratios(h, emb)[0].tolist() == [0, 0]


def test_path_example_is_degenerate():
    # every edge of a tree has exact resistance 1/w, so the rank correlation is undefined
    p5 = Hypergraph.from_edges([[0, 1], [1, 2], [2, 3], [3, 4]])
    exact = all_pairs_resistance(clique_expand(p5))
    truth = np.round([exact[a, b] for a, b in p5.edges()], 9)
    assert np.allclose(truth, 1.0)
    est = estimate_resistances(p5, embed(p5, 4, 0), 2).r
    assert np.all(np.isfinite(est)) and np.all(est > 0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert np.isnan(spearmanr(est, truth)[0])


@given(st.integers(0, 2 ** 31), st.integers(1, 4))
def test_monotone_in_m(seed, m):
    h = random_hypergraph(15, 25, seed=seed % 1000)
    emb = embed(h, 4, seed)
    lo = estimate_resistances(h, emb, m).r
    hi = estimate_resistances(h, emb, min(4, m + 1)).r
    assert np.all(lo <= hi + 1e-15) and np.all(lo >= 0)


@given(st.integers(0, 2 ** 31), st.floats(0.1, 10))
def test_scaling_weights(seed, lam):
    h = random_hypergraph(15, 25, seed=seed % 1000, weighted=True)
    g = Hypergraph(h.num_nodes, h.eptr, h.pins, h.edge_weights * lam)
    emb = embed(h, 4, 0)
    a = estimate_resistances(h, emb, 2).r
    b = estimate_resistances(g, emb, 2).r
    assert np.allclose(b, a / lam)


@given(st.integers(0, 2 ** 31))
def test_ratio_bounded_by_exact_on_graphs(seed):
    h = random_connected_graph(12, 10, seed=seed % 10000)
    exact = all_pairs_resistance(clique_expand(h))
    chi = np.random.default_rng(seed).standard_normal(12)
    for e, (p, q) in enumerate(h.edges()):
        assert resistance_ratio(h, chi, e) <= exact[p, q] + 1e-9
