import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given

from hypercoarsen import Hypergraph
from hypercoarsen.expansion import (clique_expand, hybrid_expand, normalized_adjacency,
                                    star_expand)
from hypercoarsen.oracle import exact_resistance

from conftest import hypergraphs


def test_star_expand_single_edge():
    se = star_expand(Hypergraph.from_edges([[0, 1, 2]], edge_weights=[3]))
    assert se.num_vertices == 4 and se.star_offset == 3
    g = se.graph.toarray()
    assert g[3, :3].tolist() == [1, 1, 1] and g[:3, 3].tolist() == [1, 1, 1]
    assert sp.triu(se.graph).nnz == 3


def test_star_expand_two_pin_weights():
    se = star_expand(Hypergraph.from_edges([[0, 1], [1, 2]]))
    assert np.allclose(se.graph.data, 0.5)


@given(hypergraphs(min_nodes=1, max_nodes=10, max_edges=10))
def test_star_expand_is_bipartite(h):
    g = star_expand(h).graph.tocoo()
    n = h.num_nodes
    assert all((r < n) != (c < n) for r, c in zip(g.row, g.col))
    assert sp.triu(g).nnz == h.num_pins
    for r, c, v in zip(g.row, g.col, g.data):
        if r < n:
            e = c - n
            assert v == pytest.approx(h.edge_weights[e] / h.edge_sizes[e])


def test_clique_examples():
    assert np.allclose(clique_expand(Hypergraph.from_edges([[0, 1, 2]], edge_weights=[2])).toarray(),
                       np.ones((3, 3)) - np.eye(3))
    assert clique_expand(Hypergraph.from_edges([[0, 1]], edge_weights=[5])).toarray()[0, 1] == 5
    g = clique_expand(Hypergraph.from_edges([[0, 1, 2], [1, 2]])).toarray()
    assert g[1, 2] == pytest.approx(1.5)


def test_clique_ignores_singletons():
    g = clique_expand(Hypergraph.from_edges([[0], [1, 2]]))
    assert g.shape == (3, 3) and g.nnz == 2


def test_hybrid_examples():
    h = Hypergraph.from_edges([[0, 1], [1, 2, 3, 4, 5]])
    g = hybrid_expand(h, 3).graph
    assert g.shape == (7, 7)
    assert g[0, 1] == 1 and g[6, 1] == pytest.approx(0.2)
    big = hybrid_expand(h, 10 ** 6)
    assert big.graph.shape == (6, 6)
    assert (big.graph != clique_expand(h)).nnz == 0
    h2 = Hypergraph.from_edges([[0, 1], [1, 2, 3]])
    assert (hybrid_expand(h2, 1).graph != star_expand(h2).graph).nnz == 0


def test_normalized_adjacency_examples():
    for w in (0.5, 1.0, 7.0):
        op = normalized_adjacency(sp.csr_matrix(np.array([[0, w], [w, 0]])))
        assert np.allclose(op.apply([1, 0]), [0, 1])
    rng = np.random.default_rng(1)
    a = sp.random(30, 30, density=0.2, random_state=2)
    a = a + a.T + sp.diags(np.ones(29), 1) + sp.diags(np.ones(29), -1)
    op = normalized_adjacency(a)
    perron = np.sqrt(op.degrees)
    assert np.allclose(op.apply(perron), perron)
    for _ in range(100):
        x = rng.standard_normal(30)
        assert np.linalg.norm(op.apply(x)) <= np.linalg.norm(x) * (1 + 1e-12)


def test_normalized_adjacency_isolated_vertex():
    op = normalized_adjacency(sp.csr_matrix(np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0.0]])))
    assert op.apply([1, 1, 5])[2] == 0


@given(hypergraphs(min_nodes=3, max_nodes=7, max_edges=6))
def test_star_resistance_metric(h):
    g = star_expand(h).graph
    n = h.num_nodes
    r = np.full((n, n), np.inf)
    for p in range(n):
        for q in range(n):
            r[p, q] = 0 if p == q else exact_resistance(g, p, q)
    assert np.allclose(r, r.T, equal_nan=True)
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if np.isfinite(r[a, c]) and np.isfinite(r[c, b]):
                    assert r[a, b] <= r[a, c] + r[c, b] + 1e-9
