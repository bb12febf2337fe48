"""Hyperedge effective-resistance estimates from an embedding."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Hypergraph
from .embedding import Embedding
from .exceptions import UndefinedMetricError

DEFAULT_M = 2


@dataclass(frozen=True)
class ResistanceVector:
    r: np.ndarray
    m_used: int
    rho_used: int

    def __len__(self):
        return self.r.size


def edge_spread(h: Hypergraph, chi: np.ndarray) -> np.ndarray:
    """``max - min`` of ``chi`` over the pins of every hyperedge."""
    vals = np.asarray(chi, dtype=np.float64)[h.pins]
    return h.edge_reduce(vals, np.maximum) - h.edge_reduce(vals, np.minimum)


def quadratic_form(h: Hypergraph, chi) -> float:
    """``sum_e w(e) * max_{u,v in e} (chi_u - chi_v)^2``."""
    chi = np.asarray(chi, dtype=np.float64)
    if chi.shape != (h.num_nodes,):
        raise ValueError("chi must have one entry per node")
    return float(h.edge_weights @ edge_spread(h, chi) ** 2)


def resistance_ratio(h: Hypergraph, chi, e: int) -> float:
    """Squared spread of ``chi`` on hyperedge ``e`` over the quadratic form."""
    q = quadratic_form(h, chi)
    if q == 0:
        raise UndefinedMetricError("quadratic form is zero; ratio undefined")
    pins = h.edge(e)
    vals = np.asarray(chi, dtype=np.float64)[pins]
    return float((vals.max() - vals.min()) ** 2 / q)


def resistance_ratios(h: Hypergraph, emb: Embedding) -> np.ndarray:
    """Ratios for every (vector, hyperedge); shape ``(num_vectors, num_edges)``.

    Vectors whose quadratic form vanishes contribute zero ratios.
    """
    out = np.zeros((emb.num_vectors, h.num_edges))
    for i, chi in enumerate(emb.vectors):
        spread2 = edge_spread(h, chi) ** 2
        q = float(h.edge_weights @ spread2)
        if q > 0:
            out[i] = spread2 / q
    return out


def estimate_resistances(h: Hypergraph, emb: Embedding, m: int = DEFAULT_M) -> ResistanceVector:
    """Sum of the ``m`` largest per-vector ratios for each hyperedge."""
    if not 1 <= m <= emb.rho:
        raise ValueError(f"m must lie in [1, rho={emb.rho}]")
    if emb.vectors.shape[1] != h.num_nodes:
        raise ValueError("embedding does not match the hypergraph")
    ratios = resistance_ratios(h, emb)
    m_used = min(m, ratios.shape[0])
    # stable descending sort: equal ratios keep vector order
    order = np.argsort(-ratios, axis=0, kind="stable")
    top = np.take_along_axis(ratios, order[:m_used], axis=0)
    r = np.zeros(h.num_edges)
    for row in top:
        r += row
    return ResistanceVector(r, m_used, emb.num_vectors)
