"""Krylov-subspace node embeddings built on a simple-graph expansion of the hypergraph."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Hypergraph
from .exceptions import DegenerateInputError
from .expansion import NormalizedAdjacencyOp, clique_expand, hybrid_expand, star_expand

DEFAULT_RHO = 4
DEFAULT_DROP_TOL = 1e-10


@dataclass(frozen=True)
class Embedding:
    """``vectors[i]`` is the i-th embedding vector restricted to the original nodes."""

    vectors: np.ndarray
    rho: int
    seed: int | None

    @property
    def num_vectors(self) -> int:
        return self.vectors.shape[0]


def random_start_vector(n: int, seed=None) -> np.ndarray:
    """Mean-centered Rademacher vector.

    For ``n >= 2`` draws are repeated until the centered vector is nonzero;
    for ``n == 1`` the result is ``[0.0]``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    while True:
        x = rng.choice(np.array([-1.0, 1.0]), size=n)
        x -= x.mean()
        if n == 1 or np.any(x != 0):
            return x


def build_krylov(op, x: np.ndarray, rho: int) -> list[np.ndarray]:
    """Return ``[x, A x, ..., A^rho x]``."""
    if rho < 1:
        raise ValueError("rho must be >= 1")
    x = np.asarray(x, dtype=np.float64)
    if not np.any(x):
        raise DegenerateInputError("Krylov start vector is zero")
    apply = op.apply if hasattr(op, "apply") else (lambda v: op @ v)
    basis = [x]
    for _ in range(rho):
        basis.append(apply(basis[-1]))
    return basis


def orthogonalize(vectors, drop_tol: float = DEFAULT_DROP_TOL) -> list[np.ndarray]:
    """Modified Gram-Schmidt with one re-orthogonalization sweep.

    A vector whose residual norm falls below ``drop_tol`` times its original
    norm is dropped.  Returned vectors are unit length.
    """
    vectors = list(vectors)
    if not vectors:
        raise ValueError("nothing to orthogonalize")
    out: list[np.ndarray] = []
    for v in vectors:
        w = np.array(v, dtype=np.float64)
        norm0 = np.linalg.norm(w)
        if norm0 == 0:
            continue
        for _ in range(2):
            for q in out:
                w -= (q @ w) * q
        nrm = np.linalg.norm(w)
        if nrm < drop_tol * norm0:
            continue
        out.append(w / nrm)
    if not out:
        raise DegenerateInputError("all vectors were linearly dependent or zero")
    return out


def _substrate(h: Hypergraph, expansion: str, size_threshold: int):
    if expansion == "star":
        se = star_expand(h)
        return se.graph
    if expansion == "clique":
        return clique_expand(h)
    if expansion == "hybrid":
        return hybrid_expand(h, size_threshold).graph
    raise ValueError(f"unknown expansion {expansion!r}")


def ritz_vectors(op: NormalizedAdjacencyOp, basis: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Rayleigh-Ritz pairs of ``op`` on the span of the orthonormal ``basis``.

    Returns ``(values, vectors)`` sorted by decreasing Ritz value, i.e. from
    the smoothest direction to the roughest.  The vectors are orthonormal and
    span the same subspace as ``basis``.
    """
    q = np.column_stack(basis)
    t = q.T @ (op.matrix @ q)
    lam, y = np.linalg.eigh(0.5 * (t + t.T))
    order = np.argsort(-lam, kind="stable")
    return lam[order], (q @ y[:, order]).T


def embed(h: Hypergraph, rho: int = DEFAULT_RHO, seed=0, *, expansion: str = "star",
          size_threshold: int = 3, drop_tol: float = DEFAULT_DROP_TOL) -> Embedding:
    """Embed the nodes of ``h`` with up to ``rho`` orthogonal Krylov vectors.

    A seeded random start vector, with the operator's trivial eigenvector
    ``D^{1/2} 1`` projected out, spans an order-``rho + 1`` Krylov subspace on
    the expansion graph.  The subspace is rotated onto its Ritz vectors and
    the roughest one is dropped, so the ``rho`` kept directions are the
    smoothest the subspace offers.  Star-vertex entries are stripped and each
    vector is mapped back to node space as ``D^{-1/2} u``.
    """
    if rho < 1:
        raise ValueError("rho must be >= 1")
    if h.num_nodes < 2:
        raise ValueError("embedding needs at least two nodes")
    if h.num_edges == 0:
        raise DegenerateInputError("hypergraph has no hyperedges")
    op = NormalizedAdjacencyOp(_substrate(h, expansion, size_threshold))
    x = random_start_vector(op.shape[0], seed)
    trivial = np.sqrt(op.degrees)
    trivial /= np.linalg.norm(trivial)
    x = x - (trivial @ x) * trivial
    q = orthogonalize(build_krylov(op, x, rho), drop_tol)
    _, vecs = ritz_vectors(op, q)
    vecs = vecs[:rho]
    n = h.num_nodes
    back = op.inv_sqrt_degrees[:n]
    kept = [v[:n] * back for v in vecs if np.linalg.norm(v[:n]) > drop_tol]
    if not kept:
        raise DegenerateInputError("Krylov subspace has no support on the original nodes")
    return Embedding(np.vstack(kept), rho, seed)
