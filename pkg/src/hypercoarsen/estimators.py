"""scikit-learn style wrappers: ``fit(H)`` sets ``labels_``."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, ClusterMixin

from .core import Hypergraph, avg_conductance, cutsize
from .embedding import DEFAULT_RHO
from .hyperef import DEFAULT_LEVELS, DEFAULT_PERCENTILE, DEFAULT_REDUCTION, coarsen
from .hypersf import DEFAULT_BETA, DEFAULT_MAX_EXPANSIONS, DEFAULT_XI
from .partitioner import PartitionConfig, detect_communities, partition
from .resistance import DEFAULT_M


def check_hypergraph(X, num_nodes: int | None = None) -> Hypergraph:
    """Coerce ``X`` into a :class:`Hypergraph`.

    Accepts a ``Hypergraph``, an iterable of pin lists, or a node-by-hyperedge
    incidence matrix (dense or sparse; nonzero entries are pins).
    """
    if isinstance(X, Hypergraph):
        if num_nodes is not None and X.num_nodes != num_nodes:
            raise ValueError("hypergraph has the wrong number of nodes")
        return X
    if sp.issparse(X) or isinstance(X, np.ndarray):
        inc = sp.csc_matrix(X)
        if inc.ndim != 2:
            raise ValueError("incidence matrix must be two-dimensional")
        inc.eliminate_zeros()
        inc.sort_indices()
        n = inc.shape[0] if num_nodes is None else num_nodes
        if n != inc.shape[0]:
            raise ValueError("incidence matrix has the wrong number of rows")
        return Hypergraph(n, inc.indptr, inc.indices)
    try:
        edges = [list(map(int, e)) for e in X]
    except TypeError:
        raise TypeError(f"cannot interpret {type(X).__name__} as a hypergraph") from None
    return Hypergraph.from_edges(edges, num_nodes=num_nodes)


class HyperEFClustering(ClusterMixin, BaseEstimator):
    """Resistance-based multilevel clustering.

    After ``fit``: ``labels_`` (cluster per node), ``n_clusters_``,
    ``hierarchy_`` and ``avg_conductance_``.
    """

    def __init__(self, levels=DEFAULT_LEVELS, reduction=DEFAULT_REDUCTION, rho=DEFAULT_RHO,
                 m=DEFAULT_M, delta=None, percentile=DEFAULT_PERCENTILE, seed=0):
        self.levels = levels
        self.reduction = reduction
        self.rho = rho
        self.m = m
        self.delta = delta
        self.percentile = percentile
        self.seed = seed

    def fit(self, X, y=None):
        h = check_hypergraph(X)
        self.hierarchy_ = coarsen(h, self.levels, self.rho, self.m, self.reduction, self.seed,
                                  delta=self.delta, percentile=self.percentile)
        cm = self.hierarchy_.cluster_map()
        self.labels_ = cm.cluster_of.copy()
        self.n_clusters_ = cm.num_clusters
        self.avg_conductance_ = avg_conductance(h, cm) if cm.num_clusters >= 2 else np.nan
        return self


class FlowCommunityDetector(ClusterMixin, BaseEstimator):
    """Resistance coarsening followed by flow refinement of leftover singletons."""

    def __init__(self, n_communities=None, reduction=None, rho=DEFAULT_RHO, m=DEFAULT_M,
                 beta=DEFAULT_BETA, xi=DEFAULT_XI, max_expansions=DEFAULT_MAX_EXPANSIONS, seed=0):
        self.n_communities = n_communities
        self.reduction = reduction
        self.rho = rho
        self.m = m
        self.beta = beta
        self.xi = xi
        self.max_expansions = max_expansions
        self.seed = seed

    def fit(self, X, y=None):
        h = check_hypergraph(X)
        red = self.reduction
        if red is None and self.n_communities is None:
            red = DEFAULT_REDUCTION
        cm = detect_communities(h, self.n_communities, reduction=red, rho=self.rho, m=self.m,
                                seed=self.seed, beta=self.beta, xi=self.xi,
                                max_expansions=self.max_expansions)
        self.labels_ = cm.cluster_of.copy()
        self.n_clusters_ = cm.num_clusters
        return self


class SpectralPartitioner(ClusterMixin, BaseEstimator):
    """Balanced k-way partitioner; ``labels_`` holds the block of every node."""

    def __init__(self, k=2, epsilon=0.02, rating="resistance", community="flow", rho=DEFAULT_RHO,
                 m=DEFAULT_M, seed=0):
        self.k = k
        self.epsilon = epsilon
        self.rating = rating
        self.community = community
        self.rho = rho
        self.m = m
        self.seed = seed

    def fit(self, X, y=None):
        h = check_hypergraph(X)
        cfg = PartitionConfig(rating=self.rating, community=self.community, seed=self.seed,
                              rho=self.rho, m=self.m)
        self.partition_ = partition(h, self.k, self.epsilon, cfg)
        self.labels_ = self.partition_.block_of.copy()
        self.cutsize_ = cutsize(h, self.partition_)
        return self
