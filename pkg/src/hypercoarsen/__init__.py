"""Spectral hypergraph coarsening, flow-based cluster refinement and balanced partitioning."""
from .core import (BalanceReport, ClusterMap, Hypergraph, Partition, avg_conductance,
                   check_balance, conductance, cut, cutsize, degree, hlc_score,
                   local_conductance, volume)
from .embedding import Embedding, embed
from .estimators import (FlowCommunityDetector, HyperEFClustering, SpectralPartitioner,
                         check_hypergraph)
from .exceptions import (DegenerateInputError, HypergraphError, InfeasibleError, ParseError,
                         UndefinedMetricError)
from .hyperef import CoarseningHierarchy, CoarseningLevel, coarsen
from .hypersf import refine_seed
from .io import read_hmetis, read_partition, write_hmetis, write_partition
from .partitioner import PartitionConfig, partition
from .resistance import ResistanceVector, estimate_resistances

__version__ = "0.1.0"

__all__ = [
    "BalanceReport", "ClusterMap", "CoarseningHierarchy", "CoarseningLevel", "DegenerateInputError",
    "Embedding", "FlowCommunityDetector", "HyperEFClustering", "Hypergraph", "HypergraphError",
    "InfeasibleError", "ParseError", "Partition", "PartitionConfig", "ResistanceVector",
    "SpectralPartitioner", "UndefinedMetricError", "avg_conductance", "check_balance",
    "check_hypergraph", "coarsen", "conductance", "cut", "cutsize", "degree", "embed",
    "estimate_resistances", "hlc_score", "local_conductance", "partition", "read_hmetis",
    "read_partition", "refine_seed", "volume", "write_hmetis", "write_partition",
]
