"""Exception hierarchy shared by every module of the package."""


class HypergraphError(ValueError):
    """Structurally invalid hypergraph, node set, partition or cluster map."""


class UndefinedMetricError(ValueError):
    """A ratio metric (conductance, local conductance, resistance ratio) has no finite value."""


class DegenerateInputError(ValueError):
    """Input carries no usable spectral information (zero vector, empty subspace, no hyperedges)."""


class InfeasibleError(ValueError):
    """No partition satisfies the requested balance constraint."""


class ParseError(ValueError):
    """Malformed hMETIS hypergraph or partition file."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
