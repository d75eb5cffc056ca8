"""Exception types shared across the package."""


class CausalError(Exception):
    """Base class for every error raised by this package."""


class ParseError(CausalError):
    """A graph edge specification could not be parsed."""


class SelfLoop(CausalError):
    """An edge connects a vertex to itself."""


class CyclicGraph(CausalError):
    """The directed part of the graph contains a directed cycle."""


class UnknownVertex(CausalError):
    """A vertex name does not belong to the graph at hand."""


class NameCollision(CausalError):
    """A synthesized vertex name clashes with an existing vertex."""


class OverlappingSets(CausalError):
    """Vertex sets that must be disjoint overlap."""


class InvalidPath(CausalError):
    """A vertex sequence is not a valid path in the graph."""


class EmptyVar(CausalError):
    """A probability expression needs a non-empty outcome set."""


class InvalidQuery(CausalError):
    """A causal query violates disjointness or membership requirements."""


class ZeroDenominator(CausalError):
    """A conditional probability was requested against a zero-mass event."""


class UnboundVariable(CausalError):
    """An expression was evaluated without bindings for all free variables."""


class InternalError(CausalError):
    """An internal invariant was violated; this indicates a bug."""
