"""Exception hierarchy shared by the library and the CLI."""


class GeerError(Exception):
    """Base class for all errors raised by this package."""


class GraphFormatError(GeerError, ValueError):
    """Malformed edge list. ``line`` is 1-based, or None for whole-file problems."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SpectralDegeneracyError(GeerError, ValueError):
    """The graph is bipartite or disconnected, or its spectral gap is too small."""


class GraphTooLargeError(GeerError, ValueError):
    """A dense routine was asked to handle more nodes than its cap allows."""


class NonConvergenceError(GeerError, RuntimeError):
    """Power iteration did not converge. The last iterate is kept for inspection."""

    def __init__(self, message, estimate=None, vector=None, iterations=0):
        super().__init__(message)
        self.estimate = estimate
        self.vector = vector
        self.iterations = iterations


class MetaFormatError(GeerError, ValueError):
    """The spectral metadata sidecar could not be parsed."""


class MetaMismatchError(GeerError, ValueError):
    """The spectral metadata was computed for a different graph."""


class PreconditionError(GeerError, ValueError):
    """A method-specific precondition is violated (e.g. MC2 on a non-edge)."""


class NoReturnError(GeerError, RuntimeError):
    """MC walks never produced a usable excursion (step cap hit or no successes)."""


class QueryTimeout(GeerError):
    """Raised cooperatively when a query runs past its deadline."""
