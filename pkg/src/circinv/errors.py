"""Exception types shared across the package.

Every error raised by public operations derives from CircinvError and
carries an ``operation`` attribute ("module.function") so the CLI can
report which step failed.
"""


class CircinvError(Exception):
    """Base class for all package errors."""

    def __init__(self, message, operation=None):
        super().__init__(message)
        self.operation = operation


class ParameterError(CircinvError, ValueError):
    """Invalid argument value (non-positive radius, bad sizes, ...)."""


class DomainError(CircinvError, ValueError):
    """Input outside the mathematical domain of the operation."""


class DegenerateCurveError(CircinvError):
    """Curve has a zero-speed point; no regular parameterization."""


class EmbeddingError(CircinvError):
    """Curve self-intersects (or comes too close to doing so)."""


class TopologyError(CircinvError):
    """Disk boundary does not cross the curve in exactly two points.

    ``last_valid`` optionally holds the last good iterate when raised
    from an iterative scheme.
    """

    def __init__(self, message, operation=None, last_valid=None):
        super().__init__(message, operation)
        self.last_valid = last_valid


class ConvergenceError(CircinvError):
    """Iteration failed to converge.

    ``last_valid`` optionally holds the last iterate and ``trace`` the
    residual history when raised from the reconstruction loop.
    """

    def __init__(self, message, operation=None, last_valid=None, trace=None):
        super().__init__(message, operation)
        self.last_valid = last_valid
        self.trace = trace


class NearSingularError(CircinvError):
    """Transversality denominator too small; derivative unreliable."""


class ConsistencyError(CircinvError):
    """Internal quantities violate an exact identity beyond tolerance."""


class GeometryError(CircinvError):
    """Degenerate polygon handed to the area oracle."""


class TangencyWarning(UserWarning):
    """Crossing count unreliable: near-tangential intersection found."""
