"""Exception and warning types used across the package.

Validation problems (bad inputs, inconsistent shapes, parameter ranges)
derive from ``ValueError``; failures arising during numerical computation
derive from ``RuntimeError``. The CLI maps the former to exit code 1 and
the latter to exit code 2.
"""


class GridMismatchError(ValueError):
    """Two discretized functions do not share a compatible grid."""


class EndpointError(ValueError):
    """A warping function is not pinned to the interval endpoints."""


class MonotonicityError(ValueError):
    """A warping function is not strictly increasing on its grid."""


class ParameterError(ValueError):
    """A parameter lies outside its admissible range."""


class InsufficientDataError(ValueError):
    """Too few samples to carry out the requested estimation."""


class TruncationError(ValueError):
    """More components requested than the fitted model provides."""


class DegenerateError(ValueError):
    """The input carries no usable variation (e.g. all-zero eigenvalues)."""


class QuantileInversionError(RuntimeError):
    """The distribution function cannot be inverted at grid resolution."""


class HazardOverflowError(RuntimeError):
    """The reconstructed distribution function saturates before the tail cut."""


class OptimizationError(RuntimeError):
    """A scalar search failed to produce a finite objective value."""


class ClrDomainWarning(UserWarning):
    """Density values were floored before taking logarithms."""


class DegenerateWarning(RuntimeWarning):
    """A transformed function is close to a degenerate configuration."""
