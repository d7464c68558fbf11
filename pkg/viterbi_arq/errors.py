"""
Exception hierarchy. Every error raised on purpose by the package derives from
ViterbiArqError, and also from the builtin it specializes.
"""


class ViterbiArqError(Exception):
    """Base class for all package errors."""


class InvalidCodeError(ViterbiArqError, ValueError):
    """Generator polynomials or CodeSpec fields are inconsistent."""


class WeightCapError(ViterbiArqError, ValueError):
    """A weight cap (free-distance search or k_max) is too small."""


class CoefficientOverflowError(ViterbiArqError, ArithmeticError):
    """A fixed-width path counter would overflow."""


class ConvergenceError(ViterbiArqError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""


class SpecialFunctionRangeError(ViterbiArqError, OverflowError):
    """Argument outside the documented evaluation range."""


class DivergenceError(ViterbiArqError, ArithmeticError):
    """A series was evaluated outside its region of convergence."""


class PreconditionError(ViterbiArqError, ValueError):
    """A bound was requested where its precondition fails."""


class ObservationError(ViterbiArqError, ValueError):
    """Received samples and envelopes do not match the trellis."""


class ConfigError(ViterbiArqError, ValueError):
    """Experiment configuration is invalid."""


class SweepCellError(ViterbiArqError, RuntimeError):
    """A grid cell of a sweep failed; the message names the cell."""
