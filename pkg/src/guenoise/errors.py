"""Exception types raised across the package."""


class GueNoiseError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(GueNoiseError, ValueError):
    """A Hilbert-space dimension outside the domain of an operation."""


class InvalidInputError(GueNoiseError, ValueError):
    """Malformed input: non-Hermitian matrix, bad permutation, shape mismatch."""


class InvalidParameterError(GueNoiseError, ValueError):
    """Parameter combination violating an operation's preconditions."""


class UnsupportedRegimeError(GueNoiseError, ValueError):
    """Request outside the supported numerical envelope (order, dimension)."""


class NumericError(GueNoiseError, ArithmeticError):
    """A numerical routine failed (e.g. eigensolver non-convergence)."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class NumericConsistencyError(NumericError):
    """An analytically real or bounded quantity violated its invariant."""


class DegeneratePointError(GueNoiseError, ZeroDivisionError):
    """A ratio is evaluated where its denominator vanishes."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class MonteCarloAbortError(NumericError):
    """Too many sample draws failed for the estimate to be trusted."""
