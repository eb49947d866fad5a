"""Exception types raised by the solvers and helpers."""


class SharpConstError(Exception):
    """Base class for all errors raised by this package."""


class ZeroScale(SharpConstError, ValueError):
    """A scale parameter that must be nonzero was zero."""


class InvalidExponent(SharpConstError, ValueError):
    """A weight exponent makes the weight non-integrable."""


class NoConvergence(SharpConstError, RuntimeError):
    """An iterative procedure hit its budget before meeting the tolerance."""


class SingularGram(SharpConstError, RuntimeError):
    """A Gram matrix is numerically singular."""


class LPFailure(SharpConstError, RuntimeError):
    """The linear-programming solver failed or stalled."""


class UnsupportedDimension(SharpConstError, ValueError):
    """The requested dimension is outside what the quadrature rules cover."""


class InsufficientData(SharpConstError, ValueError):
    """Too few sequence entries for extrapolation."""
