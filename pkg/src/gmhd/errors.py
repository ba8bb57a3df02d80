"""Exception types shared across the package."""


class GmhdError(Exception):
    """Base class for all package errors."""


class ParameterError(GmhdError, ValueError):
    """A symbol family parameter is outside its legal range."""


class DomainError(GmhdError, ValueError):
    """An evaluation point is outside the symbol's domain (r < 0)."""


class BracketError(GmhdError, RuntimeError):
    """Root bracketing failed to enclose a sign change."""


class ToleranceError(GmhdError, RuntimeError):
    """A quadrature could not meet the requested tolerance.

    Carries the best achieved relative error estimate.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class GridMismatchError(GmhdError, ValueError):
    """A field array does not match the grid it is used with."""


class ZeroFieldError(GmhdError, ValueError):
    """An operation requiring a nonzero field received (numerically) zero."""


class InstabilityError(GmhdError, RuntimeError):
    """Time integration produced non-finite or exploding fields.

    Attributes carry whatever partial outputs were written before the abort.
    """

    def __init__(self, message, t=None, step=None, ledger=None, state=None):
        super().__init__(message)
        self.t = t
        self.step = step
        self.ledger = ledger
        self.state = state
