"""Exception hierarchy shared by every module of the package."""


class LongMemError(Exception):
    """Base class for all package errors."""


class InputError(LongMemError, ValueError):
    """Rejected input: wrong shape, out-of-domain value, malformed file row."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class NumericalError(LongMemError, ArithmeticError):
    """A computation produced an undefined or non-finite result."""


class ConvergenceError(LongMemError, RuntimeError):
    """Optimization failed on every start.

    ``incumbent`` holds the best (non-converged) fit found, if any.
    """

    def __init__(self, message, incumbent=None):
        super().__init__(message)
        self.incumbent = incumbent


class FitQualityWarning(UserWarning):
    """A fit completed but something about it deserves a second look."""
