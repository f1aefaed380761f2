"""Exception hierarchy shared by every module.

The command-line front end maps :class:`DomainError` to exit code 2, so any
condition that means "these parameters are outside the region where the
computation is defined" derives from it.
"""


class DomainError(ValueError):
    """Parameters lie outside the domain of a formula or a branch."""


class NotPositiveDefiniteError(DomainError):
    """A Gaussian quadratic form has a non-positive leading minor.

    Attributes
    ----------
    index : int
        One-based index of the first leading principal minor that fails.
    value : float
        The offending pivot (ratio of consecutive minors).
    """

    def __init__(self, index, value):
        super().__init__(
            f"quadratic form is not positive definite: pivot {index} = {value!r}")
        self.index = index
        self.value = value


class RecurrenceBlowUpError(DomainError):
    """A continued-fraction iterate hit zero, so the next step divides by zero."""

    def __init__(self, index, value):
        super().__init__(f"iterate {index} vanished (value {value!r})")
        self.index = index
        self.value = value


class BranchPoleError(DomainError):
    """Trigonometric branch evaluated at or beyond its first pole or zero."""


class SeriesBreakdownError(DomainError):
    """A truncated series produced a non-positive value where a positive one is required."""


class PCFRangeError(OverflowError):
    """A parabolic cylinder value does not fit in a double.

    Raised both for overflow and for underflow below the normal range, since a
    flushed-to-zero result cannot meet the relative accuracy contract.

    Attributes
    ----------
    log_abs : float
        Natural logarithm of the magnitude of the exact value.
    sign : int
        Sign of the exact value.
    """

    def __init__(self, log_abs, sign, message=None):
        super().__init__(message or f"value exp({log_abs:.6g}) out of double range")
        self.log_abs = log_abs
        self.sign = sign


class ConvergenceError(ArithmeticError):
    """An iterative or extrapolation procedure failed its own error check."""
