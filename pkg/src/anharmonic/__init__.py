"""Time-sliced path integral of the quartic anharmonic oscillator.

Parabolic-cylinder representation of the sliced integral, the leading-part
recurrences and their continuum limit, the generalised Gelfand-Yaglom
equation, remainder bookkeeping, and independent numerical oracles.
"""

from .errors import (BranchPoleError, ConvergenceError, DomainError, NotPositiveDefiniteError,
                     PCFRangeError, RecurrenceBlowUpError, SeriesBreakdownError)
from .slicing import ModelParams, SliceGrid, build_grid

__all__ = [
    "BranchPoleError", "ConvergenceError", "DomainError", "NotPositiveDefiniteError",
    "PCFRangeError", "RecurrenceBlowUpError", "SeriesBreakdownError",
    "ModelParams", "SliceGrid", "build_grid",
]

__version__ = "0.1.0"
