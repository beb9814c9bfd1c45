"""Exception hierarchy.

Input problems derive from :class:`InputError` (CLI exit code 2), numerical
breakdowns from :class:`NumericalError` (CLI exit code 3).
"""

from __future__ import annotations


class TraceWitnessError(Exception):
    """Base class for all errors raised by this package."""


class InputError(TraceWitnessError, ValueError):
    """Invalid input: wrong shape, wrong definiteness, bad configuration."""


class NumericalError(TraceWitnessError, ArithmeticError):
    """A computation could not be carried out reliably in floating point."""


class AsymmetryError(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class DomainError(InputError):
    """A spectral function was applied outside its admissible eigenvalue range."""


class NotPDError(InputError):
    pass


class NotPSDError(InputError):
    pass


class NotDensityError(InputError):
    pass


class InvalidFunctional(InputError):
    pass


class NormalizationError(InputError):
    pass


class InvalidConfig(InputError):
    pass


class DegenerateGrid(InputError):
    pass


class LiteralFormatError(InputError):
    """A matrix literal could not be parsed."""


class ConvergenceError(NumericalError):
    pass


class ConditionError(NumericalError):
    """Condition number above the accepted cap."""


class SamplerExhausted(NumericalError):
    pass


class ScalarFunctional(UserWarning):
    """Issued when a witness search is run on a multiple of the trace.

    No violation can exist in that case; the search still runs its full grid
    and returns a non-violated report.
    """
