"""Exception types raised by the library."""


class ExpurgateError(ValueError):
    """Base class for all library errors."""


class NonStochasticRow(ExpurgateError):
    pass


class NegativeEntry(ExpurgateError):
    pass


class InvalidDistribution(ExpurgateError):
    pass


class NonFinite(ExpurgateError):
    """An objective evaluated to NaN during optimization."""


class Diverged(ExpurgateError):
    """A Legendre-type optimization ran into its parameter cap."""


class NoFiniteR1(ExpurgateError):
    pass


class AlphabetTooLarge(ExpurgateError):
    pass


class DomainError(ExpurgateError):
    pass


class ModelError(ExpurgateError):
    """Invalid enumerator model or an exact computation that is too large."""


class SpecFormatError(ExpurgateError):
    """A channel file parsed as JSON but has the wrong layout."""
