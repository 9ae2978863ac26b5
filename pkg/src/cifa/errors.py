"""Exception types raised across the package.

Every data or algorithm error is a ``ValueError`` subclass so callers that
only care about bad input can catch that; file problems raise
:class:`IoError`, an ``OSError``.  The CLI maps each class to its own exit
code.
"""


class IoError(OSError):
    """Missing or unreadable input file or directory."""


class CifaError(ValueError):
    """Base class for all package errors."""


class DimensionMismatch(CifaError):
    pass


class NonFinite(CifaError):
    pass


class TooFewBlocks(CifaError):
    pass


class InvalidSpec(CifaError):
    pass


class ZeroSignal(CifaError):
    pass


class RankTooLarge(CifaError):
    pass


class ZeroMatrix(CifaError):
    pass


class TooShort(CifaError):
    pass


class DegenerateSum(CifaError):
    pass


class DegenerateP(CifaError):
    pass


class DegenerateLift(CifaError):
    pass


class SeparatorFailure(CifaError):
    pass


class TooFewSamples(CifaError):
    pass


class ZeroVariance(CifaError):
    pass


class LengthMismatch(CifaError):
    pass
