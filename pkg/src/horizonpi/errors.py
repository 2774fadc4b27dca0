"""Exception hierarchy shared by all horizonpi modules."""


class HorizonPiError(Exception):
    """Base class for all horizonpi errors."""


class ConfigInvalid(HorizonPiError):
    """A config file or CLI argument set failed validation."""


class NumericError(HorizonPiError):
    """Base class for numerical failures (exit code 3 in the CLI)."""


class DimensionMismatch(NumericError):
    pass


class RankDeficient(NumericError):
    pass


class NonConvergence(NumericError):
    pass


class EmptyGrid(NumericError):
    pass


class EmptyInput(NumericError):
    pass


class InsufficientData(NumericError):
    pass


class InsufficientWindows(NumericError):
    pass


class InvalidAlpha(NumericError):
    pass


class BandwidthNonPositive(NumericError):
    pass


class AlphaOutOfRange(NumericError):
    pass


class TruncationTooSmall(NumericError):
    pass


class UnstableSpec(NumericError):
    pass


class TooManyFrequencies(NumericError):
    pass


class ColumnMismatch(NumericError):
    pass


class DivergentCoefficientSum(NumericError):
    pass
