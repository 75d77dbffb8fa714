"""Exception types raised by the transduct package."""


class TransductError(Exception):
    """Base class for all errors raised by this package."""


class UnknownFormatError(TransductError, ValueError):
    """File does not start with a supported magic header."""


class KindMismatchError(TransductError, ValueError):
    """File content kind differs from the kind the caller expected."""


class CorruptPayloadError(TransductError, ValueError):
    """Header and payload disagree, or the payload holds invalid values."""


class DimensionError(TransductError, ValueError):
    """Array shapes are inconsistent or degenerate."""


class ZeroNormRowError(TransductError, ValueError):
    """A row with (near-)zero L2 norm cannot be normalized."""


class NotNormalizedError(TransductError, ValueError):
    """An operation requiring unit-norm rows received unnormalized data."""


class InvalidKError(TransductError, ValueError):
    """Neighbor count for the kNN graph is out of range."""


class TooLargeError(TransductError, ValueError):
    """Graph exceeds the densification guard for eigen checks."""


class DegenerateSigmaError(TransductError, ValueError):
    """A variance entry fell below the documented floor."""


class EmptyClassError(TransductError, ValueError):
    """A class lost all assignment mass and no previous mean is available."""


class NonFiniteObjectiveError(TransductError, ArithmeticError):
    """Objective evaluation produced NaN or infinity."""


class NonFiniteRowError(TransductError, ArithmeticError):
    """An assignment update overflowed despite stabilization."""


class ConfigError(TransductError, ValueError):
    """Solver configuration violates its invariants."""


class LengthMismatchError(TransductError, ValueError):
    """Paired vectors have different lengths."""


class EmptyClassWarning(UserWarning):
    """A class lost all assignment mass; its mean was kept unchanged."""
