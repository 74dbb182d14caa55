"""Exception types shared across the package."""


class SmcregError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(SmcregError):
    """Shapes of supplied arrays do not agree."""


class DecompositionError(SmcregError):
    """Symmetric eigendecomposition failed or produced an unusable result."""


class ConditioningError(SmcregError):
    """A precision matrix is numerically singular; signals a configuration bug."""


class SimplexError(SmcregError):
    """A probability vector fails the nonnegativity / sums-to-one check."""


class SupportError(SmcregError):
    """A response value lies outside the declared support of the family."""


class RangeError(SmcregError):
    """A predictor value falls outside the range the bases were built on."""


class CorruptedStateError(SmcregError):
    """Non-finite values entered the particle system or weight pipeline."""


class TuningError(SmcregError):
    """Batch-based tuning exhausted its retries without a converging verdict."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class IngestError(SmcregError):
    """A stream record could not be parsed or validated."""

    def __init__(self, message, line_number=None):
        super().__init__(message)
        self.line_number = line_number


class ConfigError(SmcregError):
    """The run configuration is invalid or incomplete."""
