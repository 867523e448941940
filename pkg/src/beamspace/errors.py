"""Exception types shared across the package."""


class FormatError(ValueError):
    """A binary file has the wrong magic bytes or an unsupported version."""


class ValidationError(ValueError):
    """A loaded structure is internally inconsistent (bad shapes, bad ranges)."""


class TruncatedFileError(OSError):
    """A binary file ended before the advertised payload was read."""


class NumericError(ArithmeticError):
    """The solver produced a non-finite quantity.

    Carries the layer index at which the failure occurred.
    """

    def __init__(self, message, layer=None):
        super().__init__(message)
        self.layer = layer


class ConfigurationError(ValueError):
    """An experiment configuration is invalid or incomplete."""


class MetricUndefined(ValueError):
    """A metric's denominator is zero, so the value does not exist."""
