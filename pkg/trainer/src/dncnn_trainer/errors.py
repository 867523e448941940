class FormatError(ValueError):
    """A dataset file has the wrong magic bytes or version."""


class TruncatedFileError(OSError):
    """A dataset file ended before the advertised payload."""


class TrainingError(RuntimeError):
    """Training produced a non-finite loss."""


class ExportError(RuntimeError):
    """Batch-norm folding failed verification at export time."""
