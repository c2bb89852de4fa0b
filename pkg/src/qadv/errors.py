"""Exception hierarchy shared across the package."""


class QadvError(Exception):
    """Base class for all package errors."""


class ConfigurationError(QadvError, ValueError):
    """Inconsistent sizes, indices or hyperparameters."""


class InputError(QadvError, ValueError):
    """Malformed numeric input (non-finite angle, zero vector, size mismatch)."""


class FormatError(QadvError, ValueError):
    """A file on disk does not match the expected binary or JSON layout."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class TrainingError(QadvError, RuntimeError):
    """Optimisation produced a non-finite loss."""

    def __init__(self, message, epoch=None):
        if epoch is not None:
            message = f"epoch {epoch}: {message}"
        super().__init__(message)
        self.epoch = epoch


class DegenerateParameterError(QadvError, ValueError):
    """Physical parameters sit on a gap closing."""
