"""Exception types shared across the package."""


class UsageError(ValueError):
    """Invalid arguments: bad resolution, out-of-range index, mismatched inputs."""


class MeasureFormatError(UsageError):
    """A measure file could not be parsed or failed validation."""


class InconclusiveError(RuntimeError):
    """Raised when no exponent could be classified; carries the per-s diagnostics."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or []
