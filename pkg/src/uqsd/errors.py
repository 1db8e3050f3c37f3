class UQSDError(ValueError):
    """Base class for library errors."""


class InvalidInputError(UQSDError):
    """Malformed or out-of-range input (CLI exit code 2)."""


class InfeasibleError(UQSDError):
    """Well-formed input whose constraints cannot be met (CLI exit code 3)."""
