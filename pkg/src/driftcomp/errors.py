"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: validation/parse/configuration
problems exit 3, numerical divergence exits 4, usage errors exit 2.
"""


class DriftcompError(Exception):
    """Base class for all package errors."""


class DimensionError(DriftcompError):
    """Rejected input: operand shapes or lengths do not line up."""


class SingularMatrixError(DriftcompError):
    """A linear system is rank deficient and no ridge guard was requested."""


class ValidationError(DriftcompError):
    """Data violates a documented invariant (bounds, monotonic time, ...)."""


class ParseError(ValidationError):
    """A file could not be parsed; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class LabelingError(ValidationError):
    """A dataset is missing the ground-truth labels an operation needs."""


class ConfigurationError(DriftcompError):
    """Components were wired together inconsistently (e.g. window sizes)."""


class DivergenceError(DriftcompError):
    """Training or optimization produced non-finite numbers."""
