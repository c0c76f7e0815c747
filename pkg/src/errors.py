"""Exception hierarchy for cmtra.

Every error raised by the library carries a short machine-readable ``code``, an
optional ``detail`` hint for the user, and the process exit code the CLI maps it to:

- 1: configuration errors
- 2: data errors (corpus files, labels, checkpoints)
- 3: numerical errors (shapes, non-finite values)
"""


class CmtraError(Exception):
    """Base class for all cmtra errors."""

    exit_code = 1

    def __init__(self, message: str, code: str | None = None, detail: str | None = None):
        """Initialize error.

        Args:
            message: Human-readable error message
            code: Error code for programmatic handling
            detail: Additional detail or hint
        """
        super().__init__(message)
        self.message = message
        self.code = code or type(self).__name__
        self.detail = detail


class ConfigError(CmtraError):
    """Invalid configuration value or combination."""

    exit_code = 1


class DataError(CmtraError):
    """Invalid or unreadable input data."""

    exit_code = 2


class IoError(DataError):
    """A file could not be read or written."""


class LabelParseError(DataError):
    """A label string is not in the alias table."""


class LabelSetError(DataError):
    """A label is not permitted for the dataset's language."""


class EmptyTextError(DataError):
    """A record's text is empty after trimming."""


class UnlabeledSampleError(DataError):
    """An operation that needs gold labels met an unlabeled sample."""


class LanguageMismatchError(DataError):
    """Two inputs that must share a language do not."""


class EmptyCorpusError(DataError):
    """A corpus has no tokens to build a vocabulary from."""


class EmptyEvaluationError(DataError):
    """Metrics were requested over zero scored samples."""


class SplitLeakError(DataError):
    """A split was routed to a stage it must never reach."""


class OriginError(DataError):
    """A sample has the wrong origin tag for the requested operation."""


class CheckpointError(DataError):
    """A checkpoint file is malformed or inconsistent with its manifest."""


class RecordError(DataError):
    """A record error located at a specific file and line."""

    def __init__(self, path: str, line_number: int, cause: DataError):
        super().__init__(
            f"{path}:{line_number}: {cause.message}",
            code=cause.code,
            detail=cause.detail,
        )
        self.path = path
        self.line_number = line_number
        self.cause = cause


class NumericalError(CmtraError):
    """A numerical kernel produced or received non-finite values."""

    exit_code = 3


class ShapeError(NumericalError, ValueError):
    """Operand shapes are inconsistent."""


class EmptySequenceError(NumericalError, ValueError):
    """A sequence kernel received zero time steps."""


class StageError(CmtraError):
    """A pipeline stage failed; wraps the underlying error."""

    def __init__(self, stage: str, cause: Exception):
        message = f"stage '{stage}' failed: {cause}"
        detail = getattr(cause, "detail", None)
        super().__init__(message, code=getattr(cause, "code", type(cause).__name__), detail=detail)
        self.stage = stage
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", 1)
