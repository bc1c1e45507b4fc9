"""Exception types shared across the package."""


class DigitinkError(Exception):
    """Base class for all package-specific errors."""


class ShapeMismatchError(DigitinkError):
    """Tensor shapes are incompatible; names both shapes."""

    def __init__(self, message: str, expected=None, actual=None):
        if expected is not None or actual is not None:
            message = f"{message} (expected {expected}, got {actual})"
        super().__init__(message)
        self.expected = expected
        self.actual = actual


class DegenerateStrokeError(DigitinkError):
    """A stroke collapsed to a single point, so no displacement vectors exist."""


class TrainingDivergedError(DigitinkError):
    """Loss or gradients turned non-finite during training."""


class AuditError(DigitinkError):
    """A model failed the structural audit against the reference tables."""


class DatasetFormatError(DigitinkError):
    """A dataset file failed schema or semantic validation."""
