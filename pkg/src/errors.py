"""Exception hierarchy. Each error carries the process exit code the CLI maps it to."""

from __future__ import annotations


class AitvError(Exception):
    """Base class for all library errors."""

    exit_code: int = 1


# =============================================================================
# Usage / validation errors (exit code 2)
# =============================================================================


class ValidationFailure(AitvError):
    exit_code = 2


class InvalidConfig(ValidationFailure):
    pass


class InvalidAlpha(ValidationFailure):
    pass


class InvalidBeta(ValidationFailure):
    pass


class ShapeMismatch(ValidationFailure):
    pass


class TooSmall(ValidationFailure):
    pass


class RowOutOfRange(ValidationFailure):
    pass


class AllZeroImage(ValidationFailure):
    pass


class NegativeMean(ValidationFailure):
    pass


class NonPositiveIntensity(ValidationFailure):
    pass


class ColorImageRejected(ValidationFailure):
    pass


# =============================================================================
# Solver failures (exit code 1)
# =============================================================================


class SolverFailure(AitvError):
    exit_code = 1


class NonFiniteIterate(SolverFailure):
    pass


class NonNegligibleImaginary(SolverFailure):
    pass


# =============================================================================
# I/O errors (exit code 3)
# =============================================================================


class ImageIOError(AitvError):
    exit_code = 3
