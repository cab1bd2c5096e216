"""
Error types for Hilbert Embedding Lab.

Every error raised by a numerical module derives from HarnessError and
carries the process exit code the CLI reports for it.
"""

from typing import Any, Optional


class HarnessError(Exception):
    """
    Base class for all errors raised by the lab.

    Attributes:
        exit_code: Process exit status reported by the CLI
    """
    exit_code: int = 3

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ConfigError(HarnessError):
    """
    Configuration failed schema validation.

    The path is a JSON pointer into the offending document
    (e.g. "/parameters/sigma").
    """
    exit_code = 2

    def __init__(self, message: str, path: str = ""):
        super().__init__(message)
        self.path = path

    def __str__(self) -> str:
        if self.path:
            return f"{self.path}: {self.message}"
        return self.message


class NumericError(HarnessError):
    """A computation produced non-finite or non-convergent values."""


class DomainError(NumericError):
    """An input lies outside the region where an operation is defined."""


class ShapeError(NumericError):
    """State or grid shapes do not match."""


class NormalizationError(NumericError):
    """A state that must be unit-normalized is not."""


class SingularOperatorError(NumericError):
    """An operator that must be inverted is singular."""


class InstabilityError(NumericError):
    """Time stepping lost unitarity beyond tolerance."""


class PolarDecompositionError(NumericError):
    """Amplitude vanishes where a polar decomposition is required."""


class SingularityError(NumericError):
    """Evaluation requested too close to a kernel singularity."""


class NoRealRootError(NumericError):
    """A quadratic constraint has no real solution."""


class NonErgodicError(NumericError):
    """Random walks were not absorbed within the step budget."""


class OptimizationError(NumericError):
    """
    Minimization stopped without converging.

    Attributes:
        gradient_norm: Norm of the gradient at the last iterate
    """

    def __init__(self, message: str, gradient_norm: float):
        super().__init__(f"{message} (gradient norm {gradient_norm:.3e})")
        self.gradient_norm = gradient_norm


class ExperimentError(HarnessError):
    """
    Wraps a module error with the experiment that raised it.

    The exit code is inherited from the wrapped error.
    """

    def __init__(self, experiment_id: str, cause: HarnessError):
        super().__init__(f"[{experiment_id}] {cause}")
        self.experiment_id = experiment_id
        self.cause: Optional[HarnessError] = cause
        self.exit_code = cause.exit_code


def config_error_from_validation(exc: Any, prefix: str = "") -> ConfigError:
    """
    Convert a pydantic ValidationError into a ConfigError.

    The first error's loc becomes a JSON pointer under prefix.
    """
    errors = exc.errors()
    if not errors:
        return ConfigError(str(exc), prefix or "/")
    first = errors[0]
    pointer = prefix + "".join(f"/{part}" for part in first.get("loc", ()))
    extra = f" (+{len(errors) - 1} more)" if len(errors) > 1 else ""
    return ConfigError(f"{first.get('msg', 'invalid value')}{extra}", pointer or "/")
