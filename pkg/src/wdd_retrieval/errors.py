"""
Exception hierarchy for wdd-retrieval.
"""

from __future__ import annotations

from typing import Optional


class WDDError(Exception):
    """Base class for every error raised by this package."""


class PreconditionError(WDDError, ValueError):
    """An argument is outside the range an operation accepts."""


class NonDivisorError(PreconditionError):
    """A subsampling factor does not divide the signal length."""

    def __init__(self, name: str, value: int, d: int) -> None:
        self.name = name
        self.value = value
        self.d = d
        super().__init__(f"{name} must divide d ({name}={value}, d={d})")


class NearZeroDenominatorError(WDDError, ZeroDivisionError):
    """A componentwise division hit a denominator below the guard threshold."""

    def __init__(self, index: int, magnitude: float, threshold: float, what: str = "") -> None:
        self.index = index
        self.magnitude = magnitude
        self.threshold = threshold
        prefix = f"{what}: " if what else ""
        super().__init__(
            f"{prefix}denominator at index {index} has magnitude {magnitude:.3e} "
            f"< threshold {threshold:.3e}"
        )


class NoConvergenceError(WDDError, RuntimeError):
    """An iterative solver stopped at its iteration cap."""

    def __init__(self, iterations: int, residual: float) -> None:
        self.iterations = iterations
        self.residual = residual
        super().__init__(f"no convergence after {iterations} iterations (residual {residual:.3e})")


class StageError(WDDError):
    """Wraps a failure with the pipeline stage it came from."""

    def __init__(self, stage: str, cause: Exception, algorithm: Optional[str] = None) -> None:
        self.stage = stage
        self.cause = cause
        self.algorithm = algorithm
        where = f"{algorithm}/{stage}" if algorithm else stage
        super().__init__(f"[{where}] {cause}")
