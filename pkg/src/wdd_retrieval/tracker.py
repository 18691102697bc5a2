"""
Decorator and context manager that time recovery stages and tag their errors.
"""

from __future__ import annotations

import functools
import logging
import time
from contextlib import contextmanager
from typing import Any, Callable, Iterator, Optional, TypeVar

from wdd_retrieval.errors import StageError, WDDError

logger = logging.getLogger(__name__)

F = TypeVar("F", bound=Callable[..., Any])


class StageTimings:
    """Wall-clock seconds per named stage, in the order the stages ran."""

    def __init__(self) -> None:
        self.seconds: dict[str, float] = {}

    def add(self, name: str, seconds: float) -> None:
        self.seconds[name] = self.seconds.get(name, 0.0) + seconds

    @property
    def total(self) -> float:
        return sum(self.seconds.values())

    def as_dict(self) -> dict[str, float]:
        return dict(self.seconds)


# ------------------------------------------------------------------
# Context manager
# ------------------------------------------------------------------


@contextmanager
def stage(
    name: str, timings: Optional[StageTimings] = None, algorithm: Optional[str] = None
) -> Iterator[StageTimings]:
    """Time a block and re-raise package errors as ``StageError`` naming the block::

        with stage("wdd", timings, "alg1"):
            bands = collapse_bandlimited_mask(...)
    """
    record = timings if timings is not None else StageTimings()
    start = time.perf_counter()
    try:
        yield record
    except StageError:
        raise
    except WDDError as exc:
        raise StageError(name, exc, algorithm) from exc
    finally:
        elapsed = time.perf_counter() - start
        record.add(name, elapsed)
        logger.debug("stage %s took %.4f s", name, elapsed)


# ------------------------------------------------------------------
# Decorator
# ------------------------------------------------------------------


def timed(label: Optional[str] = None) -> Callable[[F], F]:
    """Record the wrapped call's wall time on ``result.runtime_seconds``.

    Usage::

        @timed("alg1")
        def algorithm1(meas, mask):
            ...
            return RecoveryResult(...)
    """

    def decorator(func: F) -> F:
        @functools.wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            start = time.perf_counter()
            result = func(*args, **kwargs)
            elapsed = time.perf_counter() - start
            if hasattr(result, "runtime_seconds"):
                result.runtime_seconds = elapsed
            logger.info("%s finished in %.4f s", label or func.__name__, elapsed)
            return result

        return wrapper  # type: ignore[return-value]

    return decorator
