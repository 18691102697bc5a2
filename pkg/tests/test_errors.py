"""Tests for wdd_retrieval.errors."""

import pytest

from wdd_retrieval.errors import (
    NearZeroDenominatorError,
    NoConvergenceError,
    NonDivisorError,
    PreconditionError,
    StageError,
    WDDError,
)


@pytest.mark.parametrize(
    "exc,builtin",
    [
        (PreconditionError("x"), ValueError),
        (NonDivisorError("L", 7, 60), ValueError),
        (NearZeroDenominatorError(3, 1e-20, 1e-15), ZeroDivisionError),
        (NoConvergenceError(10, 0.5), RuntimeError),
        (StageError("wdd", PreconditionError("x")), WDDError),
    ],
)
def test_hierarchy(exc, builtin):
    assert isinstance(exc, WDDError)
    assert isinstance(exc, builtin)


def test_non_divisor_message():
    exc = NonDivisorError("L", 7, 60)
    assert str(exc) == "L must divide d (L=7, d=60)"
    assert (exc.name, exc.value, exc.d) == ("L", 7, 60)


def test_near_zero_message():
    exc = NearZeroDenominatorError(4, 1e-20, 1e-15, what="lag spectrum")
    assert str(exc).startswith("lag spectrum: denominator at index 4")
    assert exc.index == 4


def test_no_convergence_message():
    assert "after 12 iterations" in str(NoConvergenceError(12, 1e-3))


def test_stage_error_message():
    cause = PreconditionError("need K = d")
    exc = StageError("setup", cause, "alg1")
    assert str(exc) == "[alg1/setup] need K = d"
    assert exc.cause is cause
    assert str(StageError("wdd", cause)) == "[wdd] need K = d"
