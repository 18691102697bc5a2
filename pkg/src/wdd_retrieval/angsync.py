"""
Angular synchronization on banded Hermitian matrices.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
import numpy.typing as npt

from wdd_retrieval.dsp import BandedMatrix, ComplexVector, as_vector, sgn
from wdd_retrieval.errors import NoConvergenceError, PreconditionError
from wdd_retrieval.wdd import BandSet

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12

Operator = Union[BandedMatrix, npt.NDArray[np.complex128]]


@dataclass
class EigenResult:
    value: float
    vector: ComplexVector = field(repr=False)
    iterations: int
    residual: float
    converged: bool


@dataclass
class SyncResult:
    magnitudes: npt.NDArray[np.float64] = field(repr=False)
    phases: ComplexVector = field(repr=False)
    eigenvalue: float
    eigen_iterations: int
    eigen_residual: float
    converged: bool = True

    @property
    def estimate(self) -> ComplexVector:
        return self.magnitudes * self.phases


def _square(M: np.ndarray) -> np.ndarray:
    arr = np.asarray(M, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise PreconditionError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def hermitianize(M: Operator) -> Operator:
    """``(M + M^*) / 2``; banded input stays banded."""
    if isinstance(M, BandedMatrix):
        out = np.empty_like(M.bands)
        for alpha in M.offsets:
            mirror = np.roll(M.band(-alpha), -alpha)
            out[alpha + M.kappa - 1] = 0.5 * (M.band(alpha) + np.conj(mirror))
        return BandedMatrix(out)
    arr = _square(M)
    return 0.5 * (arr + arr.conj().T)


def sign_normalize(M: Operator) -> Operator:
    """Entrywise sgn with sgn(0) = 1. For banded input only stored entries change."""
    if isinstance(M, BandedMatrix):
        return M.map_bands(sgn)
    return sgn(_square(M))


def magnitudes_from_diagonal(M: Operator) -> npt.NDArray[np.float64]:
    diag = M.diagonal() if isinstance(M, BandedMatrix) else np.diag(_square(M))
    return np.sqrt(np.maximum(diag.real, 0.0))


def _shift_constant(M: Operator) -> float:
    if isinstance(M, BandedMatrix):
        return M.row_abs_sum_max()
    return float(np.abs(M).sum(axis=1).max())


def _fix_gauge(v: ComplexVector) -> ComplexVector:
    idx = int(np.argmax(np.abs(v)))
    return v * np.conj(sgn(v[idx]))


def leading_eigenvector(
    M: Operator,
    tol: float = DEFAULT_TOL,
    max_iter: Optional[int] = None,
    v0: Optional[npt.ArrayLike] = None,
    strict: bool = False,
) -> EigenResult:
    """Top eigenpair of a Hermitian matrix by power iteration on ``M + cI``.

    ``c`` is the largest absolute row sum, which bounds the spectral radius, so
    the shifted spectrum is nonnegative and its top eigenvalue dominates.
    """
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    if isinstance(M, BandedMatrix):
        d, width = M.d, M.kappa
    else:
        M = _square(M)
        d = width = M.shape[0]
    if max_iter is None:
        max_iter = max(1000, 10 * d * width)

    v = np.ones(d, dtype=np.complex128) if v0 is None else as_vector(v0).copy()
    norm = np.linalg.norm(v)
    v = v / norm if norm > 0 else np.ones(d, dtype=np.complex128) / np.sqrt(d)
    c = _shift_constant(M)

    best_v, best_value, best_res = v, 0.0, np.inf
    for iteration in range(max_iter + 1):
        Mv = M @ v
        value = float(np.vdot(v, Mv).real)
        residual = float(np.linalg.norm(Mv - value * v))
        if residual < best_res:
            best_v, best_value, best_res = v, value, residual
        if residual <= tol * abs(value) or residual == 0.0:
            return EigenResult(value, _fix_gauge(v), iteration, residual, True)
        if iteration == max_iter:
            break
        w = Mv + c * v
        v = w / np.linalg.norm(w)

    if strict:
        raise NoConvergenceError(max_iter, best_res)
    logger.warning(
        "power iteration stopped after %d iterations (residual %.3e)", max_iter, best_res
    )
    return EigenResult(best_value, _fix_gauge(best_v), max_iter, best_res, False)


def _propagated_phases(T: BandedMatrix) -> ComplexVector:
    # s_{j+1} = s_j * conj(T[j, j+1]) follows the relative phases along the first off-diagonal.
    if T.kappa < 2:
        return np.ones(T.d, dtype=np.complex128)
    steps = np.conj(T.band(1)[:-1])
    return np.concatenate(([1.0 + 0j], np.cumprod(steps)))


def synchronize(
    bands: BandSet, tol: float = DEFAULT_TOL, max_iter: Optional[int] = None
) -> SyncResult:
    """Magnitudes from the diagonal, phases from the top eigenvector of sgn(H(C))."""
    if 2 * bands.kappa - 1 > bands.d:
        raise PreconditionError(f"halfwidth {bands.kappa} too large for d={bands.d}")
    herm = hermitianize(bands.to_banded())
    assert isinstance(herm, BandedMatrix)
    mags = magnitudes_from_diagonal(herm)
    normalized = sign_normalize(herm)
    assert isinstance(normalized, BandedMatrix)
    eig = leading_eigenvector(
        normalized, tol=tol, max_iter=max_iter, v0=_propagated_phases(normalized)
    )
    logger.debug(
        "synchronize: lambda=%.6g iterations=%d residual=%.3e",
        eig.value,
        eig.iterations,
        eig.residual,
    )
    return SyncResult(
        magnitudes=mags,
        phases=sgn(eig.vector),
        eigenvalue=eig.value,
        eigen_iterations=eig.iterations,
        eigen_residual=eig.residual,
        converged=eig.converged,
    )
