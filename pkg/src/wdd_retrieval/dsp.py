"""
Discrete-signal primitives with cyclic index semantics.

Conventions used throughout the package:

* ``dft`` is the unnormalized forward transform, ``idft`` carries the 1/d factor.
* ``circular_shift(x, l)[j] == x[(j + l) % d]``.
* ``modulate(x, k)[j] == exp(2*pi*i*j*k/d) * x[j]``.
* ``reverse(x)[n] == x[-n % d]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
import numpy.typing as npt

from wdd_retrieval.errors import NearZeroDenominatorError, NonDivisorError, PreconditionError

ComplexVector = npt.NDArray[np.complex128]
ArrayLike = npt.ArrayLike

EPS_DIV_REL = 1e-12


def as_vector(x: ArrayLike) -> ComplexVector:
    """Coerce to a 1-D complex128 array of length >= 1."""
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim != 1 or arr.size == 0:
        raise PreconditionError(f"expected a non-empty 1-D vector, got shape {arr.shape}")
    return arr


def _same_length(x: ComplexVector, y: ComplexVector) -> None:
    if x.shape != y.shape:
        raise PreconditionError(f"length mismatch: {x.shape[0]} != {y.shape[0]}")


def at(x: ArrayLike, n: int) -> complex:
    """Entry ``x_n`` with n taken mod d."""
    v = as_vector(x)
    return complex(v[n % v.size])


# ------------------------------------------------------------------
# Transforms
# ------------------------------------------------------------------


def dft(x: ArrayLike) -> ComplexVector:
    return np.fft.fft(as_vector(x))


def idft(x: ArrayLike) -> ComplexVector:
    return np.fft.ifft(as_vector(x))


def dft_matrix(d: int) -> npt.NDArray[np.complex128]:
    """Dense F_d with entries exp(-2*pi*i*j*k/d); used by oracles and small solves."""
    j = np.arange(d)
    return np.exp(-2j * np.pi * np.outer(j, j) / d)


# ------------------------------------------------------------------
# Shifts, modulations, reversal
# ------------------------------------------------------------------


def circular_shift(x: ArrayLike, shift: int) -> ComplexVector:
    return np.roll(as_vector(x), -int(shift))


def modulate(x: ArrayLike, k: int) -> ComplexVector:
    v = as_vector(x)
    d = v.size
    return v * np.exp(2j * np.pi * np.arange(d) * (int(k) % d) / d)


def reverse(x: ArrayLike) -> ComplexVector:
    v = as_vector(x)
    return np.roll(v[::-1], 1)


def lag_product(x: ArrayLike, shift: int) -> ComplexVector:
    """``x o S_shift conj(x)``: the shift-th diagonal of x x^*."""
    v = as_vector(x)
    return v * np.conj(circular_shift(v, shift))


# ------------------------------------------------------------------
# Pointwise operations and convolution
# ------------------------------------------------------------------


def circular_convolve(
    x: ArrayLike, y: ArrayLike, method: Literal["fft", "direct"] = "fft"
) -> ComplexVector:
    """``(x * y)_l = sum_n x_n y_{l-n}``."""
    xv, yv = as_vector(x), as_vector(y)
    _same_length(xv, yv)
    if method == "fft":
        return np.fft.ifft(np.fft.fft(xv) * np.fft.fft(yv))
    if method != "direct":
        raise PreconditionError(f"unknown convolution method {method!r}")
    d = xv.size
    n = np.arange(d)
    idx = (n[:, None] - n[None, :]) % d
    return (yv[idx] * xv[None, :]).sum(axis=1)


def hadamard(x: ArrayLike, y: ArrayLike) -> ComplexVector:
    xv, yv = as_vector(x), as_vector(y)
    _same_length(xv, yv)
    return xv * yv


def quotient(
    x: ArrayLike, y: ArrayLike, threshold: float | None = None, what: str = ""
) -> ComplexVector:
    """Componentwise ``x / y``; every |y_n| must exceed ``threshold``.

    The default threshold is ``1e-12 * max|y|``.
    """
    xv, yv = as_vector(x), as_vector(y)
    _same_length(xv, yv)
    mags = np.abs(yv)
    if threshold is None:
        threshold = EPS_DIV_REL * float(mags.max())
    bad = np.flatnonzero(mags <= threshold)
    if bad.size:
        worst = int(bad[np.argmin(mags[bad])])
        raise NearZeroDenominatorError(worst, float(mags[worst]), float(threshold), what)
    return xv / yv


def abs_sq(x: ArrayLike) -> ComplexVector:
    v = as_vector(x)
    return (v.real**2 + v.imag**2).astype(np.complex128)


def subsample(x: ArrayLike, s: int) -> ComplexVector:
    """``(Z_s x)_n = x_{ns}``."""
    v = as_vector(x)
    if s < 1 or v.size % s:
        raise NonDivisorError("s", s, v.size)
    return v[::s].copy()


def sgn(z: npt.ArrayLike) -> npt.NDArray[np.complex128]:
    """Entrywise z/|z| with sgn(0) = 1."""
    arr = np.asarray(z, dtype=np.complex128)
    mags = np.abs(arr)
    out = np.ones_like(arr)
    nz = mags > 0
    out[nz] = arr[nz] / mags[nz]
    return out


def phase_distance(x: ArrayLike, y: ArrayLike) -> float:
    """``min_theta ||x - e^{i theta} y||_2`` in closed form."""
    xv, yv = as_vector(x), as_vector(y)
    _same_length(xv, yv)
    sq = np.vdot(xv, xv).real + np.vdot(yv, yv).real - 2.0 * abs(np.vdot(yv, xv))
    return float(np.sqrt(max(sq, 0.0)))


def align_phase(estimate: ArrayLike, reference: ArrayLike) -> ComplexVector:
    """Rotate ``estimate`` by the global phase that best matches ``reference``."""
    ev, rv = as_vector(estimate), as_vector(reference)
    _same_length(ev, rv)
    return ev * sgn(np.vdot(ev, rv))


# ------------------------------------------------------------------
# Banded matrices
# ------------------------------------------------------------------


@dataclass
class BandedMatrix:
    """A d x d matrix nonzero only on the 2*kappa-1 cyclic diagonals around the main one.

    ``bands[alpha + kappa - 1][j]`` is the entry at (j, (j + alpha) mod d).
    """

    bands: npt.NDArray[np.complex128]

    def __post_init__(self) -> None:
        self.bands = np.asarray(self.bands, dtype=np.complex128)
        if self.bands.ndim != 2 or self.bands.shape[0] % 2 == 0:
            raise PreconditionError(
                f"band storage must have an odd number of rows, got {self.bands.shape}"
            )
        if 2 * self.kappa - 1 > self.d:
            raise PreconditionError(f"halfwidth {self.kappa} too large for d={self.d}")

    @property
    def d(self) -> int:
        return int(self.bands.shape[1])

    @property
    def kappa(self) -> int:
        return (int(self.bands.shape[0]) + 1) // 2

    @property
    def offsets(self) -> range:
        return range(1 - self.kappa, self.kappa)

    def band(self, alpha: int) -> ComplexVector:
        return self.bands[alpha + self.kappa - 1]

    def diagonal(self) -> ComplexVector:
        return self.band(0).copy()

    def map_bands(self, func: Callable[[np.ndarray], np.ndarray]) -> BandedMatrix:
        """Apply an entrywise function to stored band entries only."""
        return BandedMatrix(func(self.bands))

    def __matmul__(self, v: ArrayLike) -> ComplexVector:
        vec = as_vector(v)
        out = np.zeros(self.d, dtype=np.complex128)
        for alpha in self.offsets:
            out += self.band(alpha) * np.roll(vec, -alpha)
        return out

    def row_abs_sum_max(self) -> float:
        return float(np.abs(self.bands).sum(axis=0).max())

    def to_dense(self) -> npt.NDArray[np.complex128]:
        d = self.d
        dense = np.zeros((d, d), dtype=np.complex128)
        rows = np.arange(d)
        for alpha in self.offsets:
            dense[rows, (rows + alpha) % d] = self.band(alpha)
        return dense


def banded_embed(columns: npt.ArrayLike) -> BandedMatrix:
    """Build C(M) from a d x (2*kappa-1) array whose column c holds diagonal c-kappa+1."""
    arr = np.asarray(columns, dtype=np.complex128)
    if arr.ndim != 2:
        raise PreconditionError(f"expected a d x (2*kappa-1) array, got shape {arr.shape}")
    return BandedMatrix(arr.T.copy())
