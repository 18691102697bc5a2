"""
Forward model: subsampled spectrogram measurements and additive noise.

``Y[k, l] = |sum_n x_n m_{n - l*a} exp(-2*pi*i*n*k*(d/K)/d)|^2`` with ``a = d/L``,
i.e. row k of the K x L matrix is frequency ``k*d/K`` and column l is shift ``l*a``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
import numpy.typing as npt

from wdd_retrieval.dsp import ArrayLike, ComplexVector, abs_sq, as_vector, modulate
from wdd_retrieval.errors import NonDivisorError, PreconditionError
from wdd_retrieval.masks import Mask

logger = logging.getLogger(__name__)

GENERATOR_NAME = "Philox"

RealMatrix = npt.NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class NoiseRecord:
    sigma2: float
    seed: int
    snr_db: float
    generator: str = GENERATOR_NAME
    matrix: Optional[RealMatrix] = field(default=None, repr=False)


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    """A K x L spectrogram sample with its grid metadata."""

    Y: RealMatrix = field(repr=False)
    d: int
    K: int
    L: int
    mask: Optional[Mask] = field(default=None, repr=False)
    noise: Optional[NoiseRecord] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "Y", np.asarray(self.Y, dtype=np.float64))
        check_divides("K", self.K, self.d)
        check_divides("L", self.L, self.d)
        if self.Y.shape != (self.K, self.L):
            raise PreconditionError(f"Y has shape {self.Y.shape}, expected ({self.K}, {self.L})")

    @property
    def a(self) -> int:
        return self.d // self.L

    @property
    def snr_db(self) -> float:
        return self.noise.snr_db if self.noise else math.inf

    @property
    def seed(self) -> Optional[int]:
        return self.noise.seed if self.noise else None

    def clean(self) -> RealMatrix:
        """Y with the recorded noise removed (Y itself when noiseless)."""
        if self.noise is None or self.noise.matrix is None:
            return self.Y
        return self.Y - self.noise.matrix


def check_divides(name: str, value: int, d: int) -> None:
    if value < 1 or d % value:
        raise NonDivisorError(name, value, d)


# ------------------------------------------------------------------
# Measurement operator
# ------------------------------------------------------------------


def shifted_windows(m: ArrayLike, L: int) -> npt.NDArray[np.complex128]:
    """Row l holds the window ``S_{-l*a} m`` (entries ``m_{n - l*a}``)."""
    mv = as_vector(m)
    d = mv.size
    check_divides("L", L, d)
    a = d // L
    n = np.arange(d)
    return mv[(n[None, :] - a * np.arange(L)[:, None]) % d]


def stft_coefficients(x: ArrayLike, m: ArrayLike, K: int, L: int) -> npt.NDArray[np.complex128]:
    """Complex K x L STFT samples whose squared magnitudes are the measurements.

    Rows are computed by folding each windowed signal to length K and taking a
    length-K FFT, which samples the length-d spectrum at multiples of d/K.
    """
    xv, mv = as_vector(x), as_vector(m)
    if xv.size != mv.size:
        raise PreconditionError(f"length mismatch: {xv.size} != {mv.size}")
    d = xv.size
    check_divides("K", K, d)
    windowed = xv[None, :] * shifted_windows(mv, L)
    folded = windowed.reshape(L, d // K, K).sum(axis=1)
    return np.fft.fft(folded, axis=1).T


def _mask_vector(m: Mask | ArrayLike) -> tuple[ComplexVector, Optional[Mask]]:
    if isinstance(m, Mask):
        return m.values, m
    return as_vector(m), None


def spectrogram_subsampled(x: ArrayLike, m: Mask | ArrayLike, K: int, L: int) -> MeasurementSet:
    values, mask = _mask_vector(m)
    coeffs = stft_coefficients(x, values, K, L)
    Y = coeffs.real**2 + coeffs.imag**2
    return MeasurementSet(Y, values.size, K, L, mask=mask)


def spectrogram_full(x: ArrayLike, m: Mask | ArrayLike) -> MeasurementSet:
    d = as_vector(x).size
    return spectrogram_subsampled(x, m, d, d)


def gabor_masks(m: ArrayLike, K: int) -> list[ComplexVector]:
    """Masks ``W_{k d/K} conj(m)`` whose general measurements equal the STFT samples."""
    mv = as_vector(m)
    check_divides("K", K, mv.size)
    step = mv.size // K
    return [modulate(np.conj(mv), k * step) for k in range(K)]


def spectrogram_general(x: ArrayLike, masks: Sequence[ArrayLike], L: int) -> MeasurementSet:
    """``Y'[k, l] = |sum_n x_n conj(m_k[n - l*a])|^2`` for an arbitrary mask family."""
    xv = as_vector(x)
    d = xv.size
    if not masks:
        raise PreconditionError("at least one mask is required")
    vectors = [as_vector(mk) for mk in masks]
    if any(v.size != d for v in vectors):
        raise PreconditionError("every mask must have the signal length")
    check_divides("K", len(vectors), d)
    check_divides("L", L, d)
    Y = np.empty((len(vectors), L))
    for k, mk in enumerate(vectors):
        windows = shifted_windows(mk, L)
        inner = np.conj(windows) @ xv
        Y[k] = abs_sq(inner).real
    return MeasurementSet(Y, d, len(vectors), L)


# ------------------------------------------------------------------
# Noise
# ------------------------------------------------------------------


def add_noise(meas: MeasurementSet, snr_db: float, seed: int) -> MeasurementSet:
    """Add i.i.d. real Gaussian noise at the requested SNR over the K*L entries."""
    if meas.noise is not None:
        raise PreconditionError("measurements already carry noise")
    if math.isinf(snr_db) and snr_db > 0:
        return meas
    energy = float(np.sum(meas.Y**2))
    sigma2 = energy / (meas.Y.size * 10.0 ** (snr_db / 10.0))
    rng = np.random.Generator(np.random.Philox(seed))
    noise = math.sqrt(sigma2) * rng.standard_normal(meas.Y.shape)
    logger.debug("noise: snr=%.2f dB sigma2=%.3e seed=%d", snr_db, sigma2, seed)
    record = NoiseRecord(sigma2=sigma2, seed=seed, snr_db=snr_db, matrix=noise)
    return replace(meas, Y=meas.Y + noise, noise=record)
