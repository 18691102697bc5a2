"""
Aliased Wigner distribution deconvolution.

The double FFT of a spectrogram sample factors into products of signal and
mask lag-product spectra. Under the support conditions handled here each
entry of that double FFT holds a single product, so the signal factor is
recovered by componentwise division.

Band convention: ``bands[alpha][n] = z_n * conj(z_{n+alpha})`` where z is
x_hat (fourier target) or x (space target).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal, Union

import numpy as np
import numpy.typing as npt

from wdd_retrieval.dsp import BandedMatrix, lag_product
from wdd_retrieval.errors import NearZeroDenominatorError, PreconditionError
from wdd_retrieval.masks import Mask
from wdd_retrieval.measure import MeasurementSet, check_divides

logger = logging.getLogger(__name__)

EPS_WDD_REL = 1e-10

ComplexMatrix = npt.NDArray[np.complex128]
Target = Literal["fourier", "space"]


@dataclass
class BandSet:
    """Estimated diagonals ``1-kappa .. kappa-1`` of x_hat x_hat^* or x x^*."""

    target: Target
    kappa: int
    bands: ComplexMatrix = field(repr=False)
    spectra: ComplexMatrix = field(repr=False)
    min_denominator: float = float("nan")

    @property
    def d(self) -> int:
        return int(self.bands.shape[1])

    @property
    def offsets(self) -> range:
        return range(1 - self.kappa, self.kappa)

    def band(self, alpha: int) -> npt.NDArray[np.complex128]:
        return self.bands[alpha + self.kappa - 1]

    def to_banded(self) -> BandedMatrix:
        return BandedMatrix(self.bands.copy())


@dataclass
class CollapsedTable:
    """V[omega, alpha] ~ F_d(x_hat o S_alpha conj(x_hat))_omega.

    Rows run over omega = 1-delta .. delta-1, columns over alpha = 1-gamma .. gamma-1.
    """

    V: ComplexMatrix = field(repr=False)
    delta: int
    gamma: int
    min_denominator: float = float("nan")

    def __post_init__(self) -> None:
        if self.V.shape != (2 * self.delta - 1, 2 * self.gamma - 1):
            raise PreconditionError(
                f"table shape {self.V.shape} does not match delta={self.delta}, gamma={self.gamma}"
            )

    def entry(self, omega: int, alpha: int) -> complex:
        return complex(self.V[omega + self.delta - 1, alpha + self.gamma - 1])


# ------------------------------------------------------------------
# Double FFT and index maps
# ------------------------------------------------------------------


def double_fft(Y: Union[MeasurementSet, npt.ArrayLike]) -> ComplexMatrix:
    """``F_L Y^T F_K^T``: an L x K complex matrix."""
    arr = Y.Y if isinstance(Y, MeasurementSet) else np.asarray(Y, dtype=np.float64)
    return np.fft.fft2(arr.T)


def beta_index(alpha: int, L: int) -> int:
    """Row of the double FFT holding shift ``alpha``."""
    return (-alpha) % L


def nu_index(omega: int, K: int) -> int:
    """Column of the double FFT holding frequency ``omega``."""
    return omega % K


def _guard(denominators: np.ndarray, d: int, what: str) -> float:
    mags = np.abs(denominators)
    threshold = EPS_WDD_REL * d
    flat = int(np.argmin(mags))
    smallest = float(mags.flat[flat])
    if smallest < threshold:
        raise NearZeroDenominatorError(flat, smallest, threshold, what)
    logger.debug("%s: smallest denominator %.3e", what, smallest)
    return smallest


def _align_fourier_offset(Ytil: ComplexMatrix, offset: int, d: int) -> ComplexMatrix:
    # Y rows rolled by -offset multiply column omega by exp(2*pi*i*offset*omega/d).
    K = Ytil.shape[1]
    return Ytil * np.exp(2j * np.pi * offset * np.arange(K) / K)[None, :]


def _align_space_offset(Ytil: ComplexMatrix, offset: int, a: int) -> ComplexMatrix:
    if offset % a:
        raise PreconditionError(f"space offset {offset} is not a multiple of the shift step {a}")
    L = Ytil.shape[0]
    step = offset // a
    return Ytil * np.exp(-2j * np.pi * step * np.arange(L) / L)[:, None]


# ------------------------------------------------------------------
# Collapse: bandlimited mask, every frequency sampled
# ------------------------------------------------------------------


def collapse_bandlimited_mask(Ytil: ComplexMatrix, mask: Mask, kappa: int) -> BandSet:
    """Bands of x_hat x_hat^* from K = d, L = rho + kappa - 1 measurements."""
    if mask.domain != "fourier":
        raise PreconditionError("collapse_bandlimited_mask needs a fourier-supported mask")
    d, rho = mask.d, mask.support
    L, K = Ytil.shape
    if K != d:
        raise PreconditionError(f"every frequency must be sampled (K={K}, d={d})")
    check_divides("L", L, d)
    if not 2 <= kappa <= rho:
        raise PreconditionError(f"need 2 <= kappa <= rho, got kappa={kappa}, rho={rho}")
    if L != rho + kappa - 1:
        raise PreconditionError(f"need L = rho + kappa - 1 = {rho + kappa - 1}, got L={L}")

    Ytil = _align_fourier_offset(Ytil, mask.offset, d)
    m_hat = mask.at_origin().spectrum
    offsets = range(1 - kappa, kappa)
    numer = np.stack([Ytil[beta_index(alpha, L)] for alpha in offsets])
    denom = np.stack([np.fft.fft(lag_product(m_hat, -alpha)) for alpha in offsets])
    smallest = _guard(denom, d, "bandlimited-mask collapse")
    spectra = (d * d / L) * numer / denom
    bands = np.fft.ifft(spectra, axis=1)
    return BandSet("fourier", kappa, bands, spectra, smallest)


# ------------------------------------------------------------------
# Collapse: compact mask, every shift sampled
# ------------------------------------------------------------------


def collapse_compact_mask(Ytil: ComplexMatrix, mask: Mask, kappa: int) -> BandSet:
    """Bands of x x^* from L = d, K = delta + kappa - 1 measurements."""
    if mask.domain != "space":
        raise PreconditionError("collapse_compact_mask needs a space-supported mask")
    d, delta = mask.d, mask.support
    L, K = Ytil.shape
    if L != d:
        raise PreconditionError(f"every shift must be sampled (L={L}, d={d})")
    check_divides("K", K, d)
    if not 2 <= kappa <= delta:
        raise PreconditionError(f"need 2 <= kappa <= delta, got kappa={kappa}, delta={delta}")
    if K != delta + kappa - 1:
        raise PreconditionError(f"need K = delta + kappa - 1 = {delta + kappa - 1}, got K={K}")

    Ytil = _align_space_offset(Ytil, mask.offset, 1)
    m = mask.at_origin().values
    offsets = range(1 - kappa, kappa)
    reflect = (-np.arange(d)) % d
    numer = np.stack([Ytil[:, nu_index(s, K)] for s in offsets])
    denom = np.stack([K * np.fft.fft(lag_product(m, s))[reflect] for s in offsets])
    smallest = _guard(denom, d, "compact-mask collapse")
    spectra = numer / denom
    bands = np.fft.ifft(spectra, axis=1)
    return BandSet("space", kappa, bands, spectra, smallest)


# ------------------------------------------------------------------
# Collapse: compact mask, bandlimited signal
# ------------------------------------------------------------------


def collapse_bandlimited_signal(Ytil: ComplexMatrix, mask: Mask, gamma: int) -> CollapsedTable:
    """Table V from K = 2*delta - 1, L = 2*gamma - 1 measurements of a gamma-bandlimited x."""
    if mask.domain != "space":
        raise PreconditionError("collapse_bandlimited_signal needs a space-supported mask")
    d, delta = mask.d, mask.support
    L, K = Ytil.shape
    if not gamma <= 2 * delta - 1 < d:
        raise PreconditionError(
            f"need gamma <= 2*delta - 1 < d, got gamma={gamma}, delta={delta}, d={d}"
        )
    if K != 2 * delta - 1 or L != 2 * gamma - 1:
        raise PreconditionError(
            f"need K = {2 * delta - 1} and L = {2 * gamma - 1}, got K={K}, L={L}"
        )
    check_divides("K", K, d)
    check_divides("L", L, d)

    Ytil = _align_space_offset(Ytil, mask.offset, d // L)
    m_hat = mask.at_origin().spectrum
    omegas = np.arange(1 - delta, delta)
    alphas = range(1 - gamma, gamma)
    cols = omegas % K
    numer = np.stack([Ytil[beta_index(alpha, L), cols] for alpha in alphas], axis=1)
    denom = np.stack(
        [np.fft.fft(lag_product(m_hat, -alpha))[omegas % d] for alpha in alphas], axis=1
    )
    smallest = _guard(denom, d, "bandlimited-signal collapse")
    V = (float(d) ** 3 / (K * L)) * numer / denom
    return CollapsedTable(V, delta, gamma, smallest)
