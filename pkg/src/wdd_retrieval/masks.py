"""
Mask families and the mask constants that floor the WDD divisors.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Literal, Optional

import numpy as np
import numpy.typing as npt

from wdd_retrieval.dsp import ComplexVector, as_vector, dft, idft, lag_product, modulate
from wdd_retrieval.errors import PreconditionError

MaskKind = Literal[
    "exp_bandlimited", "random_bandlimited", "exp_compact", "random_compact", "user"
]
Domain = Literal["space", "fourier"]

SUPPORT_TOL = 1e-12

# Random masks draw from their own stream, independent of noise with the same seed.
MASK_STREAM = 1


@dataclass(frozen=True, eq=False)
class Mask:
    """A window ``m`` with its declared support.

    ``values`` is always the space-domain vector. ``domain`` says where the
    support of length ``support`` lives; it starts at index ``offset``.
    """

    values: ComplexVector = field(repr=False)
    kind: MaskKind
    domain: Domain
    support: int
    offset: int = 0
    seed: Optional[int] = None

    @property
    def d(self) -> int:
        return int(self.values.size)

    @property
    def spectrum(self) -> ComplexVector:
        return dft(self.values)

    def support_indices(self) -> npt.NDArray[np.int64]:
        return (self.offset + np.arange(self.support)) % self.d

    def support_values(self) -> ComplexVector:
        """Entries inside the declared support, in the declared domain."""
        source = self.spectrum if self.domain == "fourier" else self.values
        return source[self.support_indices()]

    def at_origin(self) -> Mask:
        """The same window with its support moved to start at index 0."""
        if self.offset % self.d == 0:
            return self
        if self.domain == "fourier":
            values = modulate(self.values, -self.offset)
        else:
            values = np.roll(self.values, -self.offset)
        return replace(self, values=values, offset=0)

    def validate(self) -> None:
        """Check that the vector vanishes outside its declared support."""
        if not 1 <= self.support <= self.d:
            raise PreconditionError(f"support {self.support} outside [1, {self.d}]")
        source = self.spectrum if self.domain == "fourier" else self.values
        scale = float(np.abs(source).max()) or 1.0
        outside = np.ones(self.d, dtype=bool)
        outside[self.support_indices()] = False
        leak = float(np.abs(source[outside]).max()) if outside.any() else 0.0
        if leak > SUPPORT_TOL * scale:
            raise PreconditionError(
                f"{self.domain} mask has energy {leak:.3e} outside its declared support"
            )


def _decay(length: int) -> float:
    return max(4.0, (length - 1) / 2.0)


def _check_fourier_support(d: int, rho: int) -> None:
    if not (2 <= rho and 2 * rho < d):
        raise PreconditionError(f"need 2 <= rho < d/2, got rho={rho}, d={d}")


def _check_space_support(d: int, delta: int) -> None:
    if not 2 <= delta < d:
        raise PreconditionError(f"need 2 <= delta < d, got delta={delta}, d={d}")


def _uniform_pair(seed: int, size: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, MASK_STREAM])))
    return rng.uniform(size=size), rng.uniform(size=size)


# ------------------------------------------------------------------
# Constructors
# ------------------------------------------------------------------


def exp_bandlimited_mask(d: int, rho: int) -> Mask:
    _check_fourier_support(d, rho)
    spectrum = np.zeros(d, dtype=np.complex128)
    k = np.arange(rho)
    spectrum[:rho] = np.exp(-k / _decay(rho)) / (2 * rho - 1) ** 0.25
    return Mask(idft(spectrum), "exp_bandlimited", "fourier", rho)


def random_bandlimited_mask(d: int, rho: int, seed: int) -> Mask:
    _check_fourier_support(d, rho)
    mag, phase = _uniform_pair(seed, rho)
    spectrum = np.zeros(d, dtype=np.complex128)
    spectrum[:rho] = (1.0 + 0.5 * mag) * np.exp(2j * np.pi * phase)
    return Mask(idft(spectrum), "random_bandlimited", "fourier", rho, seed=seed)


def exp_compact_mask(d: int, delta: int) -> Mask:
    _check_space_support(d, delta)
    values = np.zeros(d, dtype=np.complex128)
    k = np.arange(delta)
    values[:delta] = np.exp(-k / _decay(delta)) / (2 * delta - 1) ** 0.25
    return Mask(values, "exp_compact", "space", delta)


def random_compact_mask(d: int, delta: int, seed: int) -> Mask:
    _check_space_support(d, delta)
    mag, phase = _uniform_pair(seed, delta)
    values = np.zeros(d, dtype=np.complex128)
    values[:delta] = (1.0 + 0.5 * mag) * np.exp(2j * np.pi * phase)
    return Mask(values, "random_compact", "space", delta, seed=seed)


def user_mask(values: npt.ArrayLike, domain: Domain, support: int, offset: int = 0) -> Mask:
    mask = Mask(as_vector(values).copy(), "user", domain, support, offset)
    mask.validate()
    return mask


MASK_BUILDERS = {
    "exp_bandlimited": lambda d, length, seed: exp_bandlimited_mask(d, length),
    "random_bandlimited": lambda d, length, seed: random_bandlimited_mask(d, length, seed),
    "exp_compact": lambda d, length, seed: exp_compact_mask(d, length),
    "random_compact": lambda d, length, seed: random_compact_mask(d, length, seed),
}


def build_mask(kind: str, d: int, length: int, seed: int = 0) -> Mask:
    try:
        builder = MASK_BUILDERS[kind]
    except KeyError:
        raise PreconditionError(
            f"unknown mask kind {kind!r}; choose from {sorted(MASK_BUILDERS)}"
        ) from None
    return builder(d, length, seed)


# ------------------------------------------------------------------
# Mask constants
# ------------------------------------------------------------------


def _lag_spectra(vec: ComplexVector, shifts: range) -> np.ndarray:
    """Row p holds |F_d(vec o S_p conj(vec))| for p in ``shifts``."""
    return np.abs(np.fft.fft(np.stack([lag_product(vec, p) for p in shifts]), axis=1))


def _require_domain(mask: Mask, domain: Domain) -> None:
    if mask.domain != domain:
        raise PreconditionError(f"expected a {domain}-supported mask, got {mask.domain}")


def mu1(mask: Mask, kappa: int) -> float:
    """min over |p| <= kappa-1 and all q of |F_d(m_hat o S_p conj(m_hat))_q|."""
    _require_domain(mask, "fourier")
    rho = mask.support
    if rho < 2 or not 2 <= kappa <= rho:
        raise PreconditionError(f"mu1 needs 2 <= kappa <= rho, got kappa={kappa}, rho={rho}")
    spectra = _lag_spectra(mask.at_origin().spectrum, range(1 - kappa, kappa))
    return float(spectra.min())


def mu2(mask: Mask, gamma: Optional[int] = None) -> float:
    """min over |p| <= gamma-1 and |q| <= delta-1 of |F_d(m_hat o S_p conj(m_hat))_q|.

    ``gamma=None`` lets p range over all of [d].
    """
    _require_domain(mask, "space")
    d, delta = mask.d, mask.support
    if gamma is None:
        shifts = range(d)
    else:
        if not 1 <= gamma <= 2 * delta - 1:
            raise PreconditionError(f"mu2 needs 1 <= gamma <= 2*delta-1, got gamma={gamma}")
        shifts = range(1 - gamma, gamma)
    spectra = _lag_spectra(mask.at_origin().spectrum, shifts)
    q = np.arange(1 - delta, delta) % d
    return float(spectra[:, q].min())


def mu_compact(mask: Mask, kappa: Optional[int] = None) -> float:
    """min over |s| <= kappa-1 and all p of |F_d(m o S_s conj(m))_p|.

    This is the divisor floor for space-supported masks sampled at every shift;
    it equals ``mu2(mask) / d``.
    """
    _require_domain(mask, "space")
    delta = mask.support
    kappa = delta if kappa is None else kappa
    if not 1 <= kappa <= delta:
        raise PreconditionError(f"need 1 <= kappa <= delta, got kappa={kappa}, delta={delta}")
    spectra = _lag_spectra(mask.at_origin().values, range(1 - kappa, kappa))
    return float(spectra.min())


@dataclass
class AdmissibilityReport:
    admissible: bool
    failed: list[str]
    magnitudes: list[float]

    def summary(self) -> str:
        return "admissible" if self.admissible else "; ".join(self.failed)


def check_admissible(mask: Mask) -> AdmissibilityReport:
    """Test the sufficient conditions under which the mask constant is positive.

    Failing them does not imply the constant vanishes.
    """
    mags = np.abs(mask.support_values())
    n = mags.size
    slack = SUPPORT_TOL * (mags.max() if n else 0.0)
    failed: list[str] = []
    if n >= 2 and not mags[0] > (n - 1) * mags[1] + slack:
        failed.append(f"|a0|={mags[0]:.4g} <= (len-1)|a1|={(n - 1) * mags[1]:.4g}")
    if n >= 3 and np.any(np.diff(mags[1:]) > slack):
        failed.append("|a1| >= ... >= |a_{len-1}| violated")
    if np.any(mags <= slack):
        failed.append("zero magnitude inside support")
    return AdmissibilityReport(not failed, failed, [float(v) for v in mags])

