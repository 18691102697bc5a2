"""
Self-check suites: the transform identities, the aliased double-FFT expansion,
the noiseless collapse equalities and mask-constant positivity, evaluated on
random inputs against direct sums.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import numpy.typing as npt

from wdd_retrieval.dsp import (
    ArrayLike,
    circular_convolve,
    circular_shift,
    dft,
    idft,
    lag_product,
    modulate,
    reverse,
    subsample,
)
from wdd_retrieval.errors import PreconditionError
from wdd_retrieval.masks import (
    check_admissible,
    exp_bandlimited_mask,
    exp_compact_mask,
    mu1,
    mu2,
    user_mask,
)
from wdd_retrieval.measure import spectrogram_subsampled
from wdd_retrieval.wdd import (
    collapse_bandlimited_mask,
    collapse_bandlimited_signal,
    collapse_compact_mask,
    double_fft,
)

logger = logging.getLogger(__name__)

TOL = 1e-9
IDENTITY_DIMS = (12, 24)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    max_error: float
    cases: int
    failures: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return asdict(self)


class _Suite:
    """Accumulates comparisons for one named suite."""

    def __init__(self, name: str) -> None:
        self.name = name
        self.cases = 0
        self.max_error = 0.0
        self.failures: list[str] = []

    def compare(self, label: str, actual: ArrayLike, expected: ArrayLike) -> None:
        a = np.asarray(actual, dtype=np.complex128)
        b = np.asarray(expected, dtype=np.complex128)
        scale = max(float(np.abs(b).max(initial=0.0)), float(np.abs(a).max(initial=0.0)), 1e-300)
        err = float(np.abs(a - b).max(initial=0.0)) / scale
        self.cases += 1
        self.max_error = max(self.max_error, err)
        if not err <= TOL:
            self.failures.append(f"{label}: relative error {err:.3e}")

    def positive(self, label: str, value: float) -> None:
        self.cases += 1
        if not value > 0:
            self.failures.append(f"{label}: expected a positive value, got {value:.3e}")

    def holds(self, label: str, condition: bool) -> None:
        self.cases += 1
        if not condition:
            self.failures.append(label)

    def result(self) -> SuiteResult:
        return SuiteResult(self.name, not self.failures, self.max_error, self.cases, self.failures)


def _randn(rng: np.random.Generator, d: int) -> npt.NDArray[np.complex128]:
    return rng.standard_normal(d) + 1j * rng.standard_normal(d)


def _divisors(d: int) -> list[int]:
    return [s for s in range(1, d + 1) if d % s == 0]


# ------------------------------------------------------------------
# Transform identities
# ------------------------------------------------------------------


def _transforms(suite: _Suite, rng: np.random.Generator, sign: float) -> None:
    for d in (1, 2, 5) + IDENTITY_DIMS:
        x = _randn(rng, d)
        xt, xh = reverse(x), dft(x)
        suite.compare(f"F(x_hat) = d x~ (d={d})", dft(xh), d * xt)
        for l in range(d):
            tag = f"(d={d}, l={l})"
            suite.compare(
                f"F(W_l x) = S_-l x_hat {tag}", dft(modulate(x, l)), circular_shift(xh, -l)
            )
            suite.compare(f"F(S_l x) = W_l x_hat {tag}", dft(circular_shift(x, l)), modulate(xh, l))
            suite.compare(
                f"W_-l F(S_l conj x~) = conj x_hat {tag}",
                modulate(dft(circular_shift(np.conj(xt), l)), -l),
                np.conj(xh),
            )
            suite.compare(
                f"conj R(S_l x) = S_-l conj x~ {tag}",
                np.conj(reverse(circular_shift(x, l))),
                circular_shift(np.conj(xt), -l),
            )
        suite.compare(f"F(conj x) = conj F(x~) (d={d})", dft(np.conj(x)), np.conj(dft(xt)))
        suite.compare(f"R(x_hat) = F(x~) (d={d})", reverse(xh), dft(xt))
        suite.compare(
            f"|F x|^2 = F(x * conj x~) (d={d})",
            np.abs(xh) ** 2,
            dft(circular_convolve(x, np.conj(xt), method="direct")),
        )


def _convolution(suite: _Suite, rng: np.random.Generator, sign: float) -> None:
    for d in IDENTITY_DIMS:
        x, y = _randn(rng, d), _randn(rng, d)
        suite.compare(
            f"F(x * y) = F x o F y (d={d})",
            dft(circular_convolve(x, y, method="direct")),
            dft(x) * dft(y),
        )
        suite.compare(
            f"F(x o y) = F x * F y / d (d={d})",
            dft(x * y),
            circular_convolve(dft(x), dft(y), method="direct") / d,
        )


def _lag_spectrum(suite: _Suite, rng: np.random.Generator, sign: float) -> None:
    for d in (5,) + IDENTITY_DIMS:
        x = _randn(rng, d)
        xh = dft(x)
        n = np.arange(d)
        lhs = np.stack([dft(lag_product(x, w)) for w in n])  # [omega, alpha]
        spectra = np.stack([dft(lag_product(xh, -a)) for a in n]).T  # [omega, alpha]
        phase = np.exp(sign * 2j * np.pi * np.outer(n, n) / d)
        suite.compare(f"lag spectrum of x vs x_hat (d={d})", lhs, phase * spectra / d)


def _reversal(suite: _Suite, rng: np.random.Generator, sign: float) -> None:
    for d in IDENTITY_DIMS:
        x = _randn(rng, d)
        xt = reverse(x)
        for alpha in range(d):
            suite.compare(
                f"F(x~ o S_-a conj x~) = R F(x o S_a conj x) (d={d}, a={alpha})",
                dft(lag_product(xt, -alpha)),
                reverse(dft(lag_product(x, alpha))),
            )


def _swap(suite: _Suite, rng: np.random.Generator, sign: float) -> None:
    for d in IDENTITY_DIMS:
        x, y = _randn(rng, d), _randn(rng, d)
        xt, yt = reverse(x), reverse(y)
        lhs = np.stack(
            [
                circular_convolve(
                    x * circular_shift(y, -l), np.conj(xt) * circular_shift(np.conj(yt), l)
                )
                for l in range(d)
            ]
        )  # [l, k]
        rhs = np.stack(
            [circular_convolve(lag_product(x, -k), lag_product(yt, k)) for k in range(d)]
        ).T  # [l, k]
        suite.compare(f"shift/lag swap (d={d})", lhs, rhs)


def _aliasing(suite: _Suite, rng: np.random.Generator, sign: float) -> None:
    for d in (8, 16) + IDENTITY_DIMS:
        x = _randn(rng, d)
        xh = dft(x)
        for s in _divisors(d):
            n = d // s
            omega = np.arange(n)[:, None]
            r = np.arange(s)[None, :]
            folded = xh[(omega - r * n) % d].sum(axis=1) / s
            aliased = np.fft.fft(subsample(x, s))
            suite.compare(f"subsampling aliasing (d={d}, s={s})", aliased, folded)


# ------------------------------------------------------------------
# Double FFT of the spectrogram
# ------------------------------------------------------------------


def _lag_table(v: npt.NDArray[np.complex128]) -> npt.NDArray[np.complex128]:
    """Row s holds F_d(v o S_s conj(v))."""
    return np.stack([dft(lag_product(v, s)) for s in range(v.size)])


def _subsampled_columns(suite: _Suite, rng: np.random.Generator, sign: float) -> None:
    d = 24
    x, m = _randn(rng, d), _randn(rng, d)
    mt = reverse(m)
    conv = np.stack(
        [circular_convolve(lag_product(x, s), lag_product(mt, -s)) for s in range(d)]
    )  # [s, l]
    columns = np.stack([np.abs(dft(x * circular_shift(m, -l))) ** 2 for l in range(d)])
    for K in _divisors(d):
        lhs = np.fft.fft(columns[:, :: d // K], axis=1)  # [l, omega]
        omega = np.arange(K)[:, None]
        r = np.arange(d // K)[None, :]
        rhs = K * conv[(omega - r * K) % d].sum(axis=1).T  # [l, omega]
        suite.compare(f"subsampled spectrogram columns (K={K})", lhs, rhs)


def _full_sampling(suite: _Suite, rng: np.random.Generator, sign: float) -> None:
    for d in IDENTITY_DIMS:
        x, m = _randn(rng, d), _randn(rng, d)
        Ytil = double_fft(spectrogram_subsampled(x, m, d, d))
        expected = np.stack(
            [d * dft(lag_product(x, w)) * reverse(dft(lag_product(m, w))) for w in range(d)],
            axis=1,
        )
        suite.compare(f"full sampling column factorization (d={d})", Ytil, expected)


def _double_fft_forms(suite: _Suite, rng: np.random.Generator, sign: float) -> None:
    for d in IDENTITY_DIMS:
        x, m = _randn(rng, d), _randn(rng, d)
        FX, FM = _lag_table(x), _lag_table(m)
        FXh, FMh = _lag_table(dft(x)), _lag_table(dft(m))
        for K in _divisors(d):
            for L in _divisors(d):
                Ytil = double_fft(spectrogram_subsampled(x, m, K, L))
                a = np.arange(L)[:, None, None, None]
                w = np.arange(K)[None, :, None, None]
                r = np.arange(d // K)[None, None, :, None]
                l = np.arange(d // L)[None, None, None, :]
                p = (l * L - a) % d
                s = (w - r * K) % d
                neg = (-p) % d
                twist = np.exp(-2j * np.pi * p * s / d)
                forms = {
                    "fourier-fourier": K * L / d**3 * FXh[p, s] * FMh[neg, s],
                    "fourier-space": K * L / d**2 * twist * FXh[p, s] * FM[s, p],
                    "space-fourier": K * L / d**2 * np.conj(twist) * FX[s, neg] * FMh[neg, s],
                    "space-space": K * L / d * FX[s, neg] * FM[s, p],
                }
                for name, terms in forms.items():
                    suite.compare(
                        f"{name} expansion (d={d}, K={K}, L={L})", terms.sum(axis=(2, 3)), Ytil
                    )


# ------------------------------------------------------------------
# Collapse equalities (noiseless)
# ------------------------------------------------------------------


def _collapse(suite: _Suite, rng: np.random.Generator, sign: float) -> None:
    # Bandlimited mask, K = d, L = rho + kappa - 1.
    d, rho, kappa = 24, 4, 3
    x = _randn(rng, d)
    xh = dft(x)
    base = exp_bandlimited_mask(d, rho)
    shifted = user_mask(modulate(base.values, 5), "fourier", rho, offset=5)
    for mask in (base, shifted):
        meas = spectrogram_subsampled(x, mask, d, rho + kappa - 1)
        bands = collapse_bandlimited_mask(double_fft(meas), mask, kappa)
        for alpha in bands.offsets:
            suite.compare(
                f"bandlimited-mask band {alpha} (offset={mask.offset})",
                bands.band(alpha),
                lag_product(xh, alpha),
            )

    # Compact mask, L = d, K = delta + kappa - 1.
    d, delta, kappa = 24, 4, 3
    x = _randn(rng, d)
    base = exp_compact_mask(d, delta)
    shifted = user_mask(np.roll(base.values, 3), "space", delta, offset=3)
    for mask in (base, shifted):
        meas = spectrogram_subsampled(x, mask, delta + kappa - 1, d)
        bands = collapse_compact_mask(double_fft(meas), mask, kappa)
        for alpha in bands.offsets:
            suite.compare(
                f"compact-mask band {alpha} (offset={mask.offset})",
                bands.band(alpha),
                lag_product(x, alpha),
            )

    # Compact mask, bandlimited signal, K = 2*delta - 1, L = 2*gamma - 1.
    d, delta, gamma = 105, 4, 3
    spectrum = np.zeros(d, dtype=np.complex128)
    spectrum[:gamma] = _randn(rng, gamma)
    x = idft(spectrum)
    base = exp_compact_mask(d, delta)
    a = d // (2 * gamma - 1)
    shifted = user_mask(np.roll(base.values, a), "space", delta, offset=a)
    omegas = np.arange(1 - delta, delta)
    expected = np.stack(
        [dft(lag_product(spectrum, alpha))[omegas % d] for alpha in range(1 - gamma, gamma)],
        axis=1,
    )
    for mask in (base, shifted):
        meas = spectrogram_subsampled(x, mask, 2 * delta - 1, 2 * gamma - 1)
        table = collapse_bandlimited_signal(double_fft(meas), mask, gamma)
        suite.compare(f"bandlimited-signal table (offset={mask.offset})", table.V, expected)


# ------------------------------------------------------------------
# Mask constants
# ------------------------------------------------------------------


def _dominant_magnitudes(n: int) -> npt.NDArray[np.float64]:
    mags = np.ones(n)
    mags[0] = float(n)
    return mags


def _fourier_positivity(suite: _Suite, rng: np.random.Generator, sign: float) -> None:
    for d, rho in ((24, 4), (60, 8), (64, 10)):
        spectrum = np.zeros(d, dtype=np.complex128)
        spectrum[:rho] = _dominant_magnitudes(rho) * np.exp(2j * np.pi * rng.uniform(size=rho))
        mask = user_mask(idft(spectrum), "fourier", rho)
        ok = check_admissible(mask).admissible
        suite.holds(f"dominant fourier mask admissible (d={d}, rho={rho})", ok)
        for kappa in range(2, rho + 1):
            suite.positive(f"mu1 (d={d}, rho={rho}, kappa={kappa})", mu1(mask, kappa))


def _space_positivity(suite: _Suite, rng: np.random.Generator, sign: float) -> None:
    for d, delta in ((24, 4), (60, 8), (247, 10)):
        values = np.zeros(d, dtype=np.complex128)
        values[:delta] = _dominant_magnitudes(delta) * np.exp(2j * np.pi * rng.uniform(size=delta))
        mask = user_mask(values, "space", delta)
        ok = check_admissible(mask).admissible
        suite.holds(f"dominant space mask admissible (d={d}, delta={delta})", ok)
        for gamma in range(1, 2 * delta):
            suite.positive(f"mu2 (d={d}, delta={delta}, gamma={gamma})", mu2(mask, gamma))


SuiteFn = Callable[[_Suite, np.random.Generator, float], None]

SUITES: dict[str, SuiteFn] = {
    "transforms": _transforms,
    "convolution": _convolution,
    "lag_spectrum": _lag_spectrum,
    "reversal": _reversal,
    "swap": _swap,
    "aliasing": _aliasing,
    "subsampled_columns": _subsampled_columns,
    "full_sampling": _full_sampling,
    "double_fft": _double_fft_forms,
    "collapse": _collapse,
    "fourier_positivity": _fourier_positivity,
    "space_positivity": _space_positivity,
}

# Suites whose checks read the flipped sign.
INJECTABLE = ("lag_spectrum",)


def run_selfcheck(
    seed: int = 0, suites: Optional[Sequence[str]] = None, inject: Optional[str] = None
) -> list[SuiteResult]:
    """Run the named suites (all by default).

    ``inject`` names a suite from ``INJECTABLE`` whose phase-sign convention is
    flipped. Used to prove failures are caught.
    """
    names = list(suites) if suites else list(SUITES)
    unknown = sorted(set(names) - set(SUITES))
    if unknown:
        raise PreconditionError(f"unknown suite(s) {unknown}; choose from {sorted(SUITES)}")
    if inject is not None and inject not in INJECTABLE:
        raise PreconditionError(f"cannot inject into {inject!r}; choose from {list(INJECTABLE)}")
    results = []
    for index, name in enumerate(SUITES):
        if name not in names:
            continue
        suite = _Suite(name)
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))
        SUITES[name](suite, rng, -1.0 if inject == name else 1.0)
        result = suite.result()
        logger.debug("%s: %d cases, max error %.3e", name, result.cases, result.max_error)
        if not result.passed:
            logger.warning("%s failed: %s", name, result.failures[0])
        results.append(result)
    return results
