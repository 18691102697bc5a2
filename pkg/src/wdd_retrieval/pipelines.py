"""
End-to-end recovery pipelines, the HIO+ER baseline and error metrics.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Literal, Optional

import numpy as np
import numpy.typing as npt

from wdd_retrieval.angsync import hermitianize, leading_eigenvector, synchronize
from wdd_retrieval.dsp import (
    ArrayLike,
    ComplexVector,
    align_phase,
    as_vector,
    idft,
    phase_distance,
    sgn,
)
from wdd_retrieval.errors import PreconditionError, StageError
from wdd_retrieval.masks import Mask
from wdd_retrieval.measure import MeasurementSet, shifted_windows, stft_coefficients
from wdd_retrieval.tiksolve import (
    TikhonovConfig,
    build_vandermonde,
    iterated_tikhonov,
    lcurve_alpha0,
    pinv_solve,
    reshape_to_G,
)
from wdd_retrieval.tracker import StageTimings, stage, timed
from wdd_retrieval.wdd import (
    collapse_bandlimited_mask,
    collapse_bandlimited_signal,
    collapse_compact_mask,
    double_fft,
)

logger = logging.getLogger(__name__)

ERROR_DB_FLOOR = -320.0
HIO_BETA = 0.9

Algorithm = Literal["alg1", "alg2", "lemma11", "hioer"]


@dataclass
class RecoveryResult:
    """An estimate; rotated onto the reference phase when a truth was supplied."""

    x_e: ComplexVector = field(repr=False)
    algorithm: str
    error_db: Optional[float] = None
    runtime_seconds: float = 0.0
    diagnostics: dict[str, Any] = field(default_factory=dict)


# ------------------------------------------------------------------
# Metrics
# ------------------------------------------------------------------


def error_db(x_true: ArrayLike, x_e: ArrayLike) -> float:
    """``10 log10(min_theta ||e^{i theta} x_e - x||^2 / ||x||^2)``, floored at -320 dB."""
    x = as_vector(x_true)
    energy = float(np.vdot(x, x).real)
    if energy == 0.0:
        raise PreconditionError("error_db is undefined for a zero reference signal")
    ratio = phase_distance(x, x_e) ** 2 / energy
    if ratio <= 0.0:
        return ERROR_DB_FLOOR
    return max(10.0 * math.log10(ratio), ERROR_DB_FLOOR)


def relative_error(x_true: ArrayLike, x_e: ArrayLike) -> float:
    x = as_vector(x_true)
    return phase_distance(x, x_e) / float(np.linalg.norm(x))


def snr_realized(Y: npt.ArrayLike, N: npt.ArrayLike) -> float:
    """``10 log10(sum Y^2 / sum N^2)`` for clean measurements Y and noise N."""
    noise = float(np.sum(np.asarray(N, dtype=np.float64) ** 2))
    signal = float(np.sum(np.asarray(Y, dtype=np.float64) ** 2))
    if noise == 0.0:
        return math.inf
    return 10.0 * math.log10(signal / noise)


def _finish(
    x_e: ComplexVector,
    algorithm: str,
    truth: Optional[ArrayLike],
    timings: StageTimings,
    diagnostics: dict[str, Any],
) -> RecoveryResult:
    diagnostics["stage_seconds"] = timings.as_dict()
    err: Optional[float] = None
    if truth is not None:
        if np.any(as_vector(truth)):
            err = error_db(truth, x_e)
            x_e = align_phase(x_e, truth)
        else:
            diagnostics["error_undefined"] = True
    return RecoveryResult(x_e, algorithm, err, timings.total, diagnostics)


def _resolve_mask(meas: MeasurementSet, mask: Optional[Mask], algorithm: str) -> Mask:
    resolved = mask if mask is not None else meas.mask
    if resolved is None:
        raise StageError("setup", PreconditionError("a mask is required"), algorithm)
    return resolved


# ------------------------------------------------------------------
# Algorithm 1: bandlimited mask
# ------------------------------------------------------------------


@timed("alg1")
def algorithm1(
    meas: MeasurementSet,
    mask: Optional[Mask] = None,
    truth: Optional[ArrayLike] = None,
    tol: float = 1e-12,
    max_iter: Optional[int] = None,
) -> RecoveryResult:
    """Recover x from K = d, L = rho + kappa - 1 measurements with a bandlimited mask."""
    timings = StageTimings()
    with stage("setup", timings, "alg1"):
        m = _resolve_mask(meas, mask, "alg1")
        if m.domain != "fourier":
            raise PreconditionError("algorithm 1 needs a fourier-supported mask")
        if meas.K != meas.d:
            raise PreconditionError(f"algorithm 1 needs K = d, got K={meas.K}")
        if 2 * m.support >= meas.d:
            raise PreconditionError(f"need rho < d/2, got rho={m.support}")
        kappa = meas.L - m.support + 1
    with stage("wdd", timings, "alg1"):
        bands = collapse_bandlimited_mask(double_fft(meas), m, kappa)
    with stage("angsync", timings, "alg1"):
        sync = synchronize(bands, tol=tol, max_iter=max_iter)
        x_e = idft(sync.estimate)
    diagnostics = {
        "kappa": kappa,
        "min_denominator": bands.min_denominator,
        "eigenvalue": sync.eigenvalue,
        "eigen_iterations": sync.eigen_iterations,
        "eigen_residual": sync.eigen_residual,
        "converged": sync.converged,
    }
    return _finish(x_e, "alg1", truth, timings, diagnostics)


# ------------------------------------------------------------------
# Compact mask, every shift sampled
# ------------------------------------------------------------------


@timed("lemma11")
def lemma11_pipeline(
    meas: MeasurementSet,
    mask: Optional[Mask] = None,
    truth: Optional[ArrayLike] = None,
    tol: float = 1e-12,
    max_iter: Optional[int] = None,
) -> RecoveryResult:
    """Recover x from L = d, K = delta + kappa - 1 measurements with a compact mask.

    No bandlimit is assumed; the bands are diagonals of x x^* so the
    synchronized vector is x itself.
    """
    timings = StageTimings()
    with stage("setup", timings, "lemma11"):
        m = _resolve_mask(meas, mask, "lemma11")
        if meas.L != meas.d:
            raise PreconditionError(f"this pipeline needs L = d, got L={meas.L}")
        kappa = meas.K - m.support + 1
    with stage("wdd", timings, "lemma11"):
        bands = collapse_compact_mask(double_fft(meas), m, kappa)
    with stage("angsync", timings, "lemma11"):
        sync = synchronize(bands, tol=tol, max_iter=max_iter)
    diagnostics = {
        "kappa": kappa,
        "min_denominator": bands.min_denominator,
        "eigenvalue": sync.eigenvalue,
        "eigen_iterations": sync.eigen_iterations,
        "eigen_residual": sync.eigen_residual,
        "converged": sync.converged,
    }
    return _finish(sync.estimate, "lemma11", truth, timings, diagnostics)


# ------------------------------------------------------------------
# Algorithm 2: compact mask, bandlimited signal
# ------------------------------------------------------------------


@timed("alg2")
def algorithm2(
    meas: MeasurementSet,
    mask: Optional[Mask] = None,
    gamma: Optional[int] = None,
    solver: Literal["pinv", "tikhonov"] = "pinv",
    tikhonov: Optional[TikhonovConfig] = None,
    truth: Optional[ArrayLike] = None,
    q: float = 0.8,
    N: int = 20,
) -> RecoveryResult:
    """Recover a gamma-bandlimited x from K = 2*delta - 1, L = 2*gamma - 1 measurements.

    With ``solver="tikhonov"`` and no config, alpha0 comes from the L-curve and
    the schedule uses ``q`` and ``N``.
    """
    timings = StageTimings()
    with stage("setup", timings, "alg2"):
        m = _resolve_mask(meas, mask, "alg2")
        if gamma is None:
            if meas.L % 2 == 0:
                raise PreconditionError(f"L = 2*gamma - 1 must be odd, got L={meas.L}")
            gamma = (meas.L + 1) // 2
        if solver not in ("pinv", "tikhonov"):
            raise PreconditionError(f"unknown solver {solver!r}")
    with stage("wdd", timings, "alg2"):
        table = collapse_bandlimited_signal(double_fft(meas), m, gamma)
    diagnostics: dict[str, Any] = {"gamma": gamma, "min_denominator": table.min_denominator}
    with stage("tiksolve", timings, "alg2"):
        system = build_vandermonde(meas.d, m.support, gamma)
        if solver == "pinv":
            G = reshape_to_G(pinv_solve(system, table))
        else:
            cfg = tikhonov or TikhonovConfig(lcurve_alpha0(system, table), q, N)
            run = iterated_tikhonov(system, table, cfg)
            G = run.G
            diagnostics["alpha0"] = cfg.alpha0
            diagnostics["tikhonov_residuals"] = run.residuals
        diagnostics["sigma_min"] = system.sigma_min
    with stage("angsync", timings, "alg2"):
        eig = leading_eigenvector(hermitianize(G))
        x_hat = np.zeros(meas.d, dtype=np.complex128)
        x_hat[:gamma] = math.sqrt(abs(eig.value)) * eig.vector
        x_e = idft(x_hat)
    diagnostics.update(
        solver=solver,
        eigenvalue=eig.value,
        eigen_iterations=eig.iterations,
        converged=eig.converged,
    )
    return _finish(x_e, "alg2", truth, timings, diagnostics)


# ------------------------------------------------------------------
# HIO + ER baseline
# ------------------------------------------------------------------


class _RangeProjector:
    """Least-squares inverse of the STFT sampling operator."""

    def __init__(self, m: ComplexVector, K: int, L: int) -> None:
        self.m, self.K, self.L = m, K, L
        d = m.size
        self.fast = K == d
        if self.fast:
            self.windows = shifted_windows(m, L)
            weight = np.sum(np.abs(self.windows) ** 2, axis=0)
            self.inv_weight = np.where(weight > 0, 1.0 / np.where(weight > 0, weight, 1.0), 0.0)
        else:
            eye = np.eye(d, dtype=np.complex128)
            dense = np.stack([self.forward(eye[j]).ravel() for j in range(d)], axis=1)
            self.pinv = np.linalg.pinv(dense)

    def forward(self, x: ComplexVector) -> npt.NDArray[np.complex128]:
        return stft_coefficients(x, self.m, self.K, self.L)

    def backward(self, Z: npt.NDArray[np.complex128]) -> ComplexVector:
        if self.fast:
            frames = np.fft.ifft(Z.T, axis=1)
            return np.sum(np.conj(self.windows) * frames, axis=0) * self.inv_weight
        return self.pinv @ Z.ravel()


@timed("hioer")
def hio_er(
    meas: MeasurementSet,
    mask: Optional[Mask] = None,
    hio_block: int = 25,
    er_block: int = 5,
    max_iter: int = 600,
    beta: float = HIO_BETA,
    x0: Optional[ArrayLike] = None,
    truth: Optional[ArrayLike] = None,
) -> RecoveryResult:
    """Hybrid input-output blocks alternating with error-reduction blocks.

    Iterates in measurement space; returns the iterate with the smallest
    relative magnitude residual.
    """
    timings = StageTimings()
    with stage("setup", timings, "hioer"):
        m = _resolve_mask(meas, mask, "hioer")
        if hio_block < 0 or er_block < 0 or hio_block + er_block == 0:
            raise PreconditionError("schedule blocks must be nonnegative and not both zero")
        proj = _RangeProjector(m.values, meas.K, meas.L)
    with stage("hio", timings, "hioer"):
        amp = np.sqrt(np.maximum(meas.Y, 0.0))
        amp_norm = float(np.linalg.norm(amp))

        def residual(x: ComplexVector) -> float:
            if amp_norm == 0.0:
                return 0.0
            return float(np.linalg.norm(np.abs(proj.forward(x)) - amp)) / amp_norm

        x = np.zeros(meas.d, dtype=np.complex128) if x0 is None else as_vector(x0).copy()
        z = proj.forward(x)
        best_x, best_res, best_it = x, residual(x), 0
        period = hio_block + er_block
        it = 0
        for it in range(1, max_iter + 1):
            if best_res <= 1e-13:
                break
            pm = amp * sgn(z)
            if (it - 1) % period < hio_block:
                z = proj.forward(proj.backward((1.0 + beta) * pm - z)) + z - beta * pm
            else:
                z = proj.forward(proj.backward(pm))
            x = proj.backward(z)
            res = residual(x)
            if res < best_res:
                best_x, best_res, best_it = x, res, it
    if best_res > 1e-3:
        # noisy data never fits exactly
        level = logging.DEBUG if meas.noise is not None else logging.WARNING
        logger.log(level, "HIO+ER ended with relative residual %.3e", best_res)
    diagnostics = {
        "residual": best_res,
        "best_iteration": best_it,
        "iterations": it,
    }
    return _finish(best_x, "hioer", truth, timings, diagnostics)


PIPELINES = {
    "alg1": algorithm1,
    "alg2": algorithm2,
    "lemma11": lemma11_pipeline,
    "hioer": hio_er,
}
