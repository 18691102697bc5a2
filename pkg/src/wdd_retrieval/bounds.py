"""
Right-hand sides of the recovery error guarantees.

Constants are loose; these are sanity ceilings for noisy trials, not predictions.
"""

from __future__ import annotations

import math

import numpy as np

from wdd_retrieval.dsp import ArrayLike, as_vector, dft
from wdd_retrieval.masks import Mask, mu1, mu2
from wdd_retrieval.measure import MeasurementSet
from wdd_retrieval.tiksolve import VandermondeSystem

DEFAULT_C = 1e3


def noise_norm(meas: MeasurementSet) -> float:
    if meas.noise is None or meas.noise.matrix is None:
        return 0.0
    return float(np.linalg.norm(meas.noise.matrix))


def algorithm1_bound(
    x: ArrayLike,
    meas: MeasurementSet,
    mask: Mask,
    kappa: int,
    C: float = DEFAULT_C,
    C_prime: float = DEFAULT_C,
) -> float:
    """Ceiling on ``min_phi ||x - e^{i phi} x_e||_2`` for the bandlimited-mask pipeline."""
    x_hat = dft(as_vector(x))
    floor = float(np.abs(x_hat).min())
    if floor == 0.0:
        return math.inf
    d, L = meas.d, meas.L
    nf = noise_norm(meas)
    mu = mu1(mask, kappa)
    peak = float(np.abs(x_hat).max())
    first = C * d**3.5 * peak * nf / (math.sqrt(L) * mu * kappa**2.5 * floor**2)
    second = C_prime * d**1.5 / L**0.25 * math.sqrt(nf / mu)
    return first + second


def algorithm2_bound(
    x: ArrayLike, meas: MeasurementSet, mask: Mask, gamma: int, system: VandermondeSystem
) -> float:
    """Ceiling on the relative error of the bandlimited-signal pipeline."""
    xv = as_vector(x)
    energy = float(np.vdot(xv, xv).real)
    if energy == 0.0:
        return math.inf
    beta = noise_norm(meas) / energy
    mu = mu2(mask, gamma)
    return (
        (1 + 2 * math.sqrt(2))
        * beta
        / system.sigma_min
        * meas.d**2
        / (math.sqrt(meas.K * meas.L) * mu)
    )
