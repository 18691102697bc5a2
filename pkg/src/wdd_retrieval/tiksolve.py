"""
Linear inversion stage for bandlimited signals.

The collapsed table satisfies ``V = W A`` where W is a partial Fourier
(Vandermonde) matrix and A stores the band entries ``x_hat_n conj(x_hat_{n+alpha})``
of a gamma-bandlimited spectrum. Reshaping A gives the gamma x gamma rank-one
matrix ``G = x_hat x_hat^*`` restricted to ``[gamma]``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
import numpy.typing as npt
import scipy.linalg

from wdd_retrieval.errors import PreconditionError
from wdd_retrieval.wdd import CollapsedTable

logger = logging.getLogger(__name__)

ComplexMatrix = npt.NDArray[np.complex128]

LCURVE_GRID = (1e-12, 1e2, 60)


@dataclass(eq=False)
class VandermondeSystem:
    d: int
    delta: int
    gamma: int
    W: ComplexMatrix = field(repr=False)
    gram: ComplexMatrix = field(init=False, repr=False)
    singular_values: npt.NDArray[np.float64] = field(init=False, repr=False)
    _factor: tuple = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.gram = self.W.conj().T @ self.W
        self.singular_values = np.linalg.svd(self.W, compute_uv=False)
        try:
            self._factor = scipy.linalg.cho_factor(self.gram)
        except np.linalg.LinAlgError as exc:
            raise PreconditionError(f"W^* W is not positive definite: {exc}") from exc

    @property
    def sigma_min(self) -> float:
        return float(self.singular_values[-1])

    @property
    def condition(self) -> float:
        return float(self.singular_values[0] / self.singular_values[-1])

    def solve_normal(self, rhs: ComplexMatrix) -> ComplexMatrix:
        return scipy.linalg.cho_solve(self._factor, rhs)


@dataclass(frozen=True)
class TikhonovConfig:
    alpha0: float
    q: float = 0.8
    N: int = 20

    def __post_init__(self) -> None:
        if not self.alpha0 > 0:
            raise PreconditionError(f"alpha0 must be positive, got {self.alpha0}")
        if not 0 < self.q < 1:
            raise PreconditionError(f"q must lie in (0, 1), got {self.q}")
        if self.N < 0:
            raise PreconditionError(f"N must be nonnegative, got {self.N}")


@dataclass
class TikhonovResult:
    G: ComplexMatrix = field(repr=False)
    A: ComplexMatrix = field(repr=False)
    residuals: list[float] = field(default_factory=list)


@dataclass
class RankOne:
    tau: float
    u: npt.NDArray[np.complex128] = field(repr=False)
    v: npt.NDArray[np.complex128] = field(repr=False)

    def matrix(self) -> ComplexMatrix:
        return self.tau * np.outer(self.u, self.v.conj())


def build_vandermonde(d: int, delta: int, gamma: int) -> VandermondeSystem:
    """``W[j, k] = exp(-2*pi*i*(j - delta + 1)*k/d)`` for j < 2*delta - 1, k < gamma."""
    if not 1 <= gamma <= 2 * delta - 1 < d:
        raise PreconditionError(
            f"need 1 <= gamma <= 2*delta - 1 < d, got gamma={gamma}, delta={delta}, d={d}"
        )
    rows = np.arange(2 * delta - 1) - (delta - 1)
    cols = np.arange(gamma)
    W = np.exp(-2j * np.pi * np.outer(rows, cols) / d)
    return VandermondeSystem(d, delta, gamma, W)


def _table(V: Union[CollapsedTable, npt.ArrayLike], system: VandermondeSystem) -> ComplexMatrix:
    arr = V.V if isinstance(V, CollapsedTable) else np.asarray(V, dtype=np.complex128)
    expected = (2 * system.delta - 1, 2 * system.gamma - 1)
    if arr.shape != expected:
        raise PreconditionError(f"table has shape {arr.shape}, expected {expected}")
    return arr


def pinv_solve(system: VandermondeSystem, V: Union[CollapsedTable, npt.ArrayLike]) -> ComplexMatrix:
    """``A = (W^* W)^{-1} W^* V``."""
    table = _table(V, system)
    return system.solve_normal(system.W.conj().T @ table)


# ------------------------------------------------------------------
# Reshaping between A (gamma x (2*gamma - 1)) and G (gamma x gamma)
# ------------------------------------------------------------------


def _band_index(gamma: int) -> tuple[np.ndarray, np.ndarray]:
    i, j = np.meshgrid(np.arange(gamma), np.arange(gamma), indexing="ij")
    return i, j - i + gamma - 1


def reshape_to_G(A: npt.ArrayLike) -> ComplexMatrix:
    """``G[i, j] = A[i, j - i]`` with A's columns indexed from 1 - gamma."""
    arr = np.asarray(A, dtype=np.complex128)
    gamma = arr.shape[0]
    if arr.shape != (gamma, 2 * gamma - 1):
        raise PreconditionError(f"A must be gamma x (2*gamma - 1), got {arr.shape}")
    rows, cols = _band_index(gamma)
    return arr[rows, cols]


def embed_from_G(G: npt.ArrayLike) -> ComplexMatrix:
    """Inverse of ``reshape_to_G``; entries with ``i + alpha`` outside [gamma] stay zero."""
    arr = np.asarray(G, dtype=np.complex128)
    gamma = arr.shape[0]
    if arr.shape != (gamma, gamma):
        raise PreconditionError(f"G must be square, got {arr.shape}")
    A = np.zeros((gamma, 2 * gamma - 1), dtype=np.complex128)
    rows, cols = _band_index(gamma)
    A[rows, cols] = arr
    return A


def rank_one_approx(G: npt.ArrayLike) -> RankOne:
    """Best rank-one approximation from the top singular triple."""
    arr = np.asarray(G, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise PreconditionError(f"expected a square matrix, got shape {arr.shape}")
    U, s, Vh = np.linalg.svd(arr)
    return RankOne(float(s[0]), U[:, 0], Vh[0].conj())


# ------------------------------------------------------------------
# Iterated Tikhonov
# ------------------------------------------------------------------


def iterated_tikhonov(
    system: VandermondeSystem, V: Union[CollapsedTable, npt.ArrayLike], cfg: TikhonovConfig
) -> TikhonovResult:
    """Non-stationary iterated Tikhonov with a rank-one projection before each correction.

    Each step re-embeds the rank-one part of G into A, adds the regularized
    correction ``(W^* W + alpha0 q^k I)^{-1} W^* (V - W A)`` and symmetrizes.
    """
    table = _table(V, system)
    gamma = system.gamma
    W, Wh = system.W, system.W.conj().T
    eye = np.eye(gamma)
    G = np.zeros((gamma, gamma), dtype=np.complex128)
    A = np.zeros((gamma, 2 * gamma - 1), dtype=np.complex128)
    residuals: list[float] = []

    for k in range(1, cfg.N + 1):
        A = embed_from_G(rank_one_approx(G).matrix())
        alpha = cfg.alpha0 * cfg.q**k
        factor = scipy.linalg.cho_factor(system.gram + alpha * eye)
        A = A + scipy.linalg.cho_solve(factor, Wh @ (table - W @ A))
        G = reshape_to_G(A)
        G = 0.5 * (G + G.conj().T)
        residuals.append(float(np.linalg.norm(table - W @ A)))

    if residuals:
        logger.debug("iterated tikhonov: residual %.3e -> %.3e", residuals[0], residuals[-1])
    return TikhonovResult(G, A, residuals)


def lcurve_alpha0(
    system: VandermondeSystem,
    V: Union[CollapsedTable, npt.ArrayLike],
    grid: Optional[npt.ArrayLike] = None,
) -> float:
    """Pick alpha at the corner (largest curvature) of the log-log L-curve."""
    table = _table(V, system)
    lo, hi, count = LCURVE_GRID
    alphas = np.logspace(np.log10(lo), np.log10(hi), count) if grid is None else np.asarray(grid)
    midpoint = float(np.sqrt(alphas[0] * alphas[-1]))

    U, s, _ = np.linalg.svd(system.W, full_matrices=False)
    beta = U.conj().T @ table
    outside = float(np.linalg.norm(table - U @ beta) ** 2)
    row_energy = np.sum(np.abs(beta) ** 2, axis=1)

    filt = s[None, :] ** 2 + alphas[:, None]
    sol = np.sqrt(np.sum(row_energy[None, :] * (s[None, :] / filt) ** 2, axis=1))
    res = np.sqrt(outside + np.sum(row_energy[None, :] * (alphas[:, None] / filt) ** 2, axis=1))

    with np.errstate(divide="ignore", invalid="ignore"):
        px, py = np.log(res), np.log(sol)
        ax, ay = px[1:-1] - px[:-2], py[1:-1] - py[:-2]
        bx, by = px[2:] - px[1:-1], py[2:] - py[1:-1]
        cx, cy = px[2:] - px[:-2], py[2:] - py[:-2]
        cross = ax * by - ay * bx
        lengths = np.hypot(ax, ay) * np.hypot(bx, by) * np.hypot(cx, cy)
        curvature = 2.0 * cross / lengths

    finite = np.isfinite(curvature)
    if not finite.any() or not np.any(curvature[finite] > 0):
        logger.warning("degenerate L-curve; using alpha0=%.3e", midpoint)
        return midpoint
    best = int(np.nanargmax(np.where(finite, curvature, -np.inf)))
    return float(alphas[best + 1])
