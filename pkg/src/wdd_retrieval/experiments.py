"""
Experiment harness: signal generators, single trials, noise sweeps and runtime benchmarks.

Trial ``i`` of a run seeded with ``seed`` uses ``seed + i`` for the signal, the
mask (random kinds only) and the noise, so results do not depend on worker order.
"""

from __future__ import annotations

import logging
import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from wdd_retrieval.bounds import algorithm1_bound, algorithm2_bound
from wdd_retrieval.config import ExperimentConfig, resolve_threads
from wdd_retrieval.dsp import ComplexVector, idft, phase_distance
from wdd_retrieval.errors import PreconditionError
from wdd_retrieval.masks import Mask, build_mask, random_bandlimited_mask
from wdd_retrieval.measure import MeasurementSet, add_noise, spectrogram_subsampled
from wdd_retrieval.pipelines import (
    RecoveryResult,
    algorithm1,
    algorithm2,
    hio_er,
    lemma11_pipeline,
    relative_error,
)
from wdd_retrieval.tiksolve import TikhonovConfig, build_vandermonde

logger = logging.getLogger(__name__)

SIGNAL_STREAM = 2
# Noiseless trials sit at round-off, not at zero.
BOUND_SLACK = 1e-6


# ------------------------------------------------------------------
# Signals
# ------------------------------------------------------------------


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, SIGNAL_STREAM])))


def random_signal(d: int, seed: int) -> ComplexVector:
    """i.i.d. complex Gaussian entries with unit expected magnitude squared."""
    rng = _rng(seed)
    return (rng.standard_normal(d) + 1j * rng.standard_normal(d)) / math.sqrt(2.0)


def nonvanishing_signal(d: int, seed: int, floor: float = 0.5) -> ComplexVector:
    """Entries with magnitude in ``[floor, floor + 1)`` and uniform phase."""
    rng = _rng(seed)
    return (floor + rng.uniform(size=d)) * np.exp(2j * np.pi * rng.uniform(size=d))


def bandlimited_signal(d: int, gamma: int, seed: int) -> ComplexVector:
    """A signal whose spectrum is complex Gaussian on ``[0, gamma)`` and zero elsewhere."""
    rng = _rng(seed)
    spectrum = np.zeros(d, dtype=np.complex128)
    re, im = rng.standard_normal(gamma), rng.standard_normal(gamma)
    spectrum[:gamma] = (re + 1j * im) / math.sqrt(2.0)
    return idft(spectrum)


def signal_for(cfg: ExperimentConfig, seed: int) -> ComplexVector:
    if cfg.algorithm == "alg2":
        assert cfg.gamma is not None
        return bandlimited_signal(cfg.d, cfg.gamma, seed)
    if cfg.algorithm == "lemma11":
        return nonvanishing_signal(cfg.d, seed)
    return random_signal(cfg.d, seed)


# ------------------------------------------------------------------
# Single trials
# ------------------------------------------------------------------


@dataclass
class Trial:
    seed: int
    x: ComplexVector
    mask: Mask
    meas: MeasurementSet


@dataclass
class TrialOutcome:
    seed: int
    snr_db: float
    algorithm: str
    error_db: float
    runtime_seconds: float
    bound: Optional[float] = None
    bound_ok: Optional[bool] = None


def simulate_trial(cfg: ExperimentConfig, seed: int, snr_db: float = math.inf) -> Trial:
    """Signal, mask and (noisy) measurements for one seed; ``cfg`` must be validated."""
    assert cfg.K is not None and cfg.L is not None
    mask_seed = cfg.mask_seed if cfg.mask_seed is not None else seed
    mask = build_mask(cfg.mask_kind, cfg.d, cfg.support, seed=mask_seed)
    x = signal_for(cfg, seed)
    meas = add_noise(spectrogram_subsampled(x, mask, cfg.K, cfg.L), snr_db, seed)
    return Trial(seed, x, mask, meas)


def recover(cfg: ExperimentConfig, trial: Trial, algorithm: Optional[str] = None) -> RecoveryResult:
    algorithm = algorithm or cfg.algorithm
    truth = trial.x
    if algorithm == "alg1":
        return algorithm1(trial.meas, trial.mask, truth=truth)
    if algorithm == "lemma11":
        return lemma11_pipeline(trial.meas, trial.mask, truth=truth)
    if algorithm == "alg2":
        tik = TikhonovConfig(cfg.alpha0, cfg.tikhonov_q, cfg.tikhonov_N) if cfg.alpha0 else None
        return algorithm2(
            trial.meas,
            trial.mask,
            gamma=cfg.gamma,
            solver=cfg.solver,  # type: ignore[arg-type]
            tikhonov=tik,
            truth=truth,
            q=cfg.tikhonov_q,
            N=cfg.tikhonov_N,
        )
    return hio_er(trial.meas, trial.mask, truth=truth)


def _bound_check(
    cfg: ExperimentConfig, trial: Trial, result: RecoveryResult
) -> tuple[Optional[float], Optional[bool]]:
    if result.algorithm == "alg1":
        assert cfg.kappa is not None
        bound = algorithm1_bound(trial.x, trial.meas, trial.mask, cfg.kappa)
        scale = float(np.linalg.norm(trial.x))
        return bound, phase_distance(trial.x, result.x_e) <= bound + BOUND_SLACK * scale
    if result.algorithm == "alg2":
        assert cfg.gamma is not None
        system = build_vandermonde(cfg.d, cfg.support, cfg.gamma)
        bound = algorithm2_bound(trial.x, trial.meas, trial.mask, cfg.gamma, system)
        return bound, relative_error(trial.x, result.x_e) <= bound + BOUND_SLACK
    return None, None


def run_trial(
    cfg: ExperimentConfig,
    seed: int,
    snr_db: float = math.inf,
    algorithms: Optional[tuple[str, ...]] = None,
) -> list[TrialOutcome]:
    """Run every requested algorithm on one shared set of measurements."""
    trial = simulate_trial(cfg, seed, snr_db)
    outcomes = []
    for name in algorithms or (cfg.algorithm,):
        result = recover(cfg, trial, name)
        bound, ok = _bound_check(cfg, trial, result)
        assert result.error_db is not None
        outcomes.append(
            TrialOutcome(seed, snr_db, name, result.error_db, result.runtime_seconds, bound, ok)
        )
    return outcomes


# ------------------------------------------------------------------
# Sweeps
# ------------------------------------------------------------------


def summarize(outcomes: list[TrialOutcome]) -> list[dict[str, Any]]:
    """One row per (snr, algorithm), ordered by snr then first appearance of the algorithm."""
    groups: dict[tuple[float, str], list[TrialOutcome]] = {}
    for out in outcomes:
        groups.setdefault((out.snr_db, out.algorithm), []).append(out)
    rows = []
    for (snr, name), group in sorted(groups.items(), key=lambda kv: kv[0][0]):
        errors = [o.error_db for o in group]
        checked = [o.bound_ok for o in group if o.bound_ok is not None]
        rows.append(
            {
                "snr_db": snr,
                "algorithm": name,
                "mean_error_db": statistics.fmean(errors),
                "median_error_db": statistics.median(errors),
                "trials": len(group),
                "bound_ok": sum(checked) if checked else None,
            }
        )
    return rows


def run_sweep(
    cfg: ExperimentConfig, baseline: Optional[str] = None, threads: Optional[int] = None
) -> tuple[list[dict[str, Any]], list[TrialOutcome]]:
    """Every (snr, trial) pair on a thread pool; returns summary rows and raw outcomes."""
    cfg = cfg.validate()
    algorithms = (cfg.algorithm,) + ((baseline,) if baseline else ())
    tasks = [(snr, cfg.seed + i) for snr in cfg.snr for i in range(cfg.trials)]
    workers = resolve_threads(threads)
    logger.info(
        "sweep %s: %d snr levels x %d trials on %d threads",
        "+".join(algorithms),
        len(cfg.snr),
        cfg.trials,
        workers,
    )
    with ThreadPoolExecutor(max_workers=workers) as pool:
        batches = list(pool.map(lambda t: run_trial(cfg, t[1], t[0], algorithms), tasks))
    outcomes = [o for batch in batches for o in batch]
    return summarize(outcomes), outcomes


# ------------------------------------------------------------------
# Runtime benchmark
# ------------------------------------------------------------------


def bench_layout(d: int) -> tuple[int, int, int]:
    """``(d_adjusted, rho, L)`` with rho = ceil(1.25 log2 d), L = rho + ceil(rho/2) - 1.

    d is moved to the nearest multiple of L that keeps rho < d/2.
    """
    if d < 4:
        raise PreconditionError(f"bench needs d >= 4, got {d}")
    rho = math.ceil(1.25 * math.log2(d))
    L = rho + math.ceil(rho / 2) - 1
    adjusted = L * max(round(d / L), 1)
    while 2 * rho >= adjusted:
        adjusted += L
    return adjusted, rho, L


def run_bench(d_list: list[int], trials: int = 3, seed: int = 0) -> list[dict[str, Any]]:
    """Noiseless algorithm-1 runtimes with random bandlimited masks, one row per d.

    Trials run serially so the timings do not compete for cores.
    """
    rows = []
    for requested in d_list:
        d, rho, L = bench_layout(requested)
        if d != requested:
            logger.info("bench: d=%d adjusted to %d (L=%d)", requested, d, L)
        runtimes = []
        for i in range(trials):
            mask = random_bandlimited_mask(d, rho, seed + i)
            x = random_signal(d, seed + i)
            result = algorithm1(spectrogram_subsampled(x, mask, d, L), mask)
            runtimes.append(result.runtime_seconds)
        rows.append(
            {
                "d": d,
                "requested_d": requested,
                "rho": rho,
                "L": L,
                "algorithm": "alg1",
                "mean_runtime_s": statistics.fmean(runtimes),
            }
        )
    return rows
