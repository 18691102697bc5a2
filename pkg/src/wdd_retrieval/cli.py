"""
CLI entry point for wdd-retrieval.
"""

from __future__ import annotations

import functools
import json
import math
import sys
from typing import Any, Callable, Optional, TypeVar

import click

from wdd_retrieval.checks import INJECTABLE, SUITES, run_selfcheck
from wdd_retrieval.config import (
    ALGORITHMS,
    DEFAULT_SNRS,
    SOLVERS,
    THREADS_ENV,
    ExperimentConfig,
    load_config_file,
    new_seed,
)
from wdd_retrieval.errors import WDDError
from wdd_retrieval.experiments import run_bench, run_sweep, simulate_trial
from wdd_retrieval.log import configure_logging
from wdd_retrieval.masks import (
    MASK_BUILDERS,
    Mask,
    build_mask,
    check_admissible,
    mu1,
    mu2,
    mu_compact,
)
from wdd_retrieval.measure import MeasurementSet
from wdd_retrieval.pipelines import (
    RecoveryResult,
    algorithm1,
    algorithm2,
    hio_er,
    lemma11_pipeline,
)
from wdd_retrieval.presets import PRESETS
from wdd_retrieval.reporter import (
    console,
    report_bench,
    report_checks,
    report_masks,
    report_recovery,
    report_sweep,
)
from wdd_retrieval.store import ResultStore
from wdd_retrieval.tiksolve import TikhonovConfig

F = TypeVar("F", bound=Callable[..., Any])

REPORT_FIELDS = "algorithm,d,K,L,error_db,runtime_s"
MASK_FIELDS = "kind,d,support,mu,admissible"


def _handle_errors(func: F) -> F:
    """Turn package and file errors into exit code 2 with the message on stderr."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except (WDDError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)

    return wrapper  # type: ignore[return-value]


def _load_config(ctx: click.Context, param: click.Parameter, value: Optional[str]) -> None:
    if not value:
        return
    # Config keys may use any spelling of an option (e.g. "d" for --d on bench).
    aliases: dict[str, str] = {}
    listy: list[str] = []
    for p in ctx.command.params:
        if not p.name:
            continue
        names = [p.name] + [opt.lstrip("-").replace("-", "_") for opt in p.opts]
        aliases.update({n: p.name for n in names})
        if getattr(p, "multiple", False):
            listy.extend(names)
    try:
        settings = load_config_file(value, multiple=listy)
    except WDDError as exc:
        raise click.BadParameter(str(exc), ctx=ctx, param=param) from exc
    mapped = {aliases.get(k, k): v for k, v in settings.items()}
    ctx.default_map = {**(ctx.default_map or {}), **mapped}


def _seed_or_new(seed: Optional[int]) -> int:
    if seed is not None:
        return seed
    seed = new_seed()
    click.echo(f"seed={seed}", err=True)
    return seed


# ------------------------------------------------------------------
# Shared options
# ------------------------------------------------------------------


def experiment_options(func: F) -> F:
    """Options describing one experiment setup; all default to the preset or algorithm layout."""
    options = [
        click.option(
            "--preset",
            type=click.Choice(sorted(PRESETS)),
            default=None,
            help="Start from a named setup; explicit flags override it.",
        ),
        click.option("--alg", type=click.Choice(ALGORITHMS), default=None, help="Algorithm."),
        click.option("--d", "d", type=int, default=None, help="Signal length."),
        click.option(
            "--support",
            "--rho",
            "--delta",
            "support",
            type=int,
            default=None,
            help="Mask support length (rho for fourier masks, delta for space masks).",
        ),
        click.option("--gamma", type=int, default=None, help="Signal bandwidth (alg2)."),
        click.option("--K", "K", type=int, default=None, help="Number of frequencies sampled."),
        click.option("--L", "L", type=int, default=None, help="Number of shifts sampled."),
        click.option(
            "--mask", type=click.Choice(sorted(MASK_BUILDERS)), default=None, help="Mask family."
        ),
        click.option("--mask-seed", type=int, default=None, help="Seed for random masks."),
        click.option("--solver", type=click.Choice(SOLVERS), default=None, help="alg2 solver."),
        click.option("--q", "tikhonov_q", type=float, default=None, help="Tikhonov decay."),
        click.option("--N", "tikhonov_N", type=int, default=None, help="Tikhonov iterations."),
        click.option(
            "--alpha0", type=float, default=None, help="Tikhonov start (default: L-curve)."
        ),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _build_config(preset: Optional[str], alg: Optional[str], **values: Any) -> ExperimentConfig:
    values["algorithm"] = alg
    if preset:
        return ExperimentConfig.from_preset(preset, **values)
    return ExperimentConfig.from_mapping(values)


# ------------------------------------------------------------------
# Group
# ------------------------------------------------------------------


@click.group()
@click.version_option(package_name="wdd-retrieval")
@click.option("-v", "--verbose", count=True, help="-v for progress, -vv for stage details.")
def main(verbose: int) -> None:
    """Phase retrieval from spectrogram magnitudes by Wigner distribution deconvolution."""
    configure_logging(verbose)


# ------------------------------------------------------------------
# simulate
# ------------------------------------------------------------------


@main.command()
@experiment_options
@click.option("--snr", type=float, default=math.inf, show_default=True, help="SNR in dB.")
@click.option("--seed", type=int, default=None, help="Trial seed (default: fresh entropy).")
@click.option(
    "--out",
    type=click.Path(file_okay=False),
    default="wdd_output",
    show_default=True,
    help="Output directory.",
)
@_handle_errors
def simulate(
    preset: Optional[str],
    alg: Optional[str],
    snr: float,
    seed: Optional[int],
    out: str,
    **values: Any,
) -> None:
    """Write measurements, ground truth and mask CSVs for one random signal."""
    cfg = _build_config(preset, alg, **values).validate()
    seed = _seed_or_new(seed)
    trial = simulate_trial(cfg, seed, snr)
    store = ResultStore(out)
    store.write_measurements("measurements.csv", trial.meas, trial_seed=seed)
    store.write_vector("truth.csv", trial.x)
    store.write_mask("mask.csv", trial.mask)
    console.print(
        f"[green]Wrote measurements.csv, truth.csv and mask.csv to {out}[/green] "
        f"(alg={cfg.algorithm} d={cfg.d} K={cfg.K} L={cfg.L} seed={seed})"
    )


# ------------------------------------------------------------------
# recover
# ------------------------------------------------------------------


def _infer_algorithm(meas: MeasurementSet, mask: Mask) -> str:
    if mask.domain == "fourier":
        return "alg1"
    return "lemma11" if meas.L == meas.d else "alg2"


@main.command()
@click.option(
    "--measurements",
    "meas_path",
    type=click.Path(exists=True, dir_okay=False),
    required=True,
    help="Measurement CSV.",
)
@click.option(
    "--mask",
    "mask_path",
    type=click.Path(exists=True, dir_okay=False),
    required=True,
    help="Mask CSV.",
)
@click.option("--truth", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--alg", type=click.Choice(ALGORITHMS), default=None, help="Default: from the mask.")
@click.option("--gamma", type=int, default=None, help="Signal bandwidth (alg2).")
@click.option("--solver", type=click.Choice(SOLVERS), default="pinv", show_default=True)
@click.option("--q", "tikhonov_q", type=float, default=0.8, show_default=True)
@click.option("--N", "tikhonov_N", type=int, default=20, show_default=True)
@click.option("--alpha0", type=float, default=None, help="Tikhonov start (default: L-curve).")
@click.option(
    "--out",
    type=click.Path(dir_okay=False),
    default="estimate.csv",
    show_default=True,
    help="Estimate CSV.",
)
@click.option("--summary", is_flag=True, help="Also print a summary panel.")
@_handle_errors
def recover(
    meas_path: str,
    mask_path: str,
    truth: Optional[str],
    alg: Optional[str],
    gamma: Optional[int],
    solver: str,
    tikhonov_q: float,
    tikhonov_N: int,
    alpha0: Optional[float],
    out: str,
    summary: bool,
) -> None:
    """Recover a signal from a measurement file and print a report line."""
    store = ResultStore(".")
    mask = store.read_mask(mask_path)
    meas = store.read_measurements(meas_path, mask=mask)
    x_true = store.read_vector(truth) if truth else None
    alg = alg or _infer_algorithm(meas, mask)

    result: RecoveryResult
    if alg == "alg1":
        result = algorithm1(meas, mask, truth=x_true)
    elif alg == "lemma11":
        result = lemma11_pipeline(meas, mask, truth=x_true)
    elif alg == "alg2":
        tik = TikhonovConfig(alpha0, tikhonov_q, tikhonov_N) if alpha0 else None
        result = algorithm2(
            meas,
            mask,
            gamma=gamma,
            solver=solver,  # type: ignore[arg-type]
            tikhonov=tik,
            truth=x_true,
            q=tikhonov_q,
            N=tikhonov_N,
        )
    else:
        result = hio_er(meas, mask, truth=x_true)

    store.write_vector(out, result.x_e)
    error = "" if result.error_db is None else f"{result.error_db:.4f}"
    click.echo(REPORT_FIELDS)
    click.echo(f"{alg},{meas.d},{meas.K},{meas.L},{error},{result.runtime_seconds:.6f}")
    if summary:
        report_recovery(result, meas.d, meas.K, meas.L)


# ------------------------------------------------------------------
# sweep
# ------------------------------------------------------------------


@main.command()
@click.option(
    "--config",
    type=click.Path(exists=True, dir_okay=False),
    callback=_load_config,
    is_eager=True,
    expose_value=False,
    help="key=value file supplying option defaults.",
)
@experiment_options
@click.option("--snr", type=float, multiple=True, help="SNR levels in dB (repeatable).")
@click.option("--trials", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=None, help="Base seed (default: fresh entropy).")
@click.option("--baseline", type=click.Choice(["hioer"]), default=None, help="Add baseline rows.")
@click.option(
    "--threads", type=int, envvar=THREADS_ENV, default=None, help="Worker threads (default: all)."
)
@click.option(
    "--out", type=click.Path(dir_okay=False), default="sweep.csv", show_default=True
)
@click.option("--json", "as_json", is_flag=True, help="Print rows as JSON instead of a table.")
@_handle_errors
def sweep(
    preset: Optional[str],
    alg: Optional[str],
    snr: tuple[float, ...],
    trials: int,
    seed: Optional[int],
    baseline: Optional[str],
    threads: Optional[int],
    out: str,
    as_json: bool,
    **values: Any,
) -> None:
    """Mean and median error over random trials at each SNR level."""
    values.update(snr=snr or DEFAULT_SNRS, trials=trials, seed=_seed_or_new(seed))
    cfg = _build_config(preset, alg, **values).validate()
    rows, _ = run_sweep(cfg, baseline=baseline, threads=threads)
    count = ResultStore(".").write_sweep(out, rows)
    if as_json:
        click.echo(json.dumps(rows, indent=2))
    else:
        report_sweep(rows)
        console.print(f"[green]Wrote {count} row(s) to {out}[/green]")


# ------------------------------------------------------------------
# bench
# ------------------------------------------------------------------


@main.command()
@click.option(
    "--config",
    type=click.Path(exists=True, dir_okay=False),
    callback=_load_config,
    is_eager=True,
    expose_value=False,
    help="key=value file supplying option defaults.",
)
@click.option("--d", "d_list", type=int, multiple=True, help="Signal lengths (repeatable).")
@click.option("--trials", type=int, default=3, show_default=True)
@click.option("--seed", type=int, default=None, help="Base mask/signal seed.")
@click.option(
    "--out", type=click.Path(dir_okay=False), default="bench.csv", show_default=True
)
@_handle_errors
def bench(d_list: tuple[int, ...], trials: int, seed: Optional[int], out: str) -> None:
    """Algorithm-1 runtimes with rho = ceil(1.25 log2 d) and L = rho + ceil(rho/2) - 1."""
    if not d_list:
        raise click.UsageError("at least one --d is required")
    if trials < 1:
        raise click.UsageError(f"--trials must be >= 1, got {trials}")
    rows = run_bench(list(d_list), trials=trials, seed=_seed_or_new(seed))
    count = ResultStore(".").write_bench(out, rows)
    report_bench(rows)
    console.print(f"[green]Wrote {count} row(s) to {out}[/green]")


# ------------------------------------------------------------------
# masks
# ------------------------------------------------------------------


@main.command()
@click.option(
    "--kind",
    type=click.Choice(sorted(MASK_BUILDERS)),
    default="exp_bandlimited",
    show_default=True,
)
@click.option("--d", "d", type=int, default=60, show_default=True)
@click.option("--length", "--rho", "--delta", "length", type=int, default=8, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for random kinds.")
@click.option("--kappa", type=int, default=None, help="Band count (default: full support).")
@click.option("--gamma", type=int, default=None, help="Use the bandwidth-limited constant.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the mask CSV.")
@click.option("--table", is_flag=True, help="Also print a table.")
@_handle_errors
def masks(
    kind: str,
    d: int,
    length: int,
    seed: int,
    kappa: Optional[int],
    gamma: Optional[int],
    out: Optional[str],
    table: bool,
) -> None:
    """Build a mask and print its divisor constant and admissibility."""
    mask = build_mask(kind, d, length, seed=seed)
    if mask.domain == "fourier":
        mu = mu1(mask, kappa if kappa is not None else length)
    elif gamma is not None:
        mu = mu2(mask, gamma)
    else:
        mu = mu_compact(mask, kappa)
    admissible = check_admissible(mask).admissible
    if out:
        ResultStore(".").write_mask(out, mask)
    click.echo(MASK_FIELDS)
    click.echo(f"{kind},{d},{length},{mu:.6e},{str(admissible).lower()}")
    if table:
        report_masks(
            [{"kind": kind, "d": d, "support": length, "mu": mu, "admissible": admissible}]
        )


# ------------------------------------------------------------------
# selfcheck
# ------------------------------------------------------------------


@main.command()
@click.option("--seed", type=int, default=0, show_default=True)
@click.option(
    "--suite", "suites", type=click.Choice(list(SUITES)), multiple=True, help="Run only these."
)
@click.option("--json", "as_json", is_flag=True, help="Print machine-readable results.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write JSON results.")
@click.option("--inject", type=click.Choice(INJECTABLE), default=None, hidden=True)
@_handle_errors
def selfcheck(
    seed: int, suites: tuple[str, ...], as_json: bool, out: Optional[str], inject: Optional[str]
) -> None:
    """Verify the transform identities and collapse equalities; exit 1 on any failure."""
    results = run_selfcheck(seed=seed, suites=suites or None, inject=inject)
    payload = [r.as_dict() for r in results]
    if out:
        ResultStore(".").export_json(out, payload)
    if as_json:
        click.echo(json.dumps(payload, indent=2))
    else:
        report_checks(results)
    failed = [r.name for r in results if not r.passed]
    if failed:
        click.echo(f"FAILED: {', '.join(failed)}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
