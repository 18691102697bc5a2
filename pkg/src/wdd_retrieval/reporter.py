"""
Rich-powered report formatting for wdd-retrieval.
"""

from __future__ import annotations

import math
from typing import Any, Optional

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from wdd_retrieval.checks import SuiteResult
from wdd_retrieval.pipelines import RecoveryResult

console = Console()


def _db_str(value: Optional[float]) -> str:
    if value is None:
        return ""
    return f"{value:.4f}"


def _sci(value: Optional[float]) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "-"
    return f"{value:.3e}"


def report_sweep(rows: list[dict[str, Any]]) -> None:
    """Print a Rich table: SNR | Algorithm | Mean Error | Median Error | Trials | Bound OK."""
    table = Table(title="Noise Sweep", show_lines=False, header_style="bold cyan")
    table.add_column("SNR (dB)", justify="right", style="yellow")
    table.add_column("Algorithm", style="magenta")
    table.add_column("Mean Error (dB)", justify="right", style="green")
    table.add_column("Median Error (dB)", justify="right", style="green")
    table.add_column("Trials", justify="right", style="blue")
    table.add_column("Bound OK", justify="right", style="white")

    for row in rows:
        ok = row.get("bound_ok")
        table.add_row(
            _db_str(row.get("snr_db")),
            str(row.get("algorithm", "")),
            _db_str(row.get("mean_error_db")),
            _db_str(row.get("median_error_db")),
            str(row.get("trials", 0)),
            "-" if ok is None else f"{ok}/{row.get('trials', 0)}",
        )

    console.print(table)


def report_bench(rows: list[dict[str, Any]]) -> None:
    """Print a Rich table: d | Requested | rho | L | Algorithm | Mean Runtime."""
    table = Table(title="Runtime Benchmark", show_lines=False, header_style="bold cyan")
    table.add_column("d", justify="right", style="yellow")
    table.add_column("Requested", justify="right", style="dim white")
    table.add_column("rho", justify="right", style="blue")
    table.add_column("L", justify="right", style="blue")
    table.add_column("Algorithm", style="magenta")
    table.add_column("Mean Runtime (s)", justify="right", style="green")

    for row in rows:
        table.add_row(
            str(row.get("d", "")),
            str(row.get("requested_d", row.get("d", ""))),
            str(row.get("rho", "")),
            str(row.get("L", "")),
            str(row.get("algorithm", "")),
            f"{row.get('mean_runtime_s', 0.0):.6f}",
        )

    console.print(table)


def report_masks(rows: list[dict[str, Any]]) -> None:
    """Print a Rich table of mask constants: Kind | d | Support | mu | Admissible."""
    table = Table(title="Mask Constants", show_lines=False, header_style="bold cyan")
    table.add_column("Kind", style="white")
    table.add_column("d", justify="right", style="yellow")
    table.add_column("Support", justify="right", style="blue")
    table.add_column("mu", justify="right", style="green")
    table.add_column("Admissible", style="magenta")

    for row in rows:
        table.add_row(
            str(row.get("kind", "")),
            str(row.get("d", "")),
            str(row.get("support", "")),
            _sci(row.get("mu")),
            "yes" if row.get("admissible") else "no",
        )

    console.print(table)


def report_checks(results: list[SuiteResult]) -> None:
    """Print one row per self-check suite."""
    table = Table(title="Self-check", show_lines=False, header_style="bold cyan")
    table.add_column("Suite", style="white")
    table.add_column("Cases", justify="right", style="blue")
    table.add_column("Max Rel. Error", justify="right", style="yellow")
    table.add_column("Result")
    table.add_column("First Failure", style="dim white", no_wrap=False)

    for res in results:
        table.add_row(
            res.name,
            str(res.cases),
            _sci(res.max_error),
            "[green]PASS[/green]" if res.passed else "[bold red]FAIL[/bold red]",
            res.failures[0] if res.failures else "",
        )

    console.print(table)


def report_recovery(result: RecoveryResult, d: int, K: int, L: int) -> None:
    """Print a summary panel for a single recovery."""
    diag = result.diagnostics
    lines = [
        f"[bold green]Algorithm:[/bold green]   [magenta]{result.algorithm}[/magenta]",
        f"[bold]Grid:[/bold]        d={d}  K={K}  L={L}",
        f"[bold]Error (dB):[/bold]  [yellow]{_db_str(result.error_db) or 'n/a'}[/yellow]",
        f"[bold]Runtime:[/bold]     {result.runtime_seconds:.4f} s",
    ]
    if "min_denominator" in diag:
        lines.append(f"[bold]Min divisor:[/bold] {_sci(diag['min_denominator'])}")
    if "eigen_iterations" in diag:
        lines.append(f"[bold]Eigen iters:[/bold] {diag['eigen_iterations']}")
    stages = diag.get("stage_seconds") or {}
    if stages:
        lines.append("")
        lines.extend(f"  [cyan]{name}[/cyan]: {secs:.4f} s" for name, secs in stages.items())

    panel = Panel(
        "\n".join(lines),
        title="Recovery Summary",
        border_style="green",
        expand=False,
    )
    console.print(panel)
