#!/usr/bin/env python3
"""Command-line interface for the pmech engine."""

import sys
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import typer
from rich.console import Console
from rich.panel import Panel
from rich.progress import BarColumn, Progress, TextColumn, TimeElapsedColumn
from rich.table import Table

from src.config import ConfigError, load_config, parse_tolerance_overrides
from src.dynamics.evolution import CFLViolationError
from src.dynamics.hamiltonian import DynamicsError
from src.grid.catalog import CatalogError
from src.grid.gridfn import GridError
from src.group.heisenberg import HeisenbergError
from src.main import Application
from src.reps.bargmann import FockError
from src.reps.schrodinger import RepresentationError
from src.services.verifier import CheckResult, summarize

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

# CFLViolationError is a DynamicsError, so the config tuple is matched first
CONFIG_ERRORS = (ConfigError, CatalogError, RepresentationError, CFLViolationError, GridError, HeisenbergError)
NUMERICAL_ERRORS = (DynamicsError, FockError, ArithmeticError)

# Initialize CLI app
app = typer.Typer(
    name="pmech",
    help="p-mechanics numerics on the Heisenberg group",
    add_completion=False,
)

console = Console()

ConfigOption = typer.Option(None, "--config", "-c", help="key=value configuration file")
OutOption = typer.Option(None, "--out", "-o", help="Output directory (overrides PMECH_OUTDIR)")
SeedOption = typer.Option(None, "--seed", help="Seed of the random catalog draws")
TolOption = typer.Option(
    None, "--tol", help="Tolerance override NAME=VALUE; NAME is a check, a suite or quadrature (repeatable)"
)
TimingsOption = typer.Option(True, "--timings/--no-timings", help="Record runtime_ms in reports")


def get_app(
    config: Optional[Path],
    out: Optional[Path],
    seed: Optional[int],
    tol: Optional[List[str]],
    timings: bool,
    **overrides,
) -> Application:
    """Load the configuration and build an initialized application."""
    try:
        overrides.update({"outdir": out, "seed": seed})
        run_config = load_config(config, overrides, parse_tolerance_overrides(tol or []))
        application = Application(run_config, timings=timings)
        application.initialize()
        return application
    except CONFIG_ERRORS as e:
        console.print(f"[red]Configuration error:[/red] {e}")
        raise typer.Exit(EXIT_CONFIG)


def _fail(e: Exception) -> None:
    if isinstance(e, CONFIG_ERRORS):
        console.print(f"\n[red]Configuration error:[/red] {e}")
        raise typer.Exit(EXIT_CONFIG)
    if isinstance(e, NUMERICAL_ERRORS):
        console.print(f"\n[red]Numerical abort:[/red] {e}")
        raise typer.Exit(EXIT_NUMERICAL)
    raise e


def _status(result: CheckResult) -> str:
    return "[green]PASS[/green]" if result.passed else "[red]FAIL[/red]"


def print_checks(results: Sequence[CheckResult], title: str) -> None:
    table = Table(title=title, show_header=True)
    table.add_column("Check", style="cyan")
    table.add_column("Residual", justify="right")
    table.add_column("Tolerance", justify="right")
    table.add_column("Status")
    for r in results:
        table.add_row(r.check, f"{r.residual:.3e}", f"{r.tolerance:.1e}", _status(r))
    console.print(table)
    counts = summarize(results)
    console.print(f"{counts['passed']} passed, {counts['failed']} failed")


def _finish(passed: bool, files: Iterable[Path]) -> None:
    for path in files:
        console.print(f"  wrote [blue]{path}[/blue]")
    if passed:
        console.print("\n[bold green]✓ All checks passed[/bold green]\n")
        raise typer.Exit(EXIT_OK)
    console.print("\n[bold red]✗ Some checks failed[/bold red]\n")
    raise typer.Exit(EXIT_CHECK_FAILED)


@app.command()
def verify(
    suite: Optional[List[str]] = typer.Option(
        None, "--suite", "-s",
        help="Suite to run: heisenberg, convolution, bracket, schrodinger, bargmann (repeatable; default all)",
    ),
    config: Optional[Path] = ConfigOption,
    out: Optional[Path] = OutOption,
    seed: Optional[int] = SeedOption,
    tol: Optional[List[str]] = TolOption,
    timings: bool = TimingsOption,
):
    """
    Run the verification suites.

    Writes verify/report.json: one entry per check with its residual,
    tolerance, pass flag and runtime.
    """
    console.print("\n[bold cyan]Verification[/bold cyan]\n")
    application = get_app(config, out, seed, tol, timings)

    try:
        with console.status("[bold yellow]Running checks...") as status:
            report = application.verify(
                suite, on_check=lambda r: status.update(f"[bold yellow]{r.check} done")
            )
        print_checks(report.results, "Verification report")
        _finish(report.passed, [application.outdir / "verify" / "report.json"])
    except typer.Exit:
        raise
    except KeyboardInterrupt:
        console.print("\n[yellow]Operation cancelled by user[/yellow]")
        raise typer.Exit(0)
    except Exception as e:
        _fail(e)
    finally:
        application.cleanup()


@app.command()
def oscillator(
    t_end: float = typer.Option(3.141592653589793, "--t-end", help="Final time (one period is π)"),
    dt: float = typer.Option(3.141592653589793 / 400, "--dt", help="RK4 step"),
    config: Optional[Path] = ConfigOption,
    out: Optional[Path] = OutOption,
    seed: Optional[int] = SeedOption,
    tol: Optional[List[str]] = TolOption,
    timings: bool = TimingsOption,
):
    """
    Evolve the first catalog observable under the oscillator Hamiltonian.

    Writes oscillator/trajectory.csv with columns t, l2_norm,
    transport_residual, heisenberg_residual, hamilton_residual,
    recurrence_residual, and oscillator/report.json.
    """
    console.print("\n[bold cyan]Oscillator[/bold cyan]")
    console.print(f"t_end: [green]{t_end:.4f}[/green]  dt: [green]{dt:.3e}[/green]\n")
    application = get_app(config, out, seed, tol, timings)

    try:
        with Progress(
            TextColumn("[bold yellow]RK4"), BarColumn(), TextColumn("{task.completed}/{task.total}"),
            TimeElapsedColumn(), console=console, transient=True,
        ) as progress:
            task = progress.add_task("rk4", total=None)
            result = application.oscillator(
                t_end, dt, on_step=lambda n, total: progress.update(task, completed=n, total=total)
            )
        print_checks(result.report.results, "Oscillator report")
        _finish(result.passed, result.files.values())
    except typer.Exit:
        raise
    except KeyboardInterrupt:
        console.print("\n[yellow]Operation cancelled by user[/yellow]")
        raise typer.Exit(0)
    except Exception as e:
        _fail(e)
    finally:
        application.cleanup()


@app.command()
def quantize(
    signal: str = typer.Argument(..., help="Catalog signal name"),
    hbar: Optional[float] = typer.Option(None, "--hbar", help="Planck parameter (default from config)"),
    config: Optional[Path] = ConfigOption,
    out: Optional[Path] = OutOption,
    seed: Optional[int] = SeedOption,
    tol: Optional[List[str]] = TolOption,
    timings: bool = TimingsOption,
):
    """
    Quantize a catalog signal by group quadrature and by its Weyl symbol.

    Writes quantize/<signal>/rep.bin and weyl.bin with JSON headers, and
    report.json with the residual between the two.
    """
    console.print(f"\n[bold cyan]Quantize[/bold cyan] {signal}\n")
    application = get_app(config, out, seed, tol, timings)

    try:
        with console.status("[bold yellow]Assembling operators..."):
            result = application.quantize(signal, hbar)
        table = Table(show_header=False, box=None)
        table.add_row("ħ:", f"[green]{result.hbar}[/green]")
        table.add_row("Admissible ħ:", f"(0, {result.admissible[1]:.4g}]")
        table.add_row("Wave grid:", f"L_v={result.rep.grid.L_v:.3f}, N_v={result.rep.grid.N_v}")
        console.print(table)
        print_checks([result.check], "Quantization report")
        _finish(result.passed, result.files.values())
    except typer.Exit:
        raise
    except Exception as e:
        _fail(e)
    finally:
        application.cleanup()


@app.command()
def correspondence(
    config: Optional[Path] = ConfigOption,
    out: Optional[Path] = OutOption,
    seed: Optional[int] = SeedOption,
    tol: Optional[List[str]] = TolOption,
    timings: bool = TimingsOption,
    hbar: Optional[str] = typer.Option(None, "--hbar", help="Comma-separated, strictly decreasing ħ list"),
):
    """
    Measure the convergence of the quantum bracket to the Poisson bracket.

    Writes correspondence/correspondence.csv with columns hbar, residual,
    and report.json with the fitted log-log slope.
    """
    console.print("\n[bold cyan]Correspondence[/bold cyan]\n")
    application = get_app(config, out, seed, tol, timings, hbar_list=hbar)

    try:
        with console.status("[bold yellow]Sweeping ħ..."):
            result = application.correspondence()
        table = Table(show_header=True)
        table.add_column("ħ", justify="right")
        table.add_column("Residual", justify="right")
        for h, r in zip(result.hbars, result.residuals):
            table.add_row(f"{h:g}", f"{r:.3e}")
        console.print(table)
        if result.check is None:
            console.print("[yellow]Brackets vanish; no slope to fit[/yellow]")
        else:
            console.print(f"Slope: [green]{result.slope:.3f}[/green]")
            print_checks([result.check], "Correspondence report")
        _finish(result.passed, result.files.values())
    except typer.Exit:
        raise
    except Exception as e:
        _fail(e)
    finally:
        application.cleanup()


@app.command()
def version():
    """Display version information."""
    from src import __version__

    console.print(Panel(
        f"[bold cyan]pmech[/bold cyan]\n"
        f"Version: [green]{__version__}[/green]\n"
        f"p-mechanics numerics on the Heisenberg group",
        title="Version Info",
        border_style="cyan",
    ))


def main():
    """Main CLI entry point."""
    try:
        app()
    except Exception as e:
        console.print(f"\n[red]Fatal error:[/red] {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
