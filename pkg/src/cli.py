from __future__ import annotations

import logging
from pathlib import Path
from typing import Callable, List, Optional

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from . import config
from .errors import GeometryError
from .schemas import ChainIn, ExperimentReport, FormIn, StepFunctionIn, WitnessIn
from .services import experiments
from .services.report_writer import read_input, write_report

logger = logging.getLogger("cli")
console = Console()

app = typer.Typer(
    name="natural-norms",
    help="Normas naturales, norma plana e integración de formas sobre cadenas y dominios fractales.",
    no_args_is_help=True,
    add_completion=False,
)

OUT_OPTION = typer.Option(Path(config.REPORT_OUT_DIR), "--out", help="Directorio de reportes JSON/CSV")


# ============================================================
# Utilidades internas
# ============================================================

def _setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else config.LOG_LEVEL,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def _print_summary(report: ExperimentReport, written: list[Path]) -> None:
    table = Table(title=f"{report.name}: {report.verdict}")
    table.add_column("key")
    table.add_column("value")
    for key, value in report.summary.items():
        if isinstance(value, (int, float, str, bool)) or value is None:
            table.add_row(key, repr(value) if isinstance(value, float) else str(value))
    console.print(table)
    for path in written:
        console.print(f"  → {path}")


def _finish(build: Callable[[], ExperimentReport], out: Path, accepted: tuple[str, ...] = ("pass",)) -> None:
    """Construye el reporte, lo escribe y sale con 0 (aceptado), 2 (veredicto) o 1 (entrada)."""
    try:
        report = build()
    except GeometryError as exc:
        logger.error(str(exc))
        raise typer.Exit(code=exc.exit_code)
    written = write_report(report, out)
    _print_summary(report, written)
    raise typer.Exit(code=0 if report.verdict in accepted else 2)


def _load_cells(paths: Optional[List[Path]]):
    return [read_input(p, ChainIn).to_chain() for p in paths] if paths else None


@app.callback()
def main(verbose: bool = typer.Option(False, "--verbose", "-v", help="Logs de depuración")):
    _setup_logging(verbose)


# ============================================================
# Comandos sobre archivos de entrada
# ============================================================

@app.command()
def norm(
    chain: Path = typer.Option(..., "--chain", help="Cadena (JSON)"),
    lam: float = typer.Option(..., "--lambda", help="Parámetro λ"),
    witness: Optional[Path] = typer.Option(None, "--witness", help="Testigo (JSON) a evaluar o usar como semilla"),
    cells: Optional[List[Path]] = typer.Option(None, "--complex", help="Celdas generadoras (JSON, repetible)"),
    budget: int = typer.Option(config.SEARCH_BUDGET, "--budget", help="Reinicios de la búsqueda"),
    seed: int = typer.Option(0, "--seed"),
    out: Path = OUT_OPTION,
):
    """Cota de |A|^♮_λ (masa proyectada si λ ≤ n)."""
    def build():
        a = read_input(chain, ChainIn).to_chain()
        w = read_input(witness, WitnessIn).to_witness() if witness else None
        return experiments.norm_report(a, lam, w, _load_cells(cells), budget, seed)

    _finish(build, out)


@app.command()
def integrate(
    chain: Path = typer.Option(..., "--chain"),
    form: Path = typer.Option(..., "--form"),
    out: Path = OUT_OPTION,
):
    """∫_A ω exacto."""
    _finish(
        lambda: experiments.integrate_report(read_input(form, FormIn).to_form(), read_input(chain, ChainIn).to_chain()),
        out,
    )


@app.command()
def stokes(
    chain: Path = typer.Option(..., "--chain"),
    form: Path = typer.Option(..., "--form"),
    tol: float = typer.Option(1e-9, "--tol", help="Tolerancia relativa del residuo"),
    out: Path = OUT_OPTION,
):
    """|∫_A dω - ∫_∂A ω|."""
    _finish(
        lambda: experiments.stokes_report(
            read_input(form, FormIn).to_form(), read_input(chain, ChainIn).to_chain(), tol
        ),
        out,
    )


@app.command()
def flatnorm(
    chain: Optional[Path] = typer.Option(None, "--chain", help="Sin cadena: 64-gono sobre el disco"),
    cells: Optional[List[Path]] = typer.Option(None, "--complex"),
    expected: Optional[float] = typer.Option(None, "--expected"),
    tol: float = typer.Option(0.05, "--tol"),
    out: Path = OUT_OPTION,
):
    """Norma plana relativa a un complejo (LP)."""
    def build():
        a = read_input(chain, ChainIn).to_chain() if chain else None
        return experiments.flatnorm_report(a, _load_cells(cells), expected, tol)

    _finish(build, out)


@app.command()
def lebesgue(
    function: Optional[Path] = typer.Option(None, "--function", help="Función escalonada (JSON)"),
    cases: int = typer.Option(100, "--cases"),
    seed: int = typer.Option(0, "--seed"),
    tol: float = typer.Option(1e-12, "--tol"),
    out: Path = OUT_OPTION,
):
    """Σ v·long = ∫_{A_f} dx∧dy = ∫_Γ y dx."""
    def build():
        f = read_input(function, StepFunctionIn).to_step_function() if function else None
        return experiments.lebesgue_report(f, cases, seed, tol)

    _finish(build, out)


# ============================================================
# Experimentos
# ============================================================

@app.command("koch-convergence")
def koch_convergence(
    levels: int = typer.Option(9, "--levels", help="Niveles 1..N"),
    tol: float = typer.Option(1e-4, "--tol"),
    out: Path = OUT_OPTION,
):
    _finish(lambda: experiments.koch_convergence(range(1, levels + 1), tol), out)


@app.command("harrison-bound")
def harrison_bound(
    level: Optional[int] = typer.Option(None, "--level", help="Un nivel (1..3); por defecto todos"),
    out: Path = OUT_OPTION,
):
    _finish(lambda: experiments.harrison_bound([level] if level else None), out)


@app.command("spiral-divergence")
def spiral_divergence(
    levels: int = typer.Option(8, "--levels", help="Truncaciones 2, 4, ..., 2^N"),
    tol: float = typer.Option(1e-4, "--tol"),
    out: Path = OUT_OPTION,
):
    _finish(lambda: experiments.spiral_divergence(levels, tol), out, accepted=("diverged",))


@app.command("snowflake-stokes")
def snowflake_stokes(
    levels: int = typer.Option(6, "--levels", help="Niveles 0..N"),
    tol: float = typer.Option(1e-9, "--tol"),
    form: Optional[Path] = typer.Option(None, "--form", help="1-forma en R^2; por defecto x dy"),
    out: Path = OUT_OPTION,
):
    def build():
        omega = read_input(form, FormIn).to_form() if form else None
        return experiments.snowflake_stokes(range(0, levels + 1), tol, omega)

    _finish(build, out)


@app.command("koch-ratio")
def koch_ratio(
    levels: int = typer.Option(8, "--levels", help="Niveles 1..N"),
    out: Path = OUT_OPTION,
):
    _finish(lambda: experiments.koch_ratio(range(1, levels + 1)), out)


@app.command("whitney-inequality")
def whitney_inequality(
    cases: int = typer.Option(100, "--cases"),
    seed: int = typer.Option(0, "--seed"),
    out: Path = OUT_OPTION,
):
    _finish(lambda: experiments.whitney_inequality(cases, seed), out)


if __name__ == "__main__":
    app()
