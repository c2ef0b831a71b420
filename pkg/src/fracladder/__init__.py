"""
fracladder - ladder states of the fractional quantum oscillator

Usage:
    fracladder states --alpha 1.2,1.5 --n 0,1,2
    fracladder energies --alpha 1.5 --n 2
    fracladder verify --paper-verbatim-e2
    fracladder figure --overlay
    fracladder info

Exit codes: 0 success, 1 verification failure, 2 invalid configuration or
arguments, 3 I/O failure.
"""

import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import typer
from rich.align import Align
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table
from rich.text import Text
from rich.tree import Tree
from typer.core import TyperGroup

from .config import (
    FIGURE_ALPHAS,
    FracladderConfig,
    RunConfig,
    build_run_config,
    load_config_file,
    parse_alpha_list,
    parse_level_list,
)
from .errors import ConfigError, FracladderError
from .figures import write_figure
from .ladder import compare_printed_e2, node_locations
from .operators import symbol_table
from .output import config_pairs, energy_grid, run_jobs, write_energy_files, write_state_files
from .verification import VerificationReport, VerificationSuite

__version__ = "0.1.0"

EXIT_VERIFY_FAILED = 1
EXIT_BAD_CONFIG = 2
EXIT_IO = 3

BANNER = """
┌─┐┬─┐┌─┐┌─┐┬  ┌─┐┌┬┐┌┬┐┌─┐┬─┐
├┤ ├┬┘├─┤│  │  ├─┤ ││ ││├┤ ├┬┘
└  ┴└─┴ ┴└─┘┴─┘┴ ┴─┴┘─┴┘└─┘┴└─
"""

TAGLINE = "Ladder states and local energies of the fractional quantum oscillator"

REPORT_FILENAME = "verification_report.json"

logger = logging.getLogger(__name__)


class StepTracker:
    """Hierarchical step list rendered as a rich Tree once a run finishes."""

    def __init__(self, title: str):
        self.title = title
        self.steps: List[Dict[str, str]] = []

    def add(self, key: str, label: str):
        if key not in [s["key"] for s in self.steps]:
            self.steps.append({"key": key, "label": label, "status": "pending", "detail": ""})

    def update(self, key: str, status: str, detail: str = ""):
        """Progress callback for VerificationSuite.run; unknown keys are appended."""
        for s in self.steps:
            if s["key"] == key:
                s["status"] = status
                if detail:
                    s["detail"] = detail
                return
        self.steps.append({"key": key, "label": key, "status": status, "detail": detail})

    def render(self):
        tree = Tree(f"[cyan]{self.title}[/cyan]", guide_style="grey50")
        symbols = {
            "done": "[green]●[/green]",
            "pending": "[green dim]○[/green dim]",
            "running": "[cyan]○[/cyan]",
            "error": "[red]●[/red]",
        }
        for step in self.steps:
            label = step["label"]
            detail_text = step["detail"].strip() if step["detail"] else ""
            status = step["status"]
            symbol = symbols.get(status, " ")
            if status == "pending":
                suffix = f" ({detail_text})" if detail_text else ""
                line = f"{symbol} [bright_black]{label}{suffix}[/bright_black]"
            elif detail_text:
                line = f"{symbol} [white]{label}[/white] [bright_black]({detail_text})[/bright_black]"
            else:
                line = f"{symbol} [white]{label}[/white]"
            tree.add(line)
        return tree


console = Console()
err_console = Console(stderr=True)


class BannerGroup(TyperGroup):
    """Custom group that shows banner before help."""

    def format_help(self, ctx, formatter):
        show_banner()
        super().format_help(ctx, formatter)


app = typer.Typer(
    name="fracladder",
    help="Ladder states, local energies and identity checks for the fractional quantum oscillator",
    add_completion=False,
    invoke_without_command=True,
    cls=BannerGroup,
)


def show_banner():
    """Display the ASCII art banner."""
    banner_lines = BANNER.strip().split('\n')
    colors = ["bright_blue", "cyan", "bright_cyan"]

    styled_banner = Text()
    for i, line in enumerate(banner_lines):
        styled_banner.append(line + "\n", style=colors[i % len(colors)])

    console.print(Align.center(styled_banner))
    console.print(Align.center(Text(TAGLINE, style="italic bright_yellow")))
    console.print()


def configure_logging(level: str) -> None:
    """Route every fracladder logger through a rich handler on stderr."""
    numeric = logging.getLevelName(level.upper())
    if not isinstance(numeric, int):
        raise typer.BadParameter(f"unknown log level {level!r}", param_hint="--log-level")
    logging.basicConfig(
        level=numeric,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_time=False, show_path=False)],
        force=True,
    )


@app.callback()
def callback(
    ctx: typer.Context,
    log_level: str = typer.Option(FracladderConfig.LOG_LEVEL, "--log-level", help="Logging level (DEBUG, INFO, WARNING, ERROR)"),
):
    """Show banner when no subcommand is provided."""
    configure_logging(log_level)
    if ctx.invoked_subcommand is None and "--help" not in sys.argv and "-h" not in sys.argv:
        show_banner()
        console.print(Align.center("[dim]Run 'fracladder --help' for usage information[/dim]"))
        console.print()


def _fail(title: str, message: str, code: int):
    console.print(Panel(message, title=title, border_style="red"))
    raise typer.Exit(code)


def _load_config(config_file: Optional[Path], defaults: Optional[Dict[str, Any]] = None, **flags) -> RunConfig:
    """Build a validated RunConfig, exiting with code 2 (or 3 for an unreadable file).

    defaults apply only where neither the flags nor the file set a value.
    """
    alpha, n, fmt = flags.pop('alpha', None), flags.pop('n', None), flags.pop('fmt', None)
    try:
        overrides: Dict[str, Any] = dict(flags)
        if alpha:
            overrides['alphas'] = parse_alpha_list(alpha)
        if n:
            overrides['levels'] = parse_level_list(n)
        if fmt:
            overrides['formats'] = tuple(item.strip() for item in fmt.split(",") if item.strip())
        file_keys = load_config_file(config_file) if config_file is not None else {}
        for name, value in (defaults or {}).items():
            if overrides.get(name) is None and name not in file_keys:
                overrides[name] = value
        config = build_run_config(config_file, overrides)
        logger.debug("run configuration: %s", config)
        return config
    except ConfigError as e:
        _fail("Configuration Error", str(e), EXIT_BAD_CONFIG)
    except OSError as e:
        _fail("I/O Error", f"cannot read configuration file: {e}", EXIT_IO)


def _prepare_out_dir(config: RunConfig) -> None:
    try:
        config.out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        _fail("I/O Error", f"cannot create output directory {config.out_dir}: {e}", EXIT_IO)


def _write(config: RunConfig, produce: Callable[[], List[Path]], what: str) -> List[Path]:
    """Run a writer, mapping I/O and domain failures onto exit codes."""
    _prepare_out_dir(config)
    try:
        paths = produce()
    except OSError as e:
        _fail("I/O Error", f"writing {what} failed: {e}", EXIT_IO)
    except FracladderError as e:
        _fail("Error", str(e), EXIT_BAD_CONFIG)
    console.print(f"[green]Wrote {len(paths)} {what} file(s) to[/green] {config.out_dir}")
    return paths


ALPHA_HELP = "Comma-separated Lévy indices, each with 1 < α ≤ 2"
LEVEL_HELP = "Comma-separated state indices n"


@app.command()
def states(
    alpha: Optional[str] = typer.Option(None, "--alpha", help=ALPHA_HELP),
    n: Optional[str] = typer.Option(None, "--n", help=LEVEL_HELP),
    k_max: Optional[float] = typer.Option(None, "--k-max", help="Half-width of the momentum grid"),
    points: Optional[int] = typer.Option(None, "--points", help="Number of grid points (power of two)"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
    config_file: Optional[Path] = typer.Option(None, "--config", help="key=value configuration file"),
    workers: Optional[int] = typer.Option(None, "--workers", help="Concurrent (α, n) jobs"),
):
    """Write momentum- and position-space CSVs of each ladder state.

    Output is always CSV; --format and --tol belong to verify and figure.
    """
    config = _load_config(config_file, alpha=alpha, n=n, k_max=k_max, points=points, out_dir=out, workers=workers)
    _write(config, lambda: run_jobs(config, lambda a, level: write_state_files(config, a, level),
                                    config_pairs(config)), "state")


@app.command()
def energies(
    alpha: Optional[str] = typer.Option(None, "--alpha", help=ALPHA_HELP),
    n: Optional[str] = typer.Option(None, "--n", help=LEVEL_HELP),
    k_max: Optional[float] = typer.Option(None, "--k-max", help="Half-width of the momentum grid"),
    points: Optional[int] = typer.Option(None, "--points", help="Number of grid points (power of two)"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
    config_file: Optional[Path] = typer.Option(None, "--config", help="key=value configuration file"),
    workers: Optional[int] = typer.Option(None, "--workers", help="Concurrent (α, n) jobs"),
):
    """Write E_n(k, α) CSVs with exclusion windows recorded in sidecar JSON.

    Output is always CSV plus the JSON sidecar; --format and --tol belong to verify and figure.
    """
    config = _load_config(config_file, alpha=alpha, n=n, k_max=k_max, points=points, out_dir=out, workers=workers)
    _write(config, lambda: run_jobs(config, lambda a, level: write_energy_files(config, a, level),
                                    config_pairs(config)), "energy")


def _render_report(report: VerificationReport) -> None:
    table = Table(title="Verification summary", show_header=True, header_style="bold cyan")
    table.add_column("Check group")
    table.add_column("Passed", justify="right")
    table.add_column("Total", justify="right")
    for kind, counts in report.summary_by_kind().items():
        style = "green" if counts['passed'] == counts['total'] else "red"
        table.add_row(kind, f"[{style}]{counts['passed']}[/{style}]", str(counts['total']))
    console.print(table)

    failing = report.failing()
    if failing:
        failures = Table(title="Failing checks", header_style="bold red")
        failures.add_column("Check")
        failures.add_column("Residual", justify="right")
        failures.add_column("Tolerance", justify="right")
        for record in failing:
            failures.add_row(record.name, f"{record.residual:.3e}", f"{record.tolerance:.1e}")
        console.print(failures)

    if report.e2_comparison:
        comparison = Table(title="Printed E_2 against H φ_2 / φ_2", header_style="bold magenta")
        comparison.add_column("α", justify="right")
        comparison.add_column("Agreeing k", justify="right")
        comparison.add_column("Max deviation", justify="right")
        comparison.add_column("Max deviation, exponent α/2+1", justify="right")
        for entry in report.e2_comparison:
            comparison.add_row(
                f"{entry['alpha']:g}",
                f"{entry['agreeing_points']}/{entry['points']}",
                f"{entry['max_deviation']:.3e}",
                f"{entry['max_corrected_deviation']:.3e}",
            )
        console.print(comparison)


@app.command()
def verify(
    alpha: Optional[str] = typer.Option(None, "--alpha", help=ALPHA_HELP),
    n: Optional[str] = typer.Option(None, "--n", help=LEVEL_HELP),
    k_max: Optional[float] = typer.Option(None, "--k-max", help="Half-width of the momentum grid"),
    points: Optional[int] = typer.Option(None, "--points", help="Number of grid points (power of two)"),
    tol: Optional[float] = typer.Option(None, "--tol", help="Replace every check tolerance by this value"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
    fmt: Optional[str] = typer.Option(None, "--format", help="json writes verification_report.json"),
    verbatim_e2: bool = typer.Option(False, "--paper-verbatim-e2", help="Report where the printed E_2 departs from the derived one"),
    config_file: Optional[Path] = typer.Option(None, "--config", help="key=value configuration file"),
    workers: Optional[int] = typer.Option(None, "--workers", help="Concurrent check jobs"),
):
    """Run the identity suite; exit code 1 when any check fails."""
    config = _load_config(
        config_file,
        defaults={'formats': ("json",)},
        alpha=alpha, n=n, fmt=fmt, k_max=k_max, points=points, tol=tol, out_dir=out, workers=workers,
        verbatim_e2=verbatim_e2 or None,
    )
    suite = VerificationSuite(config, engine_version=__version__)

    tracker = StepTracker("Verify fractional factorization")
    for kind in suite.groups():
        tracker.add(kind.value, kind.value.replace("_", " "))

    try:
        report = suite.run(progress=tracker.update)
    except FracladderError as e:
        _fail("Error", str(e), EXIT_BAD_CONFIG)
    console.print(tracker.render())
    _render_report(report)

    if "json" in config.formats:
        _prepare_out_dir(config)
        path = config.out_dir / REPORT_FILENAME
        try:
            report.save(path)
        except OSError as e:
            _fail("I/O Error", f"cannot write {path}: {e}", EXIT_IO)
        console.print(f"[dim]Report written to {path}[/dim]")

    if not report.passed:
        console.print(f"\n[bold red]{len(report.failing())} check(s) failed.[/bold red]")
        raise typer.Exit(EXIT_VERIFY_FAILED)
    console.print("\n[bold green]All checks passed.[/bold green]")


@app.command()
def figure(
    alpha: Optional[str] = typer.Option(None, "--alpha", help=ALPHA_HELP),
    k_max: Optional[float] = typer.Option(None, "--k-max", help="Half-width of the momentum grid"),
    points: Optional[int] = typer.Option(None, "--points", help="Number of grid points (power of two)"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
    fmt: Optional[str] = typer.Option(None, "--format", help="Any of csv, svg; figure_metadata.json is always written"),
    overlay: bool = typer.Option(False, "--overlay", help="Add the conventional oscillator curves"),
    config_file: Optional[Path] = typer.Option(None, "--config", help="key=value configuration file"),
):
    """Render the six wavefunction and energy panels with their CSVs."""
    config = _load_config(
        config_file,
        defaults={'alphas': FIGURE_ALPHAS, 'formats': ("svg", "csv")},
        alpha=alpha, fmt=fmt, k_max=k_max, points=points, out_dir=out, overlay=overlay or None,
    )
    _write(config, lambda: write_figure(config), "figure")


@app.command()
def info(
    alpha: Optional[str] = typer.Option(None, "--alpha", help=ALPHA_HELP),
    config_file: Optional[Path] = typer.Option(None, "--config", help="key=value configuration file"),
):
    """Show settings, fractional symbols, nodes of φ_2 and the printed E_2 comparison."""
    config = _load_config(config_file, alpha=alpha)

    console.print(f"[bold]fracladder[/bold] {__version__}\n")

    settings = Table(title="Settings", show_header=True, header_style="bold cyan")
    settings.add_column("Setting")
    settings.add_column("Value", justify="right")
    for name, value in FracladderConfig.get_all_settings().items():
        settings.add_row(name, str(value))
    console.print(settings)

    symbols = Table(title="Momentum symbols", header_style="bold cyan")
    symbols.add_column("α", justify="right")
    symbols.add_column("Order")
    symbols.add_column("Multiplier")
    for a in config.alphas:
        for key, symbol in symbol_table(a).items():
            term = symbol.multiplier
            sgn = " sgn k" if term.parity.value else ""
            symbols.add_row(f"{a:g}", key, f"{complex(term.coeff):g} |k|^{term.power:g}{sgn}")
    console.print(symbols)

    analysis = Table(title="φ_2 node and printed E_2", header_style="bold cyan")
    analysis.add_column("α", justify="right")
    analysis.add_column("Node of φ_2", justify="right")
    analysis.add_column("(α/4)^(2/(α+2))", justify="right")
    analysis.add_column("Printed E_2 agrees", justify="right")
    analysis.add_column("Max deviation", justify="right")
    k = energy_grid(config)
    for a in config.alphas:
        nodes = node_locations(a, 2, max_level=config.max_level)
        comparison = compare_printed_e2(a, k[k > 0])
        analysis.add_row(
            f"{a:g}",
            ", ".join(f"{node:.10f}" for node in nodes) or "-",
            f"{(a / 4.0) ** (2.0 / (a + 2.0)):.10f}",
            f"{int(np.count_nonzero(comparison.agreement))}/{len(comparison.k)}",
            f"{comparison.max_deviation():.3e}",
        )
    console.print(analysis)


def main():
    app()


if __name__ == "__main__":
    main()
