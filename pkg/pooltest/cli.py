"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or domain error, 3 I/O error.
"""
import functools
import logging
from pathlib import Path
from typing import Callable, Optional

import click

from pooltest.config import Settings, configure_logging, load_settings
from pooltest.errors import IO_EXIT_CODE, DomainError, PoolingError
from pooltest.models import SchemeId, as_prevalence, as_scheme
from pooltest.renderers.tables import (
    FORMATS,
    render_cost_point,
    render_distribution,
    render_optimal,
    render_ratio,
    render_reports,
    render_simulation,
    write_frame,
)
from pooltest.services.executor import enumerate_tests_distribution, simulate_expected_tests
from pooltest.services.figures import FIGURES, figure_tables
from pooltest.services.optimizer import optimal_cost_ratio, optimal_group_size
from pooltest.services.schemes import cost_point, tests_distribution_modified_dorfman
from pooltest.services.verifier import verify_all
from pooltest.utils.text import companion_path


logger = logging.getLogger(__name__)

SCHEME_CHOICES = click.Choice([scheme.value for scheme in SchemeId])
METHOD_CHOICES = click.Choice(["brute-force", "closed-form", "continuous"])
FORMAT_OPTION = click.option("--format", "fmt", type=click.Choice(FORMATS), default="csv", show_default=True)
OUTPUT_OPTION = click.option("--output", type=click.Path(dir_okay=False), default=None, help="Write to PATH instead of stdout.")


def _handle_errors(command: Callable) -> Callable:
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return command(*args, **kwargs)
        except PoolingError as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(exc.exit_code)
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(IO_EXIT_CODE)

    return wrapper


def _emit(text: str, output: Optional[str]) -> None:
    if output is None:
        click.echo(text, nl=False)
        return
    with open(output, "w", newline="", encoding="utf-8") as handle:
        handle.write(text)
    logger.info("wrote %s", output)


def _settings() -> Settings:
    return click.get_current_context().find_object(Settings)


@click.group()
@click.option("--verbose", is_flag=True, help="Log at DEBUG level on stderr.")
@click.pass_context
def main(ctx: click.Context, verbose: bool) -> None:
    """Expected testing cost and optimal group size for pooled testing schemes."""
    try:
        settings = load_settings()
    except DomainError as exc:
        click.echo(f"error: {exc}", err=True)
        ctx.exit(exc.exit_code)
    configure_logging("DEBUG" if verbose else settings.log_level)
    ctx.obj = settings


@main.command("cost")
@click.option("--scheme", type=SCHEME_CHOICES, required=True)
@click.option("--n", "n", type=int, required=True)
@click.option("--p", "p", type=float, required=True)
@FORMAT_OPTION
@OUTPUT_OPTION
@_handle_errors
def cmd_cost(scheme: str, n: int, p: float, fmt: str, output: Optional[str]) -> None:
    """Expected tests per item for one scheme, group size and prevalence."""
    _emit(render_cost_point(cost_point(scheme, n, p), fmt), output)


@main.command("distribution")
@click.option("--scheme", type=SCHEME_CHOICES, default="D", show_default=True)
@click.option("--n", "n", type=int, required=True)
@click.option("--p", "p", type=float, required=True)
@FORMAT_OPTION
@OUTPUT_OPTION
@_handle_errors
def cmd_distribution(scheme: str, n: int, p: float, fmt: str, output: Optional[str]) -> None:
    """Law of the number of tests per group (closed form for D, enumeration otherwise)."""
    scheme = as_scheme(scheme)
    prevalence = as_prevalence(p)
    if scheme is SchemeId.D and n >= 2:
        distribution = tests_distribution_modified_dorfman(n, prevalence)
    else:
        distribution = sorted(enumerate_tests_distribution(scheme, n, prevalence).items())
    _emit(render_distribution(scheme, n, prevalence.p, distribution, fmt), output)


@main.command("optimal")
@click.option("--scheme", type=SCHEME_CHOICES, required=True)
@click.option("--p", "p", type=float, required=True)
@click.option("--method", type=METHOD_CHOICES, default="closed-form", show_default=True)
@FORMAT_OPTION
@OUTPUT_OPTION
@_handle_errors
def cmd_optimal(scheme: str, p: float, method: str, fmt: str, output: Optional[str]) -> None:
    """Optimal group size by brute force, closed-form candidates or the continuous minimizer."""
    config = optimal_group_size(scheme, p, method=method.replace("-", "_"))
    _emit(render_optimal(config, fmt), output)


@main.command("ratio")
@click.option("--p", "p", type=float, required=True)
@FORMAT_OPTION
@OUTPUT_OPTION
@_handle_errors
def cmd_ratio(p: float, fmt: str, output: Optional[str]) -> None:
    """Optimal modified Dorfman cost over optimal Sterrett cost."""
    _emit(render_ratio(p, optimal_cost_ratio(p), fmt), output)


@main.command("simulate")
@click.option("--scheme", type=SCHEME_CHOICES, required=True)
@click.option("--n", "n", type=int, required=True)
@click.option("--p", "p", type=float, required=True)
@click.option("--reps", type=int, required=True)
@click.option("--seed", type=int, default=None, help="Master seed; defaults to POOLTEST_SEED.")
@click.option("--workers", type=int, default=None, help="Threads; defaults to POOLTEST_WORKERS.")
@FORMAT_OPTION
@OUTPUT_OPTION
@_handle_errors
def cmd_simulate(
    scheme: str,
    n: int,
    p: float,
    reps: int,
    seed: Optional[int],
    workers: Optional[int],
    fmt: str,
    output: Optional[str],
) -> None:
    """Monte Carlo estimate of the expected tests per item."""
    settings = _settings()
    estimate = simulate_expected_tests(
        scheme,
        n,
        p,
        replications=reps,
        seed=settings.seed if seed is None else seed,
        workers=settings.workers if workers is None else workers,
    )
    _emit(render_simulation(estimate, fmt), output)


@main.command("verify")
@click.option("--grid-points", type=int, default=500, show_default=True)
@click.option("--workers", type=int, default=None, help="Threads; defaults to POOLTEST_WORKERS.")
@FORMAT_OPTION
@OUTPUT_OPTION
@_handle_errors
def cmd_verify(grid_points: int, workers: Optional[int], fmt: str, output: Optional[str]) -> None:
    """Grid checks of every inequality behind the optimal group size results."""
    settings = _settings()
    reports = verify_all(grid_points, workers=settings.workers if workers is None else workers)
    _emit(render_reports(reports, fmt), output)
    failed = [report.claim_id for report in reports if not report.passed]
    if failed:
        logger.warning("failed claims: %s", ", ".join(failed))
        click.get_current_context().exit(1)


@main.command("figures")
@click.option("--figure", "which", type=click.Choice([str(k) for k in FIGURES]), required=True)
@click.option("--grid-points", type=int, default=500, show_default=True)
@click.option("--output", type=click.Path(dir_okay=False), default=None, help="CSV path; defaults to figure<k>.csv.")
@_handle_errors
def cmd_figures(which: str, grid_points: int, output: Optional[str]) -> None:
    """CSV data for figures 1-4 (figure 4 also writes <stem>_brace.csv)."""
    path = Path(output or f"figure{which}.csv")
    for suffix, frame in figure_tables(int(which), grid_points).items():
        written = write_frame(frame, companion_path(path, suffix))
        logger.info("wrote %s (%d rows)", written, len(frame))
