from __future__ import annotations

import json
from collections.abc import Iterator
from contextlib import contextmanager

import click

from commexp.cli.json_io import (
    emit_report,
    named_pair_to_json,
    parse_pair,
    record_to_json,
)
from commexp.cli.selftest import (
    DEFAULT_SEEDS,
    fault_injected_tolerances,
    run_selftest,
)
from commexp.constants import (
    DEFAULT_T_MAX,
    EXIT_INVARIANT,
    EXIT_VALIDATION,
    Tolerances,
)
from commexp.errors import CommexpError, InvariantViolation, OutOfRangeError
from commexp.m_analysis.m_analysis import (
    analyze,
    max_sweep_deviation,
    sweep_records,
)
from commexp.m_catalog.m_catalog import catalog
from commexp.utils.utils import configure_logging

_tmax_option = click.option(
    "--tmax",
    type=click.IntRange(min=1),
    default=DEFAULT_T_MAX,
    show_default=True,
    help="Largest t of the sweep.",
)
_tol_option = click.option(
    "--tol",
    type=float,
    default=Tolerances.DEFAULT.eps_entry,
    show_default=True,
    help="Entrywise comparison threshold (eps_entry).",
)
_workers_option = click.option(
    "--workers",
    type=click.IntRange(min=1),
    default=1,
    show_default=True,
    help="Threads used by the sweeps.",
)
_verbose_option = click.option(
    "-v", "--verbose", count=True, help="Log info (-v) or debug (-vv) to stderr."
)


@contextmanager
def _exit_codes() -> Iterator[None]:
    # validation problems exit with 2, contradictions and overflow with 3
    try:
        yield
    except (InvariantViolation, OutOfRangeError) as exc:
        click.echo(f"error: {exc}", err=True)
        raise click.exceptions.Exit(EXIT_INVARIANT) from exc
    except (CommexpError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        raise click.exceptions.Exit(EXIT_VALIDATION) from exc


@click.group()
@click.version_option(package_name="commexp")
def cli():
    """Checks exponential identities for pairs of complex matrices up to 3 x 3."""


@cli.command(name="analyze")
@click.argument("source", metavar="INPUT", type=click.File("r"))
@_tmax_option
@_tol_option
@_workers_option
@_verbose_option
def analyze_command(source, tmax, tol, workers, verbose):
    """Analyze the pair {"A": ..., "B": ...} read from INPUT ("-" for stdin).

    Exits with 3 when two independent checks disagree.
    """
    configure_logging(verbose)
    with _exit_codes():
        a, b = parse_pair(source.read())
        tolerances = Tolerances.custom(eps_entry=tol)
        report = analyze(a, b, tmax, tolerances, workers)
    click.echo(emit_report(report))
    if not report.consistent:
        raise click.exceptions.Exit(EXIT_INVARIANT)


@cli.command(name="sweep")
@click.argument("source", metavar="INPUT", type=click.File("r"))
@_tmax_option
@_tol_option
@_workers_option
@_verbose_option
def sweep_command(source, tmax, tol, workers, verbose):
    """Print one JSON line per t in [1, TMAX] with the identity's deviation."""
    logger = configure_logging(verbose)
    with _exit_codes():
        a, b = parse_pair(source.read())
        tolerances = Tolerances.custom(eps_entry=tol)
        records = sweep_records(a, b, range(1, tmax + 1), tolerances, workers)
        logger.info("largest deviation %.3g", max_sweep_deviation(records))
    for record in records:
        click.echo(json.dumps(record_to_json(record)))


@cli.command(name="catalog")
@click.option("--list", "list_names", is_flag=True, help="Print the entry names.")
@click.option("--name", help="Print one entry with its expected facts.")
def catalog_command(list_names, name):
    """List the example pairs or print one of them."""
    if list_names == (name is not None):
        raise click.UsageError("pass exactly one of --list and --name")
    entries = catalog()
    if list_names:
        click.echo(json.dumps(entries.names()))
        return
    if name not in entries:
        click.echo(f"error: unknown catalog entry {name!r}", err=True)
        raise click.exceptions.Exit(EXIT_VALIDATION)
    click.echo(json.dumps(named_pair_to_json(entries[name]), indent=2))


@cli.command(name="selftest")
@click.option(
    "--seeds",
    type=click.IntRange(min=1),
    default=DEFAULT_SEEDS,
    show_default=True,
    help="Seeds per randomized suite.",
)
@_tmax_option
@click.option("--inject-fault", is_flag=True, hidden=True)
@_verbose_option
def selftest_command(seeds, tmax, inject_fault, verbose):
    """Run the invariant suites and print {"pass", "fail", "details"}."""
    configure_logging(verbose)
    tolerances = fault_injected_tolerances() if inject_fault else Tolerances.DEFAULT
    with _exit_codes():
        summary = run_selftest(seeds, tmax, tolerances)
    click.echo(json.dumps(summary.to_dict(), indent=2))
    if not summary.ok:
        raise click.exceptions.Exit(EXIT_INVARIANT)


def main():
    cli(prog_name="commexp")
