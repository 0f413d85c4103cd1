import pathlib

import click
from rich.console import Console

from teamrules.harness.report import (
    comparison_frame,
    load_results,
    load_sidecar,
    print_comparison,
    print_sweep,
    sweep_frame,
)

console = Console()


@click.command()
@click.argument(
    "results",
    type=click.Path(exists=True, dir_okay=False, path_type=pathlib.Path),
)
def report(results: pathlib.Path):
    """Re-summarize an existing results CSV."""
    records = load_results(results)
    sidecar = load_sidecar(results)
    human = sidecar.human if sidecar is not None else []
    if any(r.alpha == 0.0 for r in records):
        print_comparison(comparison_frame(records, human), console)
    print_sweep(sweep_frame(records), console)
    if sidecar is not None and sidecar.failures:
        console.print(f"[red]{len(sidecar.failures)} cell(s) failed in this run[/red]")
    return 0
