import logging
import pathlib
from typing import Optional

import click
from rich.console import Console

from teamrules.cli.util import dump_resolved, load_experiment, resolve_jobs
from teamrules.harness.pipeline import SweepResult, sweep_alpha, sweep_discretion
from teamrules.harness.report import (
    comparison_frame,
    emit_results,
    print_comparison,
    print_sweep,
    sweep_frame,
)
from teamrules.onto import Status

logger = logging.getLogger(__name__)

console = Console()

EXIT_RUNTIME = 3


@click.command()
@click.option("--config", "config_path", type=click.Path(path_type=pathlib.Path))
@click.option("--preset", type=click.STRING, help="Name of a shipped preset")
@click.option("--seed", type=click.IntRange(min=0), default=None)
@click.option("--out", type=click.Path(file_okay=False, path_type=pathlib.Path))
@click.option("--jobs", type=click.IntRange(min=1), default=None)
@click.option("--no-timing", is_flag=True, default=False, help="Write 0 wall times")
def sweep(
    config_path: Optional[pathlib.Path],
    preset: Optional[str],
    seed: Optional[int],
    out: Optional[pathlib.Path],
    jobs: Optional[int],
    no_timing: bool,
):
    """Run the config's sweep and write results.csv plus its sidecar."""
    config = load_experiment(config_path, preset, seed, out)
    jobs = resolve_jobs(jobs, config)
    dump_resolved(config)

    result = SweepResult()
    if config.sweep.kind in ("alpha", "both"):
        result.extend(sweep_alpha(config, jobs=jobs, timing=not no_timing))
    if config.sweep.kind in ("discretion", "both"):
        result.extend(sweep_discretion(config, jobs=jobs, timing=not no_timing))

    if result.records:
        emit_results(
            result.records,
            config.output / "results.csv",
            config=config.model_dump(mode="json"),
            human=result.human,
            failures=result.failures,
        )
        if any(r.alpha == 0.0 for r in result.records):
            print_comparison(comparison_frame(result.records, result.human), console)
        print_sweep(sweep_frame(result.records), console)

    if result.status == Status.FAILED:
        console.print(f"[red]{len(result.failures)} cell(s) failed:[/red]")
        for failure in result.failures:
            where = f"{failure.dataset}/{failure.adb_mode}/seed={failure.seed}"
            if failure.mode is not None:
                where += f"/{failure.mode}/alpha={failure.alpha:g}"
            console.print(f"  {where}: {failure.reason}")
        return EXIT_RUNTIME
    return 0
