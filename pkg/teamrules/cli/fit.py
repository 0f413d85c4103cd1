import logging
import pathlib
from typing import Optional

import click
from rich.console import Console
from rich.table import Table

from teamrules.cli.util import dump_resolved, load_experiment
from teamrules.harness.pipeline import run_single
from teamrules.harness.report import emit_results

logger = logging.getLogger(__name__)

console = Console()


@click.command()
@click.option("--config", "config_path", type=click.Path(path_type=pathlib.Path))
@click.option("--preset", type=click.STRING, help="Name of a shipped preset")
@click.option("--seed", type=click.IntRange(min=0), default=None)
@click.option("--out", type=click.Path(file_okay=False, path_type=pathlib.Path))
@click.option("--no-timing", is_flag=True, default=False, help="Write 0 wall times")
def fit(
    config_path: Optional[pathlib.Path],
    preset: Optional[str],
    seed: Optional[int],
    out: Optional[pathlib.Path],
    no_timing: bool,
):
    """Fit one advising model and evaluate it next to the simulated human.

    Uses the first behavior, mode, alpha and seed of the config's sweep axes.
    """
    config = load_experiment(config_path, preset, seed, out)
    dump_resolved(config)
    cell, human = run_single(config, timing=not no_timing)

    out_dir = config.output
    (out_dir / "rules.txt").write_text(cell.fit.rules_text + "\n")
    cell.fit.serialize(out_dir / "fit.json")
    emit_results(
        [cell.record],
        out_dir / "results.csv",
        config=config.model_dump(mode="json"),
        human=[human],
    )

    record = cell.record
    console.print(
        f"[bold]{record.mode}[/bold] on {record.dataset} ({record.adb_mode}), "
        f"alpha={record.alpha:g}, seed={record.seed}"
    )
    console.print(cell.fit.rules_text or "[dim](empty rule set)[/dim]")
    table = Table(title="Test-set team loss")
    for name in ("TTL", "TDL", "CL", "Human", "Shown", "Contradicting"):
        table.add_column(name, justify="right")
    table.add_row(
        f"{record.ttl:.4f}",
        f"{record.tdl:.4f}",
        f"{record.cl:.4f}",
        f"{human.ttl:.4f}",
        str(record.recommendations),
        str(record.contradictions),
    )
    console.print(table)
    return 0
