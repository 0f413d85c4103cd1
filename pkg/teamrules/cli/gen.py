import logging
import pathlib

import click
from rich.console import Console

from teamrules.onto import BasePydanticModel
from teamrules.tool.dataspace import gen_checkers, gen_gaussian, write_csv

logger = logging.getLogger(__name__)

console = Console()

GENERATORS = {"checkers": gen_checkers, "gaussian": gen_gaussian}


class GeneratedDataset(BasePydanticModel):
    """Generating config written next to a synthetic CSV."""

    dataset: str
    n: int
    seed: int
    feature_names: list[str]
    label_column: str = "label"
    csv: str


@click.command()
@click.argument("dataset", type=click.Choice(sorted(GENERATORS)))
@click.option("--n", "n", type=click.IntRange(min=1), default=4800, show_default=True)
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)
@click.option(
    "--out",
    type=click.Path(file_okay=False, path_type=pathlib.Path),
    default=pathlib.Path("data"),
    show_default=True,
)
def gen(dataset: str, n: int, seed: int, out: pathlib.Path):
    """Generate a synthetic dataset as CSV plus a JSON of its config."""
    raw = GENERATORS[dataset](n, seed)
    stem = f"{dataset}.n{n}.seed{seed}"
    csv_path = write_csv(raw, out / f"{stem}.csv")
    GeneratedDataset(
        dataset=dataset,
        n=n,
        seed=seed,
        feature_names=raw.feature_names,
        csv=csv_path.name,
    ).serialize(out / f"{stem}.json")
    logger.info(f"Generated {dataset} with {n} rows into {csv_path}")
    console.print(f"[green]wrote {csv_path} ({n} rows, {raw.d} features)[/green]")
    return 0
