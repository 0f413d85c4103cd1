"""Results files and console summaries.

Results are a CSV with one row per (configuration, seed) cell, written
with round-trip float formatting, plus a JSON sidecar carrying the
resolved config, the human-alone references and any failed cells.
"""

import logging
import pathlib
from typing import Any, Optional

import numpy as np
import pandas as pd
from pydantic import Field
from rich.console import Console
from rich.table import Table

from teamrules.harness.stats import mean_se, paired_ttest
from teamrules.onto import (
    RESULT_COLUMNS,
    BasePydanticModel,
    CellFailure,
    DataError,
    ExperimentRecord,
    HumanReference,
    SearchMode,
)

logger = logging.getLogger(__name__)

COLUMN_DOCS = {
    "dataset": "dataset id",
    "adb_mode": "accept behavior of the simulated human",
    "mode": "search mode of the advising model",
    "alpha": "reconciliation cost per contradiction",
    "seed": "scenario seed",
    "discretion_kind": "oracle, learned or coin discretion model",
    "discretion_train_size": "rows the discretion model was fitted on",
    "discretion_accuracy": "discretion model holdout accuracy",
    "tdl": "team decision loss: error rate of final decisions on test rows",
    "cl": "contradiction loss: alpha * contradictions / test rows",
    "ttl": "total team loss: tdl + cl",
    "contradictions": "shown recommendations that differ from the human decision",
    "recommendations": "shown recommendations",
    "wall_time_ms": "fit and simulation time in ms (0 when timing is off)",
}

STRONG, WEAK = 0.005, 0.05


class ResultsSidecar(BasePydanticModel):
    columns: dict[str, str] = Field(default_factory=lambda: dict(COLUMN_DOCS))
    n_records: int = 0
    config: Optional[dict[str, Any]] = None
    human: list[HumanReference] = Field(default_factory=list)
    failures: list[CellFailure] = Field(default_factory=list)


def sidecar_path(path: pathlib.Path) -> pathlib.Path:
    return path.with_suffix(".json")


def emit_results(
    records: list[ExperimentRecord],
    path: str | pathlib.Path,
    config: Optional[dict[str, Any]] = None,
    human: Optional[list[HumanReference]] = None,
    failures: Optional[list[CellFailure]] = None,
) -> tuple[pathlib.Path, pathlib.Path]:
    """Write the results CSV and its JSON sidecar.

    Args:
        records: Non-empty list of records, written in the given order.
        path: CSV path; the sidecar goes next to it with a ``.json`` suffix.
        config: Resolved config dump to embed.
        human: Human-alone references.
        failures: Failed cells.

    Returns:
        tuple: CSV path and sidecar path.
    """
    if not records:
        raise DataError("no records to emit")
    for r in records:
        if r.ttl != r.tdl + r.cl:
            raise DataError(f"record {r.row()} violates ttl = tdl + cl")
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame([r.row() for r in records], columns=RESULT_COLUMNS)
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    sidecar = ResultsSidecar(
        n_records=len(records),
        config=config,
        human=human or [],
        failures=failures or [],
    )
    json_path = sidecar_path(path)
    sidecar.serialize(json_path)
    logger.info(f"Wrote {len(records)} records to {path} and {json_path}")
    return path, json_path


def _native(value):
    return value.item() if isinstance(value, np.generic) else value


def load_results(path: str | pathlib.Path) -> list[ExperimentRecord]:
    path = pathlib.Path(path)
    if not path.is_file():
        raise DataError(f"no such results file: {path}")
    frame = pd.read_csv(path, float_precision="round_trip")
    if list(frame.columns) != RESULT_COLUMNS:
        raise DataError(f"{path} does not have the results columns {RESULT_COLUMNS}")
    return [
        ExperimentRecord(**{k: _native(v) for k, v in row.items()})
        for row in frame.to_dict("records")
    ]


def load_sidecar(path: str | pathlib.Path) -> Optional[ResultsSidecar]:
    json_path = sidecar_path(pathlib.Path(path))
    if not json_path.is_file():
        return None
    return ResultsSidecar.load(json_path)


def records_frame(records: list[ExperimentRecord]) -> pd.DataFrame:
    return pd.DataFrame([r.row() for r in records], columns=RESULT_COLUMNS)


def _marker(tr: pd.Series, other: pd.Series, strong: str, weak: str) -> str:
    paired = pd.concat([tr, other], axis=1, join="inner").dropna()
    if len(paired) < 2:
        return ""
    p = paired_ttest(paired.iloc[:, 0], paired.iloc[:, 1])
    if p < STRONG:
        return strong
    return weak if p < WEAK else ""


def comparison_frame(
    records: list[ExperimentRecord], human: Optional[list[HumanReference]] = None
) -> pd.DataFrame:
    """Mean test TTL per mode at alpha = 0, one row per dataset and behavior.

    Markers on the teamrules column: ``*``/``**`` when it beats hyrs with
    paired p < 0.05 / 0.005, and a diamond when it beats brs with p < 0.05.
    """
    frame = records_frame(records)
    frame = frame[frame["alpha"] == 0.0]
    human_frame = pd.DataFrame(
        [h.model_dump(mode="json") for h in human or []],
        columns=["dataset", "adb_mode", "seed", "ttl"],
    )
    rows = []
    for (dataset, adb), group in frame.groupby(["dataset", "adb_mode"], sort=False):
        by_mode = {
            mode: g.groupby("seed")["ttl"].mean() for mode, g in group.groupby("mode")
        }
        row: dict[str, Any] = {"dataset": dataset, "adb_mode": adb}
        h = human_frame[
            (human_frame["dataset"] == dataset) & (human_frame["adb_mode"] == adb)
        ]
        row["human"] = float(h["ttl"].mean()) if len(h) else np.nan
        for mode in SearchMode:
            row[mode.value] = (
                float(by_mode[mode.value].mean()) if mode.value in by_mode else np.nan
            )
        marker = ""
        tr = by_mode.get(SearchMode.TEAMRULES.value)
        if tr is not None:
            if SearchMode.HYRS_ADAPTED.value in by_mode:
                marker += _marker(tr, by_mode[SearchMode.HYRS_ADAPTED.value], "**", "*")
            if SearchMode.BRS_LIKE.value in by_mode:
                marker += _marker(tr, by_mode[SearchMode.BRS_LIKE.value], "◇", "◇")
        row["marker"] = marker
        rows.append(row)
    return pd.DataFrame(rows)


def sweep_frame(records: list[ExperimentRecord]) -> pd.DataFrame:
    """Per-cell means over seeds: TTL, TDL, CL, contradictions, recommendations."""
    frame = records_frame(records)
    keys = [
        "dataset",
        "adb_mode",
        "mode",
        "alpha",
        "discretion_kind",
        "discretion_train_size",
    ]
    agg = frame.groupby(keys, sort=False).agg(
        ttl=("ttl", "mean"),
        ttl_se=("ttl", lambda s: mean_se(s)[1]),
        tdl=("tdl", "mean"),
        cl=("cl", "mean"),
        contradictions=("contradictions", "mean"),
        recommendations=("recommendations", "mean"),
        discretion_accuracy=("discretion_accuracy", "mean"),
        seeds=("seed", "count"),
    )
    return agg.reset_index()


def _fmt(value: float) -> str:
    return "" if pd.isna(value) else f"{value:.3f}"


def print_comparison(frame: pd.DataFrame, console: Optional[Console] = None) -> None:
    console = console or Console()
    table = Table(title="Average total team loss (alpha = 0)")
    table.add_column("Dataset", style="orange1")
    table.add_column("Behavior")
    table.add_column("Human", justify="right")
    for mode in SearchMode:
        table.add_column(mode.value, justify="right")
    for _, row in frame.iterrows():
        cells = [_fmt(row[m.value]) for m in SearchMode]
        cells[0] = f"{cells[0]}{row['marker']}"
        table.add_row(
            str(row["dataset"]), str(row["adb_mode"]), _fmt(row["human"]), *cells
        )
    console.print(table)


def print_sweep(frame: pd.DataFrame, console: Optional[Console] = None) -> None:
    console = console or Console()
    table = Table(title="Sweep summary (means over seeds)")
    for name in (
        "dataset",
        "adb_mode",
        "mode",
        "alpha",
        "discretion_kind",
        "discretion_train_size",
    ):
        table.add_column(name)
    for name in (
        "ttl",
        "ttl_se",
        "tdl",
        "cl",
        "contradictions",
        "recommendations",
        "discretion_accuracy",
    ):
        table.add_column(name, justify="right")
    for _, row in frame.iterrows():
        table.add_row(
            str(row["dataset"]),
            str(row["adb_mode"]),
            str(row["mode"]),
            f"{row['alpha']:g}",
            str(row["discretion_kind"]),
            str(row["discretion_train_size"]),
            _fmt(row["ttl"]),
            _fmt(row["ttl_se"]),
            _fmt(row["tdl"]),
            _fmt(row["cl"]),
            f"{row['contradictions']:.1f}",
            f"{row['recommendations']:.1f}",
            _fmt(row["discretion_accuracy"]),
        )
    console.print(table)
