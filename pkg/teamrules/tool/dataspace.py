"""Datasets: synthetic generators, CSV ingestion, binarization and splitting.

Raw tables are turned into boolean predicate columns by quantile
thresholds, which is the substrate rule mining and coverage work on.
"""

import logging
import pathlib

import numpy as np
import pandas as pd
from pydantic import Field
from scipy.stats import norm

from teamrules.onto import (
    BinarizedDataset,
    DataError,
    Direction,
    Predicate,
    RawDataset,
    SplitSpec,
    evaluate_predicates,
)
from teamrules.tool.onto import Tool

logger = logging.getLogger(__name__)

LABEL_COLUMN = "label"
GAUSSIAN_GROUPS = ((0, 4), (4, 8), (8, 16), (16, 20))


class Binarizer(Tool):
    """Quantile binarization of raw features into paired threshold predicates.

    Attributes:
        bins_per_feature: Number of interior quantile thresholds per feature.
    """

    bins_per_feature: int = Field(
        default=9, ge=1, description="Quantile thresholds per continuous feature"
    )

    def __init__(self, **kwargs):
        super().__init__(**kwargs)

    def derive_predicates(self, raw: RawDataset) -> tuple[list[Predicate], list[str]]:
        """Compute the predicate list for ``raw`` and any warnings."""
        if raw.n == 0:
            raise DataError("empty input")
        quantiles = np.arange(1, self.bins_per_feature + 1) / (
            self.bins_per_feature + 1
        )
        predicates: list[Predicate] = []
        warnings: list[str] = []
        for j, name in enumerate(raw.feature_names):
            values = raw.rows[:, j]
            levels = np.unique(values)
            if levels.size < 2:
                msg = f"feature '{name}' is constant; no predicates emitted"
                logger.warning(msg)
                warnings.append(msg)
                continue
            if np.array_equal(levels, [0.0, 1.0]):
                thresholds, boolean = np.array([0.5]), True
            else:
                thresholds = np.unique(np.quantile(values, quantiles))
                # a threshold at the minimum gives an always-true GEQ column
                thresholds = thresholds[thresholds > levels[0]]
                boolean = False
            for t in thresholds:
                for direction in (Direction.GEQ, Direction.LT):
                    predicates.append(
                        Predicate(
                            feature_index=j,
                            feature_name=name,
                            direction=direction,
                            threshold=float(t),
                            boolean=boolean,
                        )
                    )
        return predicates, warnings

    def __call__(self, raw: RawDataset) -> BinarizedDataset:
        predicates, warnings = self.derive_predicates(raw)
        binarized = self.apply(raw, predicates, warnings=warnings)
        logger.info(
            f"Binarized {raw.n} rows x {raw.d} features into {binarized.m} columns"
        )
        return binarized

    @staticmethod
    def apply(
        raw: RawDataset, predicates: list[Predicate], warnings: list[str] | None = None
    ) -> BinarizedDataset:
        """Evaluate an existing predicate list on (possibly unseen) rows."""
        return BinarizedDataset(
            predicates=predicates,
            columns=evaluate_predicates(raw.rows, predicates),
            labels=raw.labels,
            source=raw,
            warnings=warnings or [],
        )


def binarize(raw: RawDataset, bins_per_feature: int) -> BinarizedDataset:
    return Binarizer(bins_per_feature=bins_per_feature)(raw)


def checkers_label(rows: np.ndarray) -> np.ndarray:
    x1, x2 = rows[:, 0], rows[:, 1]
    y = (x1 <= 1) & (x2 >= 1)
    y = y.astype(np.int64) + ((x1 >= 1) & (x2 <= 1)).astype(np.int64)
    # both terms hold only on the x = 1 boundary
    return np.minimum(y, 1)


def gen_checkers(n: int, seed: int) -> RawDataset:
    """Two i.i.d. Uniform(0, 2) features with a 2x2 checkerboard label.

    Args:
        n: Number of rows, at least 1.
        seed: Generator seed.

    Returns:
        RawDataset: Features ``x1``, ``x2``.
    """
    if n < 1:
        raise DataError(f"n must be at least 1, got {n}")
    rng = np.random.default_rng(seed)
    rows = rng.uniform(0.0, 2.0, size=(n, 2))
    return RawDataset(
        feature_names=["x1", "x2"], rows=rows, labels=checkers_label(rows)
    )


def gaussian_label(rows: np.ndarray) -> np.ndarray:
    """Label of the 20-feature Gaussian problem, medians taken over ``rows``."""
    total = rows.sum(axis=1)
    v1 = norm.pdf(rows[:, 0:2].sum(axis=1))
    v2 = sum(norm.pdf(rows[:, lo:hi].sum(axis=1)) for lo, hi in GAUSSIAN_GROUPS)
    y = ((total < 0) & (v1 > np.median(v1))) | (
        (total >= 0) & (v2 < np.median(v2))
    )
    return y.astype(np.int64)


def gen_gaussian(n: int, seed: int) -> RawDataset:
    """Twenty i.i.d. standard normal features with a mixed-complexity label.

    Below a zero feature sum the label depends on ``x1 + x2`` only; above it,
    on four group sums spanning every feature.
    """
    if n < 1:
        raise DataError(f"n must be at least 1, got {n}")
    rng = np.random.default_rng(seed)
    rows = rng.standard_normal(size=(n, 20))
    return RawDataset(
        feature_names=[f"x{d}" for d in range(1, 21)],
        rows=rows,
        labels=gaussian_label(rows),
    )


def _map_labels(
    values: pd.Series, label_column: str, positive_label: str | None
) -> np.ndarray:
    values = values.str.strip()
    levels = sorted(values.unique())
    if positive_label is not None:
        positive_label = positive_label.strip()
        if len(levels) != 2:
            raise DataError(
                f"label column '{label_column}' is not binary: "
                f"found {len(levels)} distinct values {levels}"
            )
        if positive_label not in levels:
            raise DataError(
                f"positive label '{positive_label}' not found in column "
                f"'{label_column}' (values {levels})"
            )
        return (values == positive_label).to_numpy(dtype=np.int64)
    numeric = pd.to_numeric(values, errors="coerce")
    if numeric.notna().all() and numeric.isin([0, 1]).all():
        return numeric.to_numpy(dtype=np.int64)
    if len(levels) != 2:
        raise DataError(
            f"label column '{label_column}' is not binary: "
            f"found {len(levels)} distinct values"
        )
    logger.info(f"Mapping label '{levels[1]}' to 1 and '{levels[0]}' to 0")
    return (values == levels[1]).to_numpy(dtype=np.int64)


def load_csv(
    path: str | pathlib.Path, label_column: str, positive_label: str | None = None
) -> RawDataset:
    """Read a comma-separated table with a header row into a RawDataset.

    Columns where any cell fails numeric parsing are one-hot encoded into
    ``column_value`` features over their sorted levels. Row order is kept.

    Args:
        path: CSV file.
        label_column: Name of the binary label column.
        positive_label: Label value mapped to 1 when labels are not 0/1.

    Returns:
        RawDataset: Parsed features and labels.

    Raises:
        DataError: Missing label column, non-binary labels, empty or
            non-finite cells (with row and column).
    """
    path = pathlib.Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    df = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    if label_column not in df.columns:
        raise DataError(f"label column '{label_column}' not found in {path}")

    for column in df.columns:
        empty = df[column].str.strip() == ""
        if empty.any():
            i = int(np.flatnonzero(empty.to_numpy())[0])
            raise DataError(
                f"{path}: empty cell at row {i + 1} (line {i + 2}), column '{column}'"
            )

    labels = _map_labels(df[label_column], label_column, positive_label)
    names: list[str] = []
    blocks: list[np.ndarray] = []
    for column in df.columns:
        if column == label_column:
            continue
        numeric = pd.to_numeric(df[column].str.strip(), errors="coerce")
        if numeric.isna().any():
            levels = sorted(df[column].str.strip().unique())
            for level in levels:
                names.append(f"{column}_{level}")
                blocks.append((df[column].str.strip() == level).to_numpy(float))
            continue
        values = numeric.to_numpy(dtype=np.float64)
        bad = ~np.isfinite(values)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise DataError(
                f"{path}: cannot parse '{df[column].iloc[i]}' at row {i + 1} "
                f"(line {i + 2}), column '{column}'"
            )
        names.append(column)
        blocks.append(values)

    rows = np.column_stack(blocks) if blocks else np.empty((len(df), 0))
    logger.info(f"Loaded {path}: {rows.shape[0]} rows, {len(names)} features")
    return RawDataset(feature_names=names, rows=rows, labels=labels)


def write_csv(raw: RawDataset, path: str | pathlib.Path) -> pathlib.Path:
    """Write features plus a ``label`` column; round-trips through load_csv."""
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df = pd.DataFrame(raw.rows, columns=raw.feature_names)
    df[LABEL_COLUMN] = raw.labels
    df.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    return path


def split(raw: RawDataset, spec: SplitSpec) -> tuple[np.ndarray, np.ndarray]:
    """Seeded shuffle split into sorted, disjoint train and test indices."""
    n = raw.n
    if n < 2:
        raise DataError(f"cannot split {n} rows; at least 2 are required")
    rng = np.random.default_rng(spec.seed)
    order = rng.permutation(n)
    n_train = min(max(int(round(n * spec.train_fraction)), 1), n - 1)
    return np.sort(order[:n_train]), np.sort(order[n_train:])
