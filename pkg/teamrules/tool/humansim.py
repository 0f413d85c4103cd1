"""Simulated human partners.

A human is described by a BehaviorSpec: regions of the instance space with
a fixed decision accuracy, and an accept behavior (rational, neutral or
irrational) for contradicting advice. On real data the regions come from a
logistic surrogate fitted on an excluded slice of the training rows.
"""

import logging
import warnings
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from sklearn.exceptions import ConvergenceWarning
from sklearn.linear_model import LogisticRegression
from sklearn.preprocessing import StandardScaler

from teamrules.onto import (
    AccuracyRegion,
    AdbMode,
    BandRegion,
    BasePydanticModel,
    BehaviorError,
    BehaviorSpec,
    Comparison,
    FloatArray,
    HumanProfile,
    IntArray,
    RawDataset,
    RegionSpec,
)

logger = logging.getLogger(__name__)


class Band(BaseModel):
    """Human accuracy on rows with surrogate confidence in (lo, hi].

    ``accuracy=None`` means the surrogate's own decision is used there.
    """

    model_config = ConfigDict(frozen=True)

    lo: float = Field(ge=0.0, le=1.0)
    hi: float = Field(ge=0.0, le=1.0)
    accuracy: Optional[float] = Field(default=None, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _ordered(self):
        if self.lo >= self.hi:
            raise ValueError(f"band needs lo < hi, got ({self.lo}, {self.hi})")
        return self


BAND_PRESETS: dict[str, list[Band]] = {
    "two-level": [
        Band(lo=0.0, hi=0.5, accuracy=1.0),
        Band(lo=0.5, hi=1.0, accuracy=0.5),
    ],
    "adult": [
        Band(lo=0.0, hi=0.4, accuracy=1.0),
        Band(lo=0.4, hi=0.5, accuracy=None),
        Band(lo=0.5, hi=0.8, accuracy=0.5),
        Band(lo=0.8, hi=1.0, accuracy=None),
    ],
}


def region_assignment(raw: RawDataset, spec: BehaviorSpec) -> np.ndarray:
    """Index of the accuracy region each row falls into.

    Raises:
        BehaviorError: A row is matched by no region or by several.
    """
    masks = np.column_stack([r.region.evaluate(raw) for r in spec.accuracy_regions])
    counts = masks.sum(axis=1)
    if raw.n and (counts == 0).any():
        i = int(np.flatnonzero(counts == 0)[0])
        raise BehaviorError(
            f"row {i} ({_render_row(raw, i)}) is matched by no accuracy region"
        )
    if raw.n and (counts > 1).any():
        i = int(np.flatnonzero(counts > 1)[0])
        raise BehaviorError(
            f"row {i} ({_render_row(raw, i)}) is matched by {counts[i]} accuracy "
            "regions; regions must partition the data"
        )
    return masks.argmax(axis=1)


def _render_row(raw: RawDataset, i: int) -> str:
    return ", ".join(f"{f}={v:g}" for f, v in zip(raw.feature_names, raw.rows[i]))


def _surrogate_decisions(region: RegionSpec, raw: RawDataset) -> np.ndarray:
    return (region.score(raw) >= 0.5).astype(np.int64)


def simulate_decisions(raw: RawDataset, spec: BehaviorSpec, seed: int) -> np.ndarray:
    """Draw human decisions: h = y with the row's region accuracy, else 1 - y.

    Rows in a region without an accuracy take the surrogate's decision.
    One uniform draw is consumed per row regardless of region.
    """
    assignment = region_assignment(raw, spec)
    rng = np.random.default_rng(seed)
    u = rng.random(raw.n)
    y = raw.labels
    decisions = np.empty(raw.n, dtype=np.int64)
    for k, region in enumerate(spec.accuracy_regions):
        rows = assignment == k
        if not rows.any():
            continue
        if region.accuracy is None:
            decisions[rows] = _surrogate_decisions(region.region, raw)[rows]
        else:
            decisions[rows] = np.where(u[rows] < region.accuracy, y[rows], 1 - y[rows])
    return decisions


def simulate_adb(raw: RawDataset, spec: BehaviorSpec) -> np.ndarray:
    """True accept behavior for contradicting advice, deterministic per row."""
    if spec.adb_mode == AdbMode.NEUTRAL:
        return spec.neutral_region.evaluate(raw).astype(np.int64)
    assignment = region_assignment(raw, spec)
    low = spec.lowest_accuracy
    low_regions = [
        k for k, r in enumerate(spec.accuracy_regions) if r.accuracy == low
    ]
    rational = np.isin(assignment, low_regions).astype(np.int64)
    if spec.adb_mode == AdbMode.RATIONAL:
        return rational
    return 1 - rational


def record_confidence(spec: BehaviorSpec, raw: RawDataset) -> np.ndarray:
    """Calibrated self-confidence: the accuracy of the row's region.

    For surrogate-decided regions this is the surrogate's own max(p, 1 - p).
    """
    assignment = region_assignment(raw, spec)
    confidence = np.empty(raw.n, dtype=np.float64)
    for k, region in enumerate(spec.accuracy_regions):
        rows = assignment == k
        if region.accuracy is None:
            p = region.region.score(raw)[rows]
            confidence[rows] = np.maximum(p, 1.0 - p)
        else:
            confidence[rows] = region.accuracy
    return confidence


def build_profile(raw: RawDataset, spec: BehaviorSpec, seed: int) -> HumanProfile:
    return HumanProfile(
        decisions=simulate_decisions(raw, spec, seed),
        accepts=simulate_adb(raw, spec),
        confidence=record_confidence(spec, raw),
        seed=seed,
    )


class SurrogateHuman(BasePydanticModel):
    """Logistic surrogate human fitted on an excluded slice of rows.

    Attributes:
        fit_indices: Rows of the input used to fit the surrogate.
        kept_indices: Remaining rows, available for advising-model training.
        regions: Band regions with their accuracies.
        decisions: Simulated decisions for ``kept_indices`` rows.
    """

    fit_indices: IntArray
    kept_indices: IntArray
    regions: list[AccuracyRegion]
    decisions: IntArray
    coef: FloatArray
    intercept: float

    def behavior(
        self, adb_mode: AdbMode, neutral_region: Optional[RegionSpec] = None
    ) -> BehaviorSpec:
        return BehaviorSpec(
            accuracy_regions=self.regions,
            adb_mode=adb_mode,
            neutral_region=neutral_region,
        )


def fit_logistic(raw: RawDataset, seed: int) -> tuple[np.ndarray, float]:
    """Fit p(y|x) and return coefficients on the raw feature scale."""
    scaler = StandardScaler().fit(raw.rows)
    model = LogisticRegression(max_iter=1000, random_state=seed)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ConvergenceWarning)
        model.fit(scaler.transform(raw.rows), raw.labels)
    if any(issubclass(w.category, ConvergenceWarning) for w in caught):
        logger.warning(
            "Logistic surrogate did not converge; using the last iterate"
        )
    coef = model.coef_[0] / scaler.scale_
    intercept = float(model.intercept_[0] - np.dot(coef, scaler.mean_))
    return coef, intercept


def fit_surrogate_human(
    raw: RawDataset,
    holdout_fraction: float,
    band_spec: list[Band],
    seed: int,
) -> SurrogateHuman:
    """Fit a logistic surrogate on a seeded slice and assign accuracy bands.

    Args:
        raw: Training partition; the surrogate never sees other rows.
        holdout_fraction: Share of ``raw`` excluded to fit the surrogate.
        band_spec: Accuracy bands over 2|p(y|x) - 0.5|.
        seed: Seed for the slice and the decision draw.

    Returns:
        SurrogateHuman: Regions plus decisions for the remaining rows.
    """
    if not 0.0 < holdout_fraction < 1.0:
        raise BehaviorError(
            f"holdout_fraction must be in (0, 1), got {holdout_fraction}"
        )
    if not band_spec:
        raise BehaviorError("at least one accuracy band is required")
    rng = np.random.default_rng(seed)
    order = rng.permutation(raw.n)
    n_fit = min(max(int(round(raw.n * holdout_fraction)), 2), raw.n - 1)
    fit_idx, kept_idx = np.sort(order[:n_fit]), np.sort(order[n_fit:])
    fit_rows = raw.take(fit_idx)
    if np.unique(fit_rows.labels).size < 2:
        raise BehaviorError("surrogate fitting slice contains a single class")

    coef, intercept = fit_logistic(fit_rows, seed)
    regions = [
        AccuracyRegion(
            region=BandRegion(
                feature_names=list(raw.feature_names),
                coef=coef.tolist(),
                intercept=intercept,
                lo=band.lo,
                hi=band.hi,
            ),
            accuracy=band.accuracy,
        )
        for band in band_spec
    ]
    spec = BehaviorSpec(accuracy_regions=regions, adb_mode=AdbMode.RATIONAL)
    kept = raw.take(kept_idx)
    decisions = simulate_decisions(kept, spec, seed)
    logger.info(
        f"Surrogate human fitted on {n_fit} rows; "
        f"accuracy on {kept.n} kept rows: {np.mean(decisions == kept.labels):.3f}"
    )
    return SurrogateHuman(
        fit_indices=fit_idx,
        kept_indices=kept_idx,
        regions=regions,
        decisions=decisions,
        coef=coef,
        intercept=intercept,
    )


def checkers_behavior(
    adb_mode: AdbMode, neutral_region: Optional[RegionSpec] = None
) -> BehaviorSpec:
    """80% accuracy where x1 > x2, perfect elsewhere; neutral accepts x1 >= 1."""
    diff = {"x2": 1.0, "x1": -1.0}
    return BehaviorSpec(
        accuracy_regions=[
            AccuracyRegion(
                region=Comparison(weights=diff, op="<", value=0.0), accuracy=0.8
            ),
            AccuracyRegion(
                region=Comparison(weights=diff, op=">=", value=0.0), accuracy=1.0
            ),
        ],
        adb_mode=adb_mode,
        neutral_region=neutral_region or Comparison(feature="x1", op=">=", value=1.0),
    )


def gaussian_neutral_region(feature_names: list[str]) -> RegionSpec:
    """Accept where the feature sum is non-negative."""
    return Comparison(weights={f: 1.0 for f in feature_names}, op=">=", value=0.0)
