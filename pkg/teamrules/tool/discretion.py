"""Discretion models p(a|x): how likely the human accepts contradicting advice.

A DiscretionModel wraps one of several predictors behind a common
``predict`` interface: the perfect oracle, a constant, a seeded coin, or a
learned classifier (boosted stumps or a linear logistic model).
"""

import logging
from functools import cached_property
from typing import Annotated, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import expit

from teamrules.util import StrEnum
from teamrules.onto import (
    ArityError,
    BasePydanticModel,
    BehaviorSpec,
    DataError,
    DiscretionKind,
    FloatArray,
    HumanProfile,
    IntArray,
    RawDataset,
)
from teamrules.tool.humansim import fit_logistic, simulate_adb
from teamrules.tool.onto import Tool
from teamrules.util import render_text_hash

logger = logging.getLogger(__name__)

_EPS = 1e-12


class DiscretionLearner(StrEnum):
    STUMPS = "stumps"
    LOGISTIC = "logistic"


class Stump(BaseModel):
    """Depth-1 regression tree: ``left`` where x[feature] < threshold."""

    model_config = ConfigDict(frozen=True)

    feature: int
    threshold: float
    left: float
    right: float

    def __call__(self, rows: np.ndarray) -> np.ndarray:
        return np.where(rows[:, self.feature] < self.threshold, self.left, self.right)


def _best_split(rows: np.ndarray, residual: np.ndarray) -> Optional[tuple[int, float]]:
    """Feature and midpoint threshold maximizing the squared-error reduction."""
    n = rows.shape[0]
    total = residual.sum()
    best, best_gain = None, -np.inf
    for j in range(rows.shape[1]):
        order = np.argsort(rows[:, j], kind="stable")
        xs, cs = rows[order, j], np.cumsum(residual[order])
        cut = np.flatnonzero(xs[:-1] < xs[1:])
        if cut.size == 0:
            continue
        n_left = cut + 1
        s_left = cs[cut]
        gain = s_left**2 / n_left + (total - s_left) ** 2 / (n - n_left)
        k = int(np.argmax(gain))
        if gain[k] > best_gain:
            best_gain = gain[k]
            best = (j, float((xs[cut[k]] + xs[cut[k] + 1]) / 2.0))
    return best


class StumpBooster(BaseModel):
    """Gradient-boosted decision stumps under logistic loss."""

    type: Literal["stumps"] = "stumps"
    base_score: float
    learning_rate: float
    stumps: list[Stump] = Field(default_factory=list)

    @classmethod
    def fit(
        cls, rows: np.ndarray, target: np.ndarray, n_rounds: int, learning_rate: float
    ) -> "StumpBooster":
        prior = np.clip(target.mean(), _EPS, 1.0 - _EPS)
        base = float(np.log(prior / (1.0 - prior)))
        score = np.full(rows.shape[0], base)
        stumps: list[Stump] = []
        for _ in range(n_rounds):
            p = expit(score)
            residual = target - p
            split = _best_split(rows, residual)
            if split is None:
                break
            j, threshold = split
            left = rows[:, j] < threshold
            hess = p * (1.0 - p)
            values = [
                float(residual[side].sum() / max(hess[side].sum(), _EPS))
                for side in (left, ~left)
            ]
            stump = Stump(
                feature=j, threshold=threshold, left=values[0], right=values[1]
            )
            stumps.append(stump)
            score = score + learning_rate * stump(rows)
        return cls(base_score=base, learning_rate=learning_rate, stumps=stumps)

    def predict_proba(self, rows: np.ndarray) -> np.ndarray:
        score = np.full(rows.shape[0], self.base_score)
        for stump in self.stumps:
            score = score + self.learning_rate * stump(rows)
        return expit(score)


class LinearLogistic(BaseModel):
    type: Literal["logistic"] = "logistic"
    coef: list[float]
    intercept: float

    def predict_proba(self, rows: np.ndarray) -> np.ndarray:
        return expit(rows @ np.array(self.coef) + self.intercept)


class ConstantPredictor(BaseModel):
    type: Literal["constant"] = "constant"
    value: float = Field(ge=0.0, le=1.0)

    def predict_proba(self, rows: np.ndarray) -> np.ndarray:
        return np.full(rows.shape[0], self.value)


class CoinPredictor(BaseModel):
    """Fair coin per row, fixed by hashing the seed with the row's bytes."""

    type: Literal["coin"] = "coin"
    seed: int

    def predict_proba(self, rows: np.ndarray) -> np.ndarray:
        rows = np.ascontiguousarray(rows, dtype=np.float64)
        digests = [
            render_text_hash(f"{self.seed}:{r.tobytes().hex()}", 2) for r in rows
        ]
        return np.array([float(int(h, 16) & 1) for h in digests])


class OraclePredictor(BaseModel):
    """True accept behavior: looked up for known rows, else from the behavior."""

    type: Literal["oracle"] = "oracle"
    known_rows: FloatArray
    known_accepts: IntArray
    behavior: Optional[BehaviorSpec] = None

    @cached_property
    def lookup(self) -> dict[bytes, int]:
        """Accept value keyed by the raw bytes of each known row."""
        known = np.ascontiguousarray(self.known_rows, dtype=np.float64)
        return {r.tobytes(): int(a) for r, a in zip(known, self.known_accepts)}

    def predict_proba(self, rows: np.ndarray, feature_names: list[str]) -> np.ndarray:
        lookup = self.lookup
        rows = np.ascontiguousarray(rows, dtype=np.float64)
        out = np.array([lookup.get(r.tobytes(), -1) for r in rows], dtype=np.float64)
        unseen = out < 0
        if unseen.any():
            if self.behavior is None:
                i = int(np.flatnonzero(unseen)[0])
                raise DataError(
                    f"oracle has no accept value for unseen row {i} and no behavior"
                )
            raw = RawDataset(
                feature_names=feature_names,
                rows=rows[unseen],
                labels=np.zeros(int(unseen.sum()), dtype=np.int64),
            )
            out[unseen] = simulate_adb(raw, self.behavior)
        return out


Predictor = Annotated[
    Union[
        StumpBooster, LinearLogistic, ConstantPredictor, CoinPredictor, OraclePredictor
    ],
    Field(discriminator="type"),
]


class DiscretionModel(BasePydanticModel):
    """A served p(a|x).

    Attributes:
        kind: Oracle, learned, or coin.
        predictor: The underlying predictor.
        feature_names: Raw features rows must carry, in order.
        training_size: Rows the predictor was fitted on.
        holdout_accuracy: Accuracy at threshold 0.5 on rows not used in fitting.
    """

    kind: DiscretionKind
    predictor: Predictor
    feature_names: list[str]
    training_size: int = Field(ge=0)
    holdout_accuracy: float = Field(ge=0.0, le=1.0)

    def predict_many(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[1] != len(self.feature_names):
            raise ArityError(
                f"expected rows with {len(self.feature_names)} features, "
                f"got shape {rows.shape}"
            )
        if isinstance(self.predictor, OraclePredictor):
            p = self.predictor.predict_proba(rows, self.feature_names)
        else:
            p = self.predictor.predict_proba(rows)
        return np.clip(p, 0.0, 1.0)

    def predict(self, row) -> float:
        row = np.asarray(row, dtype=np.float64)
        if row.ndim != 1:
            raise ArityError(f"expected a single row, got shape {row.shape}")
        return float(self.predict_many(row[None, :])[0])


def _accuracy(p: np.ndarray, accepts: np.ndarray) -> float:
    if p.size == 0:
        return 1.0
    return float(np.mean((p >= 0.5).astype(np.int64) == accepts))


class DiscretionTrainer(Tool):
    """Fits learned discretion models on seeded subsets of (x, a) pairs.

    Attributes:
        learner: Classifier family.
        n_rounds: Boosting rounds for the stump learner.
        learning_rate: Shrinkage for the stump learner.
    """

    learner: DiscretionLearner = DiscretionLearner.STUMPS
    n_rounds: int = Field(default=100, ge=1)
    learning_rate: float = Field(default=0.1, gt=0.0, le=1.0)

    def __init__(self, **kwargs):
        super().__init__(**kwargs)

    def _fit_predictor(self, rows: np.ndarray, target: np.ndarray, seed: int):
        if self.learner == DiscretionLearner.LOGISTIC:
            raw = RawDataset(
                feature_names=[f"f{j}" for j in range(rows.shape[1])],
                rows=rows,
                labels=target,
            )
            coef, intercept = fit_logistic(raw, seed)
            return LinearLogistic(coef=coef.tolist(), intercept=intercept)
        return StumpBooster.fit(rows, target, self.n_rounds, self.learning_rate)

    def fit(
        self, features: RawDataset, accepts: np.ndarray, subset_size: int, seed: int
    ) -> DiscretionModel:
        """Fit on ``subset_size`` seeded rows and score on the remainder.

        Args:
            features: Rows the accept labels belong to.
            accepts: True accept behavior per row.
            subset_size: Rows drawn for fitting, 1 <= subset_size <= n.
            seed: Seed of the subset draw.

        Returns:
            DiscretionModel: Learned model with its holdout accuracy.
        """
        n = features.n
        accepts = np.asarray(accepts, dtype=np.int64)
        if accepts.shape != (n,):
            raise DataError(f"expected {n} accept labels, got {accepts.shape}")
        if not 1 <= subset_size <= n:
            raise DataError(f"subset_size must be in [1, {n}], got {subset_size}")
        order = np.random.default_rng(seed).permutation(n)
        fit_idx, rest_idx = np.sort(order[:subset_size]), np.sort(order[subset_size:])
        rows, target = features.rows[fit_idx], accepts[fit_idx]

        if np.unique(target).size < 2:
            logger.warning(
                f"Discretion subset of {subset_size} rows has a single class; "
                "using a constant predictor"
            )
            predictor = ConstantPredictor(value=float(target.mean()))
        else:
            predictor = self._fit_predictor(rows, target, seed)

        if rest_idx.size == 0:
            logger.warning(
                "No rows left for a discretion holdout; "
                "reporting accuracy on the training subset"
            )
            eval_idx = fit_idx
        else:
            eval_idx = rest_idx
        model = DiscretionModel(
            kind=DiscretionKind.LEARNED,
            predictor=predictor,
            feature_names=list(features.feature_names),
            training_size=subset_size,
            holdout_accuracy=0.0,
        )
        accuracy = _accuracy(
            model.predict_many(features.rows[eval_idx]), accepts[eval_idx]
        )
        logger.info(
            f"Discretion model ({self.learner}) on {subset_size} rows: "
            f"holdout accuracy {accuracy:.3f}"
        )
        return model.model_copy(update={"holdout_accuracy": accuracy})


def fit(
    features: RawDataset,
    accepts: np.ndarray,
    subset_size: int,
    seed: int,
    learner: DiscretionLearner = DiscretionLearner.STUMPS,
) -> DiscretionModel:
    return DiscretionTrainer(learner=learner).fit(features, accepts, subset_size, seed)


def oracle(
    profile: HumanProfile, raw: RawDataset, behavior: Optional[BehaviorSpec] = None
) -> DiscretionModel:
    """Perfect discretion model reproducing ``profile.accepts`` on ``raw``."""
    if profile.n != raw.n:
        raise DataError("profile and rows differ in length")
    return DiscretionModel(
        kind=DiscretionKind.ORACLE,
        predictor=OraclePredictor(
            known_rows=raw.rows, known_accepts=profile.accepts, behavior=behavior
        ),
        feature_names=list(raw.feature_names),
        training_size=raw.n,
        holdout_accuracy=1.0,
    )


def coin(raw: RawDataset, accepts: np.ndarray, seed: int) -> DiscretionModel:
    """Random 50% discretion model; accuracy is measured on ``raw``."""
    model = DiscretionModel(
        kind=DiscretionKind.COIN,
        predictor=CoinPredictor(seed=seed),
        feature_names=list(raw.feature_names),
        training_size=0,
        holdout_accuracy=0.0,
    )
    accuracy = _accuracy(model.predict_many(raw.rows), np.asarray(accepts))
    return model.model_copy(update={"holdout_accuracy": accuracy})
