import logging
import pathlib
from dataclasses import dataclass
from enum import IntEnum
from functools import cached_property
from typing import Annotated, Any, Literal, Optional, Union

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    GetCoreSchemaHandler,
    field_validator,
    model_validator,
)
from pydantic_core import core_schema
from scipy.special import expit

from teamrules.util import StrEnum

logger = logging.getLogger(__name__)


class TeamRulesError(Exception):
    """Base class for all errors raised by teamrules."""


class DataError(TeamRulesError, ValueError):
    """Malformed datasets, unreadable cells, impossible splits."""


class ArityError(DataError):
    """A row does not have the feature count a model was built for."""


class BehaviorError(TeamRulesError, ValueError):
    """Human behavior specification cannot be applied to the data."""


class MiningError(TeamRulesError):
    """Candidate rule mining produced nothing usable."""


class ConfigError(TeamRulesError):
    """Experiment configuration failed validation."""


class Status(StrEnum):
    """Outcome of a sweep cell."""

    SUCCESS = "success"
    FAILED = "failed"


class Direction(StrEnum):
    GEQ = ">="
    LT = "<"


class Polarity(StrEnum):
    """Sign of a rule: R+ recommends label 1, R- recommends label 0."""

    POS = "+"
    NEG = "-"

    @property
    def label(self) -> int:
        return 1 if self is Polarity.POS else 0

    @classmethod
    def of_label(cls, y: int) -> "Polarity":
        return cls.POS if y == 1 else cls.NEG


class AdbMode(StrEnum):
    """Algorithm discretion behavior of the simulated human."""

    RATIONAL = "rational"
    NEUTRAL = "neutral"
    IRRATIONAL = "irrational"


class SearchMode(StrEnum):
    """Objective and deployment policy of an advising model."""

    TEAMRULES = "teamrules"
    HYRS_ADAPTED = "hyrs"
    BRS_LIKE = "brs"
    FULL_COVERAGE_TR = "fc_tr"

    @property
    def full_coverage(self) -> bool:
        return self in (SearchMode.BRS_LIKE, SearchMode.FULL_COVERAGE_TR)

    @property
    def gated(self) -> bool:
        return self is SearchMode.TEAMRULES


class DiscretionKind(StrEnum):
    ORACLE = "oracle"
    LEARNED = "learned"
    COIN = "coin"


class TeamDecision(IntEnum):
    """Outcome of the training-time decision process for one row."""

    ZERO = 0
    ONE = 1
    ABSTAIN = -1


NO_RECOMMENDATION = -1


@dataclass(frozen=True)
class ArraySchema:
    """Pydantic schema for numpy arrays of a fixed dtype.

    Arrays are copied on validation, made read-only, and serialized as
    nested lists.

    Attributes:
        dtype: numpy dtype the array is coerced to.
    """

    dtype: Any

    def __get_pydantic_core_schema__(
        self, _source_type, handler: GetCoreSchemaHandler
    ) -> core_schema.CoreSchema:
        return core_schema.no_info_plain_validator_function(
            self._validate,
            serialization=core_schema.plain_serializer_function_ser_schema(
                self._to_list, info_arg=False
            ),
        )

    def _validate(self, value: Any) -> np.ndarray:
        arr = np.array(value, dtype=self.dtype)
        arr.setflags(write=False)
        return arr

    @staticmethod
    def _to_list(arr: np.ndarray) -> list:
        return arr.tolist()


FloatArray = Annotated[np.ndarray, ArraySchema(np.float64)]
IntArray = Annotated[np.ndarray, ArraySchema(np.int64)]
BoolArray = Annotated[np.ndarray, ArraySchema(np.bool_)]


class BasePydanticModel(BaseModel):
    """Base class for Pydantic models with serialization capabilities."""

    def __init__(self, **kwargs):
        """Initialize the model with given keyword arguments."""
        super().__init__(**kwargs)

    def serialize(self, file_path: str | pathlib.Path) -> None:
        """Serialize the model to a JSON file.

        Args:
            file_path: Path to save the JSON file.
        """
        state_json = self.model_dump_json(indent=4)
        if isinstance(file_path, str):
            file_path = pathlib.Path(file_path)
        file_path.write_text(state_json)

    @classmethod
    def load(cls, file_path: str | pathlib.Path):
        """Load a model from a JSON file.

        Args:
            file_path: Path to the JSON file.

        Returns:
            The loaded model instance.
        """
        if isinstance(file_path, str):
            file_path = pathlib.Path(file_path)
        state_json = file_path.read_text()
        return cls.model_validate_json(state_json)


def _check_binary(values: np.ndarray, what: str) -> None:
    if values.size and not np.isin(values, (0, 1)).all():
        raise DataError(f"{what} must contain only 0 or 1")


class RawDataset(BasePydanticModel):
    """Real-valued feature table with binary labels.

    Attributes:
        feature_names: One name per column of ``rows``.
        rows: Matrix of shape (n, d).
        labels: Vector of length n with values in {0, 1}.
    """

    model_config = ConfigDict(frozen=True)

    feature_names: list[str]
    rows: FloatArray
    labels: IntArray

    @model_validator(mode="before")
    @classmethod
    def _empty_rows(cls, data: Any) -> Any:
        if isinstance(data, dict) and "feature_names" in data:
            rows = data.get("rows")
            if rows is not None and np.size(rows) == 0:
                data = {**data, "rows": np.empty((0, len(data["feature_names"])))}
        return data

    @model_validator(mode="after")
    def _check_shape(self):
        d = len(self.feature_names)
        if self.rows.ndim != 2 or self.rows.shape[1] != d:
            raise DataError(
                f"rows must be a matrix with {d} columns, got shape {self.rows.shape}"
            )
        if self.labels.shape != (self.rows.shape[0],):
            raise DataError(
                f"labels length {self.labels.shape} does not match "
                f"{self.rows.shape[0]} rows"
            )
        _check_binary(self.labels, "labels")
        return self

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def d(self) -> int:
        return self.rows.shape[1]

    def feature_index(self, name: str) -> int:
        try:
            return self.feature_names.index(name)
        except ValueError:
            raise DataError(f"unknown feature '{name}'") from None

    def take(self, indices: np.ndarray) -> "RawDataset":
        """Return the sub-dataset made of ``indices`` (in the given order)."""
        indices = np.asarray(indices, dtype=np.int64)
        return RawDataset(
            feature_names=list(self.feature_names),
            rows=self.rows[indices],
            labels=self.labels[indices],
        )


class Predicate(BaseModel):
    """Threshold condition on one raw feature, the building block of rules."""

    model_config = ConfigDict(frozen=True)

    feature_index: int = Field(ge=0)
    feature_name: str
    direction: Direction
    threshold: float
    boolean: bool = Field(
        default=False,
        description="Feature is 0/1; rendered as `name = 1` / `name = 0`",
    )

    def evaluate(self, rows: np.ndarray) -> np.ndarray:
        col = rows[:, self.feature_index]
        if self.direction == Direction.GEQ:
            return col >= self.threshold
        return col < self.threshold

    def complement(self) -> "Predicate":
        flipped = Direction.LT if self.direction == Direction.GEQ else Direction.GEQ
        return self.model_copy(update={"direction": flipped})

    def render(self) -> str:
        if self.boolean:
            value = 1 if self.direction == Direction.GEQ else 0
            return f"{self.feature_name} = {value}"
        return f"{self.feature_name} {self.direction} {self.threshold:.6g}"


def evaluate_predicates(rows: np.ndarray, predicates: list[Predicate]) -> np.ndarray:
    """Boolean (n, m) matrix of every predicate on every row."""
    if not predicates:
        return np.zeros((rows.shape[0], 0), dtype=bool)
    return np.column_stack([p.evaluate(rows) for p in predicates])


class BinarizedDataset(BasePydanticModel):
    """Boolean predicate columns derived from a RawDataset.

    Attributes:
        predicates: Column definitions; GEQ/LT predicates come in pairs.
        columns: Boolean matrix (n, m), ``columns[i, j]`` is predicate j on row i.
        labels: Labels of the source rows.
        source: The RawDataset the columns were evaluated on.
        warnings: Notes collected while deriving predicates.
    """

    model_config = ConfigDict(frozen=True)

    predicates: list[Predicate]
    columns: BoolArray
    labels: IntArray
    source: RawDataset
    warnings: list[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_columns(self):
        n, m = self.source.n, len(self.predicates)
        if self.columns.shape != (n, m):
            raise DataError(
                f"columns shape {self.columns.shape} does not match ({n}, {m})"
            )
        if self.labels.shape != (n,):
            raise DataError("labels length does not match the source rows")
        for p in self.predicates:
            if p.feature_index >= self.source.d:
                raise DataError(f"predicate {p.render()} refers to a missing feature")
        keys = {(p.feature_index, p.direction, p.threshold) for p in self.predicates}
        for p in self.predicates:
            if p.direction == Direction.GEQ and (
                (p.feature_index, Direction.LT, p.threshold) not in keys
            ):
                raise DataError(f"predicate {p.render()} has no complement column")
        if not np.array_equal(
            self.columns, evaluate_predicates(self.source.rows, self.predicates)
        ):
            raise DataError("columns do not match the predicates on the source rows")
        return self

    @property
    def n(self) -> int:
        return self.columns.shape[0]

    @property
    def m(self) -> int:
        return self.columns.shape[1]

    @cached_property
    def complement_index(self) -> dict[int, int]:
        """Column index of each predicate's negation."""
        position = {
            (p.feature_index, p.direction, p.threshold): j
            for j, p in enumerate(self.predicates)
        }
        return {
            j: position[(c.feature_index, c.direction, c.threshold)]
            for j, c in ((j, p.complement()) for j, p in enumerate(self.predicates))
        }

    def render_items(self, items: tuple[int, ...]) -> str:
        return " AND ".join(self.predicates[j].render() for j in items)


class SplitSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    train_fraction: float = Field(gt=0.0, lt=1.0)
    seed: int = Field(default=0, ge=0)


class Rule(BaseModel):
    """Conjunction of predicate columns.

    Attributes:
        items: Sorted column indices; a row is covered when all are true.
        support_pos: Covered training rows with label 1.
        support_neg: Covered training rows with label 0.
    """

    model_config = ConfigDict(frozen=True)

    items: tuple[int, ...]
    support_pos: int = Field(default=0, ge=0)
    support_neg: int = Field(default=0, ge=0)

    @field_validator("items")
    @classmethod
    def _sorted_unique(cls, items: tuple[int, ...]) -> tuple[int, ...]:
        if not items:
            raise ValueError("a rule needs at least one item")
        if any(i < 0 for i in items):
            raise ValueError("rule items must be non-negative column indices")
        return tuple(sorted(set(items)))

    def __len__(self) -> int:
        return len(self.items)

    def coverage(self, columns: np.ndarray) -> np.ndarray:
        if self.items[-1] >= columns.shape[1]:
            raise DataError(
                f"rule item {self.items[-1]} out of range for "
                f"{columns.shape[1]} columns"
            )
        return columns[:, list(self.items)].all(axis=1)


_TEXT_PREFIX = {Polarity.POS: "+ IF ", Polarity.NEG: "- IF "}


class RuleSet(BasePydanticModel):
    """Positive (R+) and negative (R-) rules of an advising model."""

    positive: list[Rule] = Field(default_factory=list)
    negative: list[Rule] = Field(default_factory=list)

    @model_validator(mode="after")
    def _no_duplicates(self):
        for polarity, rules in (("R+", self.positive), ("R-", self.negative)):
            keys = [r.items for r in rules]
            if len(keys) != len(set(keys)):
                raise ValueError(f"duplicate rules in {polarity}")
        return self

    def rules(self, polarity: Polarity) -> list[Rule]:
        return self.positive if polarity is Polarity.POS else self.negative

    def is_empty(self) -> bool:
        return not self.positive and not self.negative

    def to_text(self, predicates: list[Predicate]) -> str:
        """One rule per line: ``+ IF x1 >= 1 AND x2 < 1``."""
        lines = []
        for polarity in Polarity:
            for rule in self.rules(polarity):
                conds = " AND ".join(predicates[j].render() for j in rule.items)
                lines.append(f"{_TEXT_PREFIX[polarity]}{conds}")
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text: str, predicates: list[Predicate]) -> "RuleSet":
        lookup = {p.render(): j for j, p in enumerate(predicates)}
        positive, negative = [], []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line:
                continue
            sign, _, body = line.partition(" IF ")
            if sign not in ("+", "-") or not body:
                raise DataError(f"line {lineno}: expected '+|- IF ...', got '{line}'")
            try:
                items = tuple(lookup[c.strip()] for c in body.split(" AND "))
            except KeyError as e:
                raise DataError(f"line {lineno}: unknown predicate {e}") from None
            (positive if sign == "+" else negative).append(Rule(items=items))
        return cls(positive=positive, negative=negative)


class LossBreakdown(BaseModel):
    """Team loss split into its decision and reconciliation parts."""

    model_config = ConfigDict(frozen=True)

    decision_loss: float
    reconciliation_loss: float
    total: float

    @model_validator(mode="after")
    def _total_is_sum(self):
        if self.total != self.decision_loss + self.reconciliation_loss:
            raise ValueError("total must equal decision_loss + reconciliation_loss")
        return self

    @classmethod
    def of(cls, decision_loss: float, reconciliation_loss: float) -> "LossBreakdown":
        decision_loss = float(decision_loss)
        reconciliation_loss = float(reconciliation_loss)
        return cls(
            decision_loss=decision_loss,
            reconciliation_loss=reconciliation_loss,
            total=decision_loss + reconciliation_loss,
        )


class FitResult(BasePydanticModel):
    """Output of one annealing run.

    Attributes:
        rule_set: Best rule set found (R*).
        rules_text: ``rule_set`` in the one-rule-per-line text format.
        best_training_loss: Loss of R* on the training context.
        loss_trace: Best-so-far total loss after every iteration.
        accepted_moves: Proposals kept by the annealing acceptance test.
        mode: Objective the run optimized.
        default_label: Recommendation for uncovered rows in full-coverage modes.
    """

    rule_set: RuleSet
    rules_text: str = ""
    best_training_loss: LossBreakdown
    loss_trace: list[float] = Field(default_factory=list)
    accepted_moves: int = 0
    mode: SearchMode = SearchMode.TEAMRULES
    default_label: int = 0

    @model_validator(mode="after")
    def _trace_non_increasing(self):
        trace = self.loss_trace
        if any(b > a for a, b in zip(trace, trace[1:])):
            raise ValueError("loss_trace must be non-increasing")
        return self


class HumanProfile(BasePydanticModel):
    """Simulated human: decisions h, true accept behavior a, confidence.

    Attributes:
        decisions: Human decision per row.
        accepts: 1 where the human accepts contradicting advice.
        confidence: Optional self-confidence per row in [0, 1].
        seed: Seed the decisions were drawn with.
    """

    model_config = ConfigDict(frozen=True)

    decisions: IntArray
    accepts: IntArray
    confidence: Optional[FloatArray] = None
    seed: int = 0

    @model_validator(mode="after")
    def _same_length(self):
        n = self.decisions.shape[0]
        if self.accepts.shape != (n,):
            raise DataError("accepts must have one entry per decision")
        if self.confidence is not None:
            if self.confidence.shape != (n,):
                raise DataError("confidence must have one entry per decision")
            if ((self.confidence < 0) | (self.confidence > 1)).any():
                raise DataError("confidence must lie in [0, 1]")
        _check_binary(self.decisions, "decisions")
        _check_binary(self.accepts, "accepts")
        return self

    @property
    def n(self) -> int:
        return self.decisions.shape[0]

    def take(self, indices: np.ndarray) -> "HumanProfile":
        return HumanProfile(
            decisions=self.decisions[indices],
            accepts=self.accepts[indices],
            confidence=None if self.confidence is None else self.confidence[indices],
            seed=self.seed,
        )


_OPS = {"≥": ">=", ">=": ">=", "<": "<", "=": "=", "==": "="}


class Comparison(BaseModel):
    """Leaf of a condition tree.

    Compares either a single named feature or a weighted sum of features
    against a constant: ``{feature: x1, op: ">=", value: 1}`` or
    ``{weights: {x2: 1, x1: -1}, op: "<", value: 0}``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    feature: Optional[str] = None
    weights: Optional[dict[str, float]] = None
    op: Literal[">=", "<", "="]
    value: float

    @field_validator("op", mode="before")
    @classmethod
    def _normalize_op(cls, op: str) -> str:
        return _OPS.get(op, op)

    @model_validator(mode="after")
    def _one_operand(self):
        if (self.feature is None) == (self.weights is None):
            raise ValueError("exactly one of 'feature' or 'weights' is required")
        if self.weights is not None and not self.weights:
            raise ValueError("'weights' must name at least one feature")
        return self

    def evaluate(self, raw: RawDataset) -> np.ndarray:
        if self.feature is not None:
            values = raw.rows[:, raw.feature_index(self.feature)]
        else:
            idx = [raw.feature_index(f) for f in self.weights]
            values = raw.rows[:, idx] @ np.array(list(self.weights.values()))
        if self.op == ">=":
            return values >= self.value
        if self.op == "<":
            return values < self.value
        return values == self.value

    def describe(self) -> str:
        if self.feature is not None:
            lhs = self.feature
        else:
            lhs = " + ".join(f"{w:g}*{f}" for f, w in self.weights.items())
        return f"{lhs} {self.op} {self.value:g}"


class AllOf(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    all_of: list["RegionSpec"] = Field(alias="all", min_length=1)

    def evaluate(self, raw: RawDataset) -> np.ndarray:
        mask = np.ones(raw.n, dtype=bool)
        for node in self.all_of:
            mask &= node.evaluate(raw)
        return mask

    def describe(self) -> str:
        return "(" + " AND ".join(n.describe() for n in self.all_of) + ")"


class AnyOf(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    any_of: list["RegionSpec"] = Field(alias="any", min_length=1)

    def evaluate(self, raw: RawDataset) -> np.ndarray:
        mask = np.zeros(raw.n, dtype=bool)
        for node in self.any_of:
            mask |= node.evaluate(raw)
        return mask

    def describe(self) -> str:
        return "(" + " OR ".join(n.describe() for n in self.any_of) + ")"


class BandRegion(BaseModel):
    """Rows whose logistic confidence 2|p(y|x) - 0.5| falls in (lo, hi].

    A band starting at 0 also includes rows with confidence exactly 0.
    ``coef`` and ``intercept`` act on raw (unscaled) features.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    feature_names: list[str]
    coef: list[float]
    intercept: float
    lo: float = Field(ge=0.0, le=1.0)
    hi: float = Field(ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _check(self):
        if len(self.coef) != len(self.feature_names):
            raise ValueError("one coefficient per feature is required")
        if self.lo >= self.hi:
            raise ValueError("band needs lo < hi")
        return self

    def score(self, raw: RawDataset) -> np.ndarray:
        """p(y=1|x) of the logistic model."""
        if raw.feature_names != self.feature_names:
            raise ArityError("band region was fitted on different features")
        return expit(raw.rows @ np.array(self.coef) + self.intercept)

    def evaluate(self, raw: RawDataset) -> np.ndarray:
        band = 2.0 * np.abs(self.score(raw) - 0.5)
        lower = band >= self.lo if self.lo <= 0.0 else band > self.lo
        return lower & (band <= self.hi)

    def describe(self) -> str:
        return f"{self.lo:g} < 2|p(y|x) - 0.5| <= {self.hi:g}"


RegionSpec = Union[Comparison, AllOf, AnyOf, BandRegion]

AllOf.model_rebuild()
AnyOf.model_rebuild()


class AccuracyRegion(BaseModel):
    """Region of the instance space with a fixed human accuracy.

    ``accuracy=None`` is only meaningful for a BandRegion: rows there take the
    logistic model's own decision.
    """

    model_config = ConfigDict(frozen=True)

    region: RegionSpec
    accuracy: Optional[float] = Field(default=None, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _accuracy_or_band(self):
        if self.accuracy is None and not isinstance(self.region, BandRegion):
            raise ValueError("only band regions may omit the accuracy")
        return self


class BehaviorSpec(BaseModel):
    """Accuracy regions and accept behavior of a simulated human."""

    model_config = ConfigDict(frozen=True)

    accuracy_regions: list[AccuracyRegion] = Field(min_length=1)
    adb_mode: AdbMode
    neutral_region: Optional[RegionSpec] = None

    @model_validator(mode="after")
    def _check(self):
        if self.adb_mode == AdbMode.NEUTRAL and self.neutral_region is None:
            raise BehaviorError("NEUTRAL behavior requires a neutral_region")
        if all(r.accuracy is None for r in self.accuracy_regions):
            raise BehaviorError("at least one region needs an explicit accuracy")
        return self

    @property
    def lowest_accuracy(self) -> float:
        return min(r.accuracy for r in self.accuracy_regions if r.accuracy is not None)


class TeamOutcome(BasePydanticModel):
    """Deployment of an advisor alongside a human on test rows.

    Attributes:
        recommendations: 1, 0, or -1 (no recommendation shown) per row.
        accepted: 1 where the shown recommendation determines the decision.
        final_decisions: Team decision per row.
        tdl: Team decision loss (error rate of ``final_decisions``).
        cl: Contradiction (reconciliation) loss per row.
        ttl: tdl + cl.
    """

    recommendations: IntArray
    accepted: IntArray
    final_decisions: IntArray
    tdl: float
    cl: float
    ttl: float
    contradiction_count: int
    recommendation_count: int

    @model_validator(mode="after")
    def _ttl_is_sum(self):
        if self.ttl != self.tdl + self.cl:
            raise ValueError("ttl must equal tdl + cl")
        return self


RESULT_COLUMNS = [
    "dataset",
    "adb_mode",
    "mode",
    "alpha",
    "seed",
    "discretion_kind",
    "discretion_train_size",
    "discretion_accuracy",
    "tdl",
    "cl",
    "ttl",
    "contradictions",
    "recommendations",
    "wall_time_ms",
]


class ExperimentRecord(BaseModel):
    """One results row: a (configuration, seed) cell of a sweep."""

    dataset: str
    adb_mode: AdbMode
    mode: SearchMode
    alpha: float
    seed: int
    discretion_kind: DiscretionKind
    discretion_train_size: int
    discretion_accuracy: float
    tdl: float
    cl: float
    ttl: float
    contradictions: int
    recommendations: int
    wall_time_ms: float = 0.0

    @model_validator(mode="after")
    def _ttl_is_sum(self):
        if self.ttl != self.tdl + self.cl:
            raise ValueError("ttl must equal tdl + cl")
        return self

    def row(self) -> dict[str, Any]:
        d = self.model_dump(mode="json")
        return {c: d[c] for c in RESULT_COLUMNS}


class HumanReference(BaseModel):
    """Loss of the human deciding alone on a scenario's test rows."""

    dataset: str
    adb_mode: AdbMode
    seed: int
    ttl: float


class CellFailure(BaseModel):
    """A sweep cell that raised instead of producing a record."""

    dataset: str
    adb_mode: AdbMode
    mode: Optional[SearchMode] = None
    alpha: Optional[float] = None
    seed: int
    status: Status = Status.FAILED
    reason: str
