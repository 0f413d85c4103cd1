"""Experiment configuration.

An ExperimentConfig is read from a YAML or JSON file, validated up front,
and resolved: dataset-dependent defaults are filled in so that the dumped
config alone reproduces a run.
"""

import logging
import pathlib
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from suthing import FileHandle

from teamrules.learner.anneal import SearchConfig
from teamrules.onto import (
    AccuracyRegion,
    AdbMode,
    BasePydanticModel,
    ConfigError,
    DiscretionKind,
    RegionSpec,
    SearchMode,
)
from teamrules.tool.discretion import DiscretionLearner
from teamrules.tool.humansim import BAND_PRESETS, Band

logger = logging.getLogger(__name__)

SYNTHETIC_BINS = 9
CSV_BINS = 4
CHECKERS_RULE_LENGTH = 1
DEFAULT_RULE_LENGTH = 3


class DatasetConfig(BaseModel):
    """Where rows come from and how they are split and binarized."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["checkers", "gaussian", "csv"] = "checkers"
    name: Optional[str] = Field(default=None, description="Dataset id in results")
    n: int = Field(default=4800, ge=1, description="Rows generated (synthetic only)")
    path: Optional[pathlib.Path] = None
    label_column: str = "label"
    positive_label: Optional[str] = None
    train_fraction: float = Field(default=4000 / 4800, gt=0.0, lt=1.0)
    bins_per_feature: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _csv_needs_path(self):
        if self.kind == "csv" and self.path is None:
            raise ValueError("csv datasets need a 'path'")
        return self


class HumanConfig(BaseModel):
    """Simulated human.

    Checkers uses its fixed accuracy regions; gaussian and csv datasets use
    a logistic surrogate with ``bands``. ``accuracy_regions`` replaces both.
    """

    model_config = ConfigDict(extra="forbid")

    accuracy_regions: Optional[list[AccuracyRegion]] = None
    neutral_region: Optional[RegionSpec] = None
    bands: list[Band] = Field(default_factory=lambda: list(BAND_PRESETS["two-level"]))
    surrogate_fraction: float = Field(
        default=0.2,
        gt=0.0,
        lt=1.0,
        description="Share of training rows excluded to fit the surrogate human",
    )


class DiscretionConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: DiscretionKind = DiscretionKind.ORACLE
    learner: DiscretionLearner = DiscretionLearner.STUMPS
    subset_size: Optional[int] = Field(
        default=None, ge=1, description="Rows for a learned model; all when unset"
    )
    subset_sizes: list[int] = Field(
        default_factory=list, description="Discretion-degradation sweep axis"
    )
    alpha: float = Field(
        default=0.3, ge=0.0, le=1.0, description="Reconciliation cost of that sweep"
    )
    coin_reference: bool = True
    n_rounds: int = Field(default=100, ge=1)
    learning_rate: float = Field(default=0.1, gt=0.0, le=1.0)

    @model_validator(mode="after")
    def _sizes(self):
        if any(s < 1 for s in self.subset_sizes):
            raise ValueError("subset_sizes must be positive")
        return self


class SweepConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["alpha", "discretion", "both"] = Field(
        default="alpha", description="Which sweep `sweep` runs"
    )
    alphas: list[float] = Field(default_factory=lambda: [0.0], min_length=1)
    seeds: list[int] = Field(default_factory=lambda: [0, 1, 2, 3, 4], min_length=1)
    modes: list[SearchMode] = Field(
        default_factory=lambda: [SearchMode.TEAMRULES], min_length=1
    )
    adb_modes: list[AdbMode] = Field(
        default_factory=lambda: [AdbMode.NEUTRAL], min_length=1
    )
    cl_on_acceptance: bool = Field(
        default=False, description="Count only accepted contradictions in CL"
    )
    jobs: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _alphas(self):
        if any(not 0.0 <= a <= 1.0 for a in self.alphas):
            raise ValueError("alphas must lie in [0, 1]")
        if any(s < 0 for s in self.seeds):
            raise ValueError("seeds must be non-negative")
        return self


class ExperimentConfig(BasePydanticModel):
    """Everything needed to run fits and sweeps.

    Attributes:
        name: Label for logs and output files.
        dataset: Data source, split and binarization.
        human: Simulated human behavior.
        discretion: Discretion model for the gate and the search weights.
        search: Annealing parameters.
        sweep: Sweep axes.
        output: Directory for results.
    """

    model_config = ConfigDict(extra="forbid")

    name: str = "experiment"
    dataset: DatasetConfig = Field(default_factory=DatasetConfig)
    human: HumanConfig = Field(default_factory=HumanConfig)
    discretion: DiscretionConfig = Field(default_factory=DiscretionConfig)
    search: SearchConfig = Field(default_factory=SearchConfig)
    sweep: SweepConfig = Field(default_factory=SweepConfig)
    output: pathlib.Path = pathlib.Path("results")

    @property
    def dataset_id(self) -> str:
        if self.dataset.name:
            return self.dataset.name
        if self.dataset.kind == "csv":
            return self.dataset.path.stem
        return self.dataset.kind

    def resolved(self) -> "ExperimentConfig":
        """Copy with dataset-dependent defaults filled in."""
        synthetic = self.dataset.kind != "csv"
        dataset = self.dataset.model_copy(
            update={
                "name": self.dataset_id,
                "bins_per_feature": self.dataset.bins_per_feature
                or (SYNTHETIC_BINS if synthetic else CSV_BINS),
            }
        )
        search = self.search
        if "max_rule_length" not in self.search.model_fields_set:
            length = (
                CHECKERS_RULE_LENGTH
                if self.dataset.kind == "checkers"
                else DEFAULT_RULE_LENGTH
            )
            search = SearchConfig(
                **{**self.search.model_dump(), "max_rule_length": length}
            )
        else:
            search = SearchConfig(**self.search.model_dump())
        return ExperimentConfig(
            name=self.name,
            dataset=DatasetConfig(**dataset.model_dump()),
            human=self.human,
            discretion=self.discretion,
            search=search,
            sweep=self.sweep,
            output=self.output,
        )


def format_validation_error(e: ValidationError) -> str:
    lines = []
    for err in e.errors():
        path = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"{path}: {err['msg']}")
    return "\n".join(lines)


def parse_config(data: dict[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(format_validation_error(e)) from None


def load_config(path: str | pathlib.Path) -> ExperimentConfig:
    """Load and validate a YAML or JSON experiment config.

    Raises:
        ConfigError: Missing file, unreadable content, or invalid fields
            (one ``field.path: message`` line per problem).
    """
    path = pathlib.Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = FileHandle.load(path)
    except Exception as e:
        raise ConfigError(f"cannot read {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    config = parse_config(data)
    logger.info(f"Loaded config '{config.name}' from {path}")
    return config
