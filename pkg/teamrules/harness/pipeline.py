"""Experiment pipeline: scenarios, single fits and sweeps.

A scenario is one (dataset, accept behavior, seed) draw: data, split,
simulated human, binarization and candidate pool. Sweeps evaluate several
(mode, alpha, discretion) cells on each scenario; scenarios are independent
and can run in parallel processes.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from itertools import product
from typing import Optional

import numpy as np
from pydantic import Field

from teamrules.config import ExperimentConfig
from teamrules.harness.simulate import human_alone, simulate_team
from teamrules.learner.advisor import Advisor
from teamrules.learner.anneal import search
from teamrules.onto import (
    AdbMode,
    BasePydanticModel,
    BehaviorSpec,
    BinarizedDataset,
    CellFailure,
    DiscretionKind,
    ExperimentRecord,
    FitResult,
    HumanProfile,
    HumanReference,
    RawDataset,
    SearchMode,
    SplitSpec,
    Status,
    TeamOutcome,
)
from teamrules.tool import dataspace, discretion, humansim
from teamrules.tool.discretion import DiscretionModel
from teamrules.tool.objective import TeamContext
from teamrules.tool.rules import CandidatePool
from teamrules.toolbox import ToolBox
from teamrules.util import derive_seed, wrap_with

logger = logging.getLogger(__name__)


class Scenario(BasePydanticModel):
    """Prepared data of one (dataset, accept behavior, seed) draw."""

    dataset_id: str
    adb_mode: AdbMode
    seed: int
    train: RawDataset
    test: RawDataset
    behavior: BehaviorSpec
    train_profile: HumanProfile
    test_profile: HumanProfile
    binarized: BinarizedDataset
    pool: Optional[CandidatePool] = None


class DiscretionVariant(BasePydanticModel):
    kind: DiscretionKind = DiscretionKind.ORACLE
    subset_size: Optional[int] = None


class CellResult(BasePydanticModel):
    """Everything produced by one fit-and-simulate cell."""

    record: ExperimentRecord
    fit: FitResult
    advisor: Advisor
    outcome: TeamOutcome


class SweepResult(BasePydanticModel):
    records: list[ExperimentRecord] = Field(default_factory=list)
    human: list[HumanReference] = Field(default_factory=list)
    failures: list[CellFailure] = Field(default_factory=list)

    @property
    def status(self) -> Status:
        return Status.FAILED if self.failures else Status.SUCCESS

    def extend(self, other: "SweepResult") -> None:
        self.records.extend(other.records)
        self.human.extend(other.human)
        self.failures.extend(other.failures)


def load_dataset(config: ExperimentConfig, seed: int) -> RawDataset:
    spec = config.dataset
    if spec.kind == "checkers":
        return dataspace.gen_checkers(spec.n, derive_seed(seed, "data"))
    if spec.kind == "gaussian":
        return dataspace.gen_gaussian(spec.n, derive_seed(seed, "data"))
    return dataspace.load_csv(spec.path, spec.label_column, spec.positive_label)


def build_behavior(
    config: ExperimentConfig, adb_mode: AdbMode, train: RawDataset, seed: int
) -> tuple[BehaviorSpec, np.ndarray]:
    """Behavior of the simulated human and the training rows left for advising.

    Surrogate humans consume a slice of the training rows, which is removed
    from the rows the advising model is trained on.
    """
    human = config.human
    kept = np.arange(train.n)
    if human.accuracy_regions is not None:
        return (
            BehaviorSpec(
                accuracy_regions=human.accuracy_regions,
                adb_mode=adb_mode,
                neutral_region=human.neutral_region,
            ),
            kept,
        )
    if config.dataset.kind == "checkers":
        return humansim.checkers_behavior(adb_mode, human.neutral_region), kept
    surrogate = humansim.fit_surrogate_human(
        train, human.surrogate_fraction, human.bands, derive_seed(seed, "surrogate")
    )
    neutral = human.neutral_region
    if neutral is None and config.dataset.kind == "gaussian":
        neutral = humansim.gaussian_neutral_region(train.feature_names)
    return surrogate.behavior(adb_mode, neutral), surrogate.kept_indices


def _prepare(
    config: ExperimentConfig, tools: ToolBox, adb_mode: AdbMode, seed: int
) -> Scenario:
    raw = wrap_with(load_dataset, "load data")(config, seed)
    train_idx, test_idx = dataspace.split(
        raw,
        SplitSpec(
            train_fraction=config.dataset.train_fraction,
            seed=derive_seed(seed, "split"),
        ),
    )
    train, test = raw.take(train_idx), raw.take(test_idx)
    behavior, kept = wrap_with(build_behavior, "simulate human")(
        config, adb_mode, train, seed
    )
    train = train.take(kept)
    train_profile = humansim.build_profile(
        train, behavior, derive_seed(seed, "human-train")
    )
    test_profile = humansim.build_profile(
        test, behavior, derive_seed(seed, "human-test")
    )
    binarized = wrap_with(tools.binarizer, "binarize")(train)
    pool = wrap_with(tools.miner, "mine candidates")(binarized)
    return Scenario(
        dataset_id=config.dataset_id,
        adb_mode=adb_mode,
        seed=seed,
        train=train,
        test=test,
        behavior=behavior,
        train_profile=train_profile,
        test_profile=test_profile,
        binarized=binarized,
        pool=pool,
    )


def prepare_scenario(
    config: ExperimentConfig, adb_mode: AdbMode, seed: int
) -> Scenario:
    """Generate or load data, split, simulate the human, binarize and mine."""
    return _prepare(config, ToolBox(config=config, seed=seed), adb_mode, seed)


def make_discretion(
    config: ExperimentConfig,
    scenario: Scenario,
    variant: DiscretionVariant,
    tools: Optional[ToolBox] = None,
) -> DiscretionModel:
    train, accepts = scenario.train, scenario.train_profile.accepts
    seed = derive_seed(scenario.seed, "discretion")
    if variant.kind == DiscretionKind.ORACLE:
        return discretion.oracle(scenario.train_profile, train, scenario.behavior)
    if variant.kind == DiscretionKind.COIN:
        return discretion.coin(train, accepts, seed)
    tools = tools or ToolBox(config=config, seed=scenario.seed)
    subset = variant.subset_size or train.n
    return tools.discretion_trainer.fit(train, accepts, subset, seed)


def run_cell(
    config: ExperimentConfig,
    scenario: Scenario,
    disc: DiscretionModel,
    mode: SearchMode,
    alpha: float,
    timing: bool = True,
) -> CellResult:
    """Fit one advising model on the scenario and deploy it on the test rows."""
    start = time.perf_counter()
    ctx = TeamContext(
        dataset=scenario.binarized,
        human_decisions=scenario.train_profile.decisions,
        accept_weights=disc.predict_many(scenario.train.rows),
        alpha=alpha,
    )
    cfg = config.search.model_copy(
        update={"alpha": alpha, "mode": mode, "seed": scenario.seed}
    )
    fit = search(ctx, scenario.pool, cfg)
    advisor = Advisor.from_fit(
        fit, scenario.binarized.predicates, disc, config.search.gate_threshold
    )
    outcome = simulate_team(
        advisor,
        scenario.test_profile,
        scenario.test,
        alpha,
        config.sweep.cl_on_acceptance,
    )
    elapsed = 1e3 * (time.perf_counter() - start) if timing else 0.0
    record = ExperimentRecord(
        dataset=scenario.dataset_id,
        adb_mode=scenario.adb_mode,
        mode=mode,
        alpha=alpha,
        seed=scenario.seed,
        discretion_kind=disc.kind,
        discretion_train_size=disc.training_size,
        discretion_accuracy=disc.holdout_accuracy,
        tdl=outcome.tdl,
        cl=outcome.cl,
        ttl=outcome.ttl,
        contradictions=outcome.contradiction_count,
        recommendations=outcome.recommendation_count,
        wall_time_ms=round(elapsed, 3),
    )
    return CellResult(record=record, fit=fit, advisor=advisor, outcome=outcome)


def human_reference(scenario: Scenario) -> HumanReference:
    outcome = human_alone(scenario.test_profile, scenario.test.labels)
    return HumanReference(
        dataset=scenario.dataset_id,
        adb_mode=scenario.adb_mode,
        seed=scenario.seed,
        ttl=outcome.ttl,
    )


def run_scenario(
    config: ExperimentConfig,
    adb_mode: AdbMode,
    seed: int,
    cells: list[tuple[DiscretionVariant, SearchMode, float]],
    timing: bool = True,
) -> SweepResult:
    """Evaluate ``cells`` on one scenario; failures are recorded, not raised."""
    result = SweepResult()
    try:
        tools = ToolBox(config=config, seed=seed)
        scenario = _prepare(config, tools, adb_mode, seed)
    except Exception as e:
        logger.error(
            f"Scenario {config.dataset_id}/{adb_mode}/seed={seed} failed: {e}",
            exc_info=True,
        )
        result.failures.append(
            CellFailure(
                dataset=config.dataset_id, adb_mode=adb_mode, seed=seed, reason=str(e)
            )
        )
        return result
    result.human.append(human_reference(scenario))

    models: dict[tuple, DiscretionModel] = {}
    for variant, mode, alpha in cells:
        try:
            key = (variant.kind, variant.subset_size)
            if key not in models:
                models[key] = make_discretion(config, scenario, variant, tools)
            cell = run_cell(config, scenario, models[key], mode, alpha, timing)
            result.records.append(cell.record)
        except Exception as e:
            logger.error(
                f"Cell {scenario.dataset_id}/{adb_mode}/{mode}/alpha={alpha}/"
                f"seed={seed} failed: {e}",
                exc_info=True,
            )
            result.failures.append(
                CellFailure(
                    dataset=scenario.dataset_id,
                    adb_mode=adb_mode,
                    mode=mode,
                    alpha=alpha,
                    seed=seed,
                    reason=str(e),
                )
            )
    return result


def _sort_key(config: ExperimentConfig):
    adb_order = {m: i for i, m in enumerate(config.sweep.adb_modes)}
    mode_order = {m: i for i, m in enumerate(config.sweep.modes)}
    kind_order = {k: i for i, k in enumerate(DiscretionKind)}

    def key(r: ExperimentRecord):
        return (
            adb_order.get(r.adb_mode, len(adb_order)),
            mode_order.get(r.mode, len(mode_order)),
            r.alpha,
            kind_order[r.discretion_kind],
            r.discretion_train_size,
            r.seed,
        )

    return key


def _fan_out(
    config: ExperimentConfig,
    cells: list[tuple[DiscretionVariant, SearchMode, float]],
    seeds: list[int],
    jobs: int,
    timing: bool,
) -> SweepResult:
    scenarios = list(product(config.sweep.adb_modes, seeds))
    logger.info(
        f"Sweeping {len(scenarios)} scenarios x {len(cells)} cells with {jobs} job(s)"
    )
    total = SweepResult()
    if jobs <= 1 or len(scenarios) == 1:
        parts = [run_scenario(config, adb, s, cells, timing) for adb, s in scenarios]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            futures = [
                executor.submit(run_scenario, config, adb, s, cells, timing)
                for adb, s in scenarios
            ]
            parts = [f.result() for f in futures]
    for part in parts:
        total.extend(part)
    total.records.sort(key=_sort_key(config))
    if total.failures:
        logger.warning(f"{len(total.failures)} sweep cell(s) failed")
    return total


def sweep_alpha(
    config: ExperimentConfig,
    alphas: Optional[list[float]] = None,
    seeds: Optional[list[int]] = None,
    jobs: int = 1,
    timing: bool = True,
) -> SweepResult:
    """Cross product of behaviors, modes, alphas and seeds."""
    config = config.resolved()
    alphas = alphas if alphas is not None else config.sweep.alphas
    seeds = seeds if seeds is not None else config.sweep.seeds
    if not alphas or not seeds:
        raise ValueError("alphas and seeds must be non-empty")
    variant = DiscretionVariant(
        kind=config.discretion.kind, subset_size=config.discretion.subset_size
    )
    cells = [(variant, m, a) for m in config.sweep.modes for a in alphas]
    return _fan_out(config, cells, seeds, jobs, timing)


def sweep_discretion(
    config: ExperimentConfig,
    subset_sizes: Optional[list[int]] = None,
    seeds: Optional[list[int]] = None,
    jobs: int = 1,
    timing: bool = True,
) -> SweepResult:
    """Learned discretion models of growing training size, plus oracle and coin."""
    config = config.resolved()
    sizes = subset_sizes if subset_sizes is not None else config.discretion.subset_sizes
    seeds = seeds if seeds is not None else config.sweep.seeds
    if not seeds:
        raise ValueError("seeds must be non-empty")
    variants = [DiscretionVariant(kind=DiscretionKind.ORACLE)]
    variants += [
        DiscretionVariant(kind=DiscretionKind.LEARNED, subset_size=s) for s in sizes
    ]
    if config.discretion.coin_reference:
        variants.append(DiscretionVariant(kind=DiscretionKind.COIN))
    alpha = config.discretion.alpha
    cells = [(v, m, alpha) for v in variants for m in config.sweep.modes]
    return _fan_out(config, cells, seeds, jobs, timing)


def run_single(
    config: ExperimentConfig, timing: bool = True
) -> tuple[CellResult, HumanReference]:
    """One fit and one deployment at the first point of every sweep axis."""
    config = config.resolved()
    adb_mode, seed = config.sweep.adb_modes[0], config.sweep.seeds[0]
    tools = ToolBox(config=config, seed=seed)
    scenario = _prepare(config, tools, adb_mode, seed)
    disc = make_discretion(
        config,
        scenario,
        DiscretionVariant(
            kind=config.discretion.kind, subset_size=config.discretion.subset_size
        ),
        tools,
    )
    cell = run_cell(
        config, scenario, disc, config.sweep.modes[0], config.sweep.alphas[0], timing
    )
    return cell, human_reference(scenario)
