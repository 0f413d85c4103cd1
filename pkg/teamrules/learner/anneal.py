"""Simulated annealing over rule sets.

Each iteration samples a training row with probability proportional to its
current loss and proposes the move that could fix it: add a rule covering
the row, or cut a rule that covers it. Worse proposals are reverted with a
probability that grows as the temperature ``C0 ** (t / T)`` falls.
"""

import logging
import math
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, Field

from teamrules.onto import FitResult, Polarity, RuleSet, SearchMode
from teamrules.tool.mining import CandidateSource
from teamrules.tool.objective import NONE, POS, TeamContext, TeamObjective
from teamrules.tool.rules import CandidatePool, CoverageState

logger = logging.getLogger(__name__)


class SearchConfig(BaseModel):
    """Parameters of one annealing run and of its deployment gate."""

    iterations: int = Field(default=500, ge=1, description="Annealing iterations T")
    alpha: float = Field(
        default=0.0, ge=0.0, le=1.0, description="Reconciliation cost per contradiction"
    )
    temperature_base: float = Field(
        default=0.01, gt=0.0, le=1.0, description="C0; temperature is C0 ** (t / T)"
    )
    min_support: float = Field(
        default=0.05, gt=0.0, lt=1.0, description="Candidate support within polarity"
    )
    max_rule_length: int = Field(default=1, ge=1)
    max_candidates: int = Field(default=10000, ge=1, description="Cap per polarity")
    top_fraction: float = Field(
        default=0.05, gt=0.0, le=1.0, description="q; share of best additions sampled"
    )
    gate_threshold: float = Field(
        default=0.5, ge=0.0, le=1.0, description="tau; advise only when p(a|x) >= tau"
    )
    seed: int = Field(default=0, ge=0)
    mode: SearchMode = SearchMode.TEAMRULES
    candidate_source: CandidateSource = CandidateSource.FPGROWTH
    n_estimators: int = Field(
        default=50, ge=1, description="Trees for forest candidates"
    )


Move = tuple[Literal["add", "cut"], Polarity, int]


def majority_label(labels: np.ndarray) -> int:
    return int(labels.sum() * 2 > labels.size)


def select_rule_to_add(
    pool: CandidatePool,
    polarity: Polarity,
    row: int,
    objective: TeamObjective,
    state: CoverageState,
    q: float,
    rng: np.random.Generator,
) -> Optional[int]:
    """Pick a candidate covering ``row`` among the ``ceil(q * k)`` best additions.

    Returns:
        Pool index of the chosen candidate, or None when no candidate of the
        polarity covers the row outside the current rule set.
    """
    coverage = pool.coverage(polarity)
    eligible = [
        i for i in np.flatnonzero(coverage[:, row]) if not state.contains(polarity, i)
    ]
    if not eligible:
        return None
    states = objective.states(state.covered(Polarity.POS), state.covered(Polarity.NEG))
    deltas = objective.delta_add(polarity, coverage[eligible], states)
    top = np.argsort(deltas, kind="stable")[: math.ceil(q * len(eligible))]
    return int(eligible[top[rng.integers(top.size)]])


def _cut_covering(
    state: CoverageState, polarity: Polarity, row: int, rng: np.random.Generator
) -> Optional[int]:
    members = state.covering_members(polarity, row)
    if not members:
        return None
    return members[rng.integers(len(members))]


def _propose(
    row: int,
    row_state: int,
    y: int,
    pool: CandidatePool,
    objective: TeamObjective,
    state: CoverageState,
    q: float,
    rng: np.random.Generator,
) -> Optional[Move]:
    if row_state == NONE:
        polarity = Polarity.of_label(y)
        index = select_rule_to_add(pool, polarity, row, objective, state, q, rng)
        return None if index is None else ("add", polarity, index)

    recommended = 1 if row_state == POS else 0
    if recommended == y:
        # correct advice that still costs: a contradiction or a coverage penalty
        polarity = Polarity.POS if row_state == POS else Polarity.NEG
        index = _cut_covering(state, polarity, row, rng)
        return None if index is None else ("cut", polarity, index)
    if y == 0:
        index = _cut_covering(state, Polarity.POS, row, rng)
        return None if index is None else ("cut", Polarity.POS, index)
    if rng.integers(2) == 0:
        index = select_rule_to_add(pool, Polarity.POS, row, objective, state, q, rng)
        return None if index is None else ("add", Polarity.POS, index)
    index = _cut_covering(state, Polarity.NEG, row, rng)
    return None if index is None else ("cut", Polarity.NEG, index)


def _apply(state: CoverageState, move: Move, undo: bool = False) -> None:
    kind, polarity, index = move
    if (kind == "add") != undo:
        state.add(polarity, index)
    else:
        state.cut(polarity, index)


def anneal(
    ctx: TeamContext, pool: CandidatePool, cfg: SearchConfig, mode: SearchMode
) -> FitResult:
    """Run one annealing chain under the objective of ``mode``.

    Args:
        ctx: Training context.
        pool: Candidate rules mined on the same rows.
        cfg: Search parameters; ``cfg.alpha`` is ignored in favor of ``ctx.alpha``.
        mode: Objective to optimize.

    Returns:
        FitResult: Best rule set found and the best-so-far loss trace.
    """
    if pool.n != ctx.n:
        raise ValueError(f"pool covers {pool.n} rows, context has {ctx.n}")
    rng = np.random.default_rng(cfg.seed)
    default_label = majority_label(ctx.labels)
    objective = TeamObjective(ctx, mode, default_label)
    state = CoverageState(pool)

    def current_states() -> np.ndarray:
        return objective.states(
            state.covered(Polarity.POS), state.covered(Polarity.NEG)
        )

    states = current_states()
    current = objective.breakdown(states)
    best, best_members = current, state.snapshot()
    trace: list[float] = []
    accepted = 0
    t = 0
    for t in range(1, cfg.iterations + 1):
        phi = objective.row_losses(states)
        cumulative = np.cumsum(phi)
        if cumulative[-1] <= 0.0:
            logger.debug(f"All row losses are zero at iteration {t}; stopping")
            t -= 1
            break
        row = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], "right"))
        row = min(row, ctx.n - 1)
        move = _propose(
            row,
            int(states[row]),
            int(ctx.labels[row]),
            pool,
            objective,
            state,
            cfg.top_fraction,
            rng,
        )
        if move is None:
            trace.append(best.total)
            continue

        _apply(state, move)
        new_states = current_states()
        proposed = objective.breakdown(new_states)
        if proposed.total < best.total:
            best, best_members = proposed, state.snapshot()
        temperature = cfg.temperature_base ** (t / cfg.iterations)
        keep = math.exp(min(0.0, (current.total - proposed.total) / temperature))
        if rng.random() >= keep:
            _apply(state, move, undo=True)
        else:
            states, current = new_states, proposed
            accepted += 1
        trace.append(best.total)

    rule_set = RuleSet(
        positive=[pool.pos_candidates[i] for i in sorted(best_members[0])],
        negative=[pool.neg_candidates[i] for i in sorted(best_members[1])],
    )
    logger.info(
        f"{mode} search finished after {t} iterations: loss {best.total:.4f} "
        f"({len(rule_set.positive)} R+, {len(rule_set.negative)} R-, "
        f"{accepted} accepted moves)"
    )
    return FitResult(
        rule_set=rule_set,
        rules_text=rule_set.to_text(ctx.dataset.predicates),
        best_training_loss=best,
        loss_trace=trace,
        accepted_moves=accepted,
        mode=mode,
        default_label=default_label,
    )


def fit(ctx: TeamContext, pool: CandidatePool, cfg: SearchConfig) -> FitResult:
    """TeamRules search: discretion-weighted loss plus reconciliation cost."""
    if cfg.mode is not SearchMode.TEAMRULES:
        raise ValueError(
            f"fit runs the teamrules mode; use fit_baseline for {cfg.mode}"
        )
    return anneal(ctx, pool, cfg, SearchMode.TEAMRULES)


def fit_baseline(ctx: TeamContext, pool: CandidatePool, cfg: SearchConfig) -> FitResult:
    """Baseline searches on the same engine: hyrs, brs or fc_tr."""
    if cfg.mode is SearchMode.TEAMRULES:
        raise ValueError("fit_baseline needs a baseline mode")
    return anneal(ctx, pool, cfg, cfg.mode)


def search(ctx: TeamContext, pool: CandidatePool, cfg: SearchConfig) -> FitResult:
    if cfg.mode is SearchMode.TEAMRULES:
        return fit(ctx, pool, cfg)
    return fit_baseline(ctx, pool, cfg)
