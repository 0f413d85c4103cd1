"""Team loss of a rule set advising a human.

The decision process: a row covered by R+ gets recommendation 1, else a row
covered by R- gets 0, else no recommendation and the human decides alone.
The loss is the discretion-weighted decision error plus alpha for every
covered row whose recommendation contradicts the human.
"""

import logging

import numpy as np
from pydantic import Field, model_validator

from teamrules.onto import (
    BasePydanticModel,
    BinarizedDataset,
    DataError,
    FloatArray,
    IntArray,
    LossBreakdown,
    Polarity,
    RuleSet,
    SearchMode,
    TeamDecision,
)
from teamrules.tool.rules import set_coverage

logger = logging.getLogger(__name__)

# row states of the loss tables
POS, NEG, NONE = 0, 1, 2


class TeamContext(BasePydanticModel):
    """Training data augmented with human decisions and accept weights.

    Attributes:
        dataset: Binarized training rows; its labels are y.
        human_decisions: h per row.
        accept_weights: p(a) per row, in [0, 1].
        alpha: Reconciliation cost of one contradicting recommendation.
    """

    dataset: BinarizedDataset
    human_decisions: IntArray
    accept_weights: FloatArray
    alpha: float = Field(ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _check(self):
        n = self.dataset.n
        if self.human_decisions.shape != (n,) or self.accept_weights.shape != (n,):
            raise DataError(f"human decisions and accept weights need length {n}")
        if ((self.accept_weights < 0) | (self.accept_weights > 1)).any():
            raise DataError("accept weights must lie in [0, 1]")
        return self

    @property
    def labels(self) -> np.ndarray:
        return self.dataset.labels

    @property
    def n(self) -> int:
        return self.dataset.n

    def with_alpha(self, alpha: float) -> "TeamContext":
        return TeamContext(
            dataset=self.dataset,
            human_decisions=self.human_decisions,
            accept_weights=self.accept_weights,
            alpha=alpha,
        )


def team_decisions(rs: RuleSet, dataset: BinarizedDataset) -> np.ndarray:
    """Per row: 1 (R+ covers), 0 (only R- covers) or -1 (abstain)."""
    pos, neg = set_coverage(rs, dataset)
    return np.where(
        pos, TeamDecision.ONE, np.where(neg, TeamDecision.ZERO, TeamDecision.ABSTAIN)
    ).astype(np.int64)


def team_decision(rs: RuleSet, dataset: BinarizedDataset, row: int) -> TeamDecision:
    return TeamDecision(int(team_decisions(rs, dataset)[row]))


def _decision_terms(ctx: TeamContext, rs: RuleSet) -> tuple[np.ndarray, np.ndarray]:
    d = team_decisions(rs, ctx.dataset)
    h = ctx.human_decisions
    y_hat = np.where(d == TeamDecision.ABSTAIN, h, d)
    wrong = ctx.accept_weights * (ctx.labels != y_hat)
    contradicted = (d != TeamDecision.ABSTAIN) & (d != h)
    return wrong, contradicted


def loss(ctx: TeamContext, rs: RuleSet) -> LossBreakdown:
    """Decision-process loss: weighted error of y_hat plus alpha per contradiction."""
    wrong, contradicted = _decision_terms(ctx, rs)
    return LossBreakdown.of(
        np.sum(wrong), ctx.alpha * float(np.sum(contradicted.astype(np.float64)))
    )


def closed_form_loss(ctx: TeamContext, rs: RuleSet) -> LossBreakdown:
    """Same loss written as coverage polynomials; equal to ``loss`` exactly."""
    pos, neg = set_coverage(rs, ctx.dataset)
    c_pos, c_neg = pos.astype(np.float64), neg.astype(np.float64)
    y = ctx.labels.astype(np.float64)
    h = ctx.human_decisions.astype(np.float64)
    p = ctx.accept_weights
    decision = p * (
        (1 - y) * c_pos
        + y * (1 - c_pos) * c_neg
        + (1 - c_pos) * (1 - c_neg) * (y * (1 - h) + h * (1 - y))
    )
    reconciliation = (1 - h) * c_pos + h * (1 - c_pos) * c_neg
    return LossBreakdown.of(np.sum(decision), ctx.alpha * float(np.sum(reconciliation)))


def per_instance_losses(ctx: TeamContext, rs: RuleSet) -> np.ndarray:
    wrong, contradicted = _decision_terms(ctx, rs)
    return wrong + ctx.alpha * contradicted


def per_instance_loss(ctx: TeamContext, rs: RuleSet, row: int) -> float:
    return float(per_instance_losses(ctx, rs)[row])


class TeamObjective:
    """Row-state loss tables for one search mode.

    Each row is in one of three states: covered by R+, covered only by R-,
    or uncovered. ``decision[s, i]`` and ``penalty[s, i]`` hold the row's
    decision loss and penalty count in state s; the total loss is
    ``sum(decision) + alpha * sum(penalty)`` over the current states.
    """

    def __init__(self, ctx: TeamContext, mode: SearchMode, default_label: int = 0):
        self.ctx = ctx
        self.mode = mode
        self.alpha = ctx.alpha
        self.default_label = default_label
        y, h = ctx.labels, ctx.human_decisions
        p = ctx.accept_weights
        if mode in (SearchMode.HYRS_ADAPTED, SearchMode.BRS_LIKE):
            # neither baseline models the human's discretion
            p = np.ones(ctx.n)

        decision = np.empty((3, ctx.n))
        penalty = np.zeros((3, ctx.n))
        decision[POS] = p * (y != 1)
        decision[NEG] = p * (y != 0)
        if mode.full_coverage:
            decision[NONE] = p * (y != default_label)
        else:
            decision[NONE] = p * (y != h)

        if mode is SearchMode.HYRS_ADAPTED:
            penalty[POS] = 1.0
            penalty[NEG] = 1.0
        elif mode is not SearchMode.BRS_LIKE:
            penalty[POS] = h != 1
            penalty[NEG] = h != 0
            if mode is SearchMode.FULL_COVERAGE_TR:
                penalty[NONE] = h != default_label
        if mode is SearchMode.BRS_LIKE:
            self.alpha = 0.0
        self.decision = decision
        self.penalty = penalty
        self.total_table = decision + self.alpha * penalty

    @staticmethod
    def states(pos_covered: np.ndarray, neg_covered: np.ndarray) -> np.ndarray:
        return np.where(pos_covered, POS, np.where(neg_covered, NEG, NONE))

    def row_losses(self, states: np.ndarray) -> np.ndarray:
        return self.total_table[states, np.arange(states.size)]

    def breakdown(self, states: np.ndarray) -> LossBreakdown:
        idx = np.arange(states.size)
        return LossBreakdown.of(
            np.sum(self.decision[states, idx]),
            self.alpha * float(np.sum(self.penalty[states, idx])),
        )

    def delta_add(
        self, polarity: Polarity, coverage: np.ndarray, states: np.ndarray
    ) -> np.ndarray:
        """Loss change of adding each candidate (rows of ``coverage``)."""
        current = self.row_losses(states)
        if polarity is Polarity.POS:
            gain = self.total_table[POS] - current
        else:
            gain = (states == NONE) * (self.total_table[NEG] - current)
        return coverage.astype(np.float64) @ gain
