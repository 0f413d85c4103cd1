"""Deployment-time advising policy."""

import logging
from typing import Optional

import numpy as np
from pydantic import Field

from teamrules.onto import (
    NO_RECOMMENDATION,
    BasePydanticModel,
    FitResult,
    Predicate,
    RawDataset,
    RuleSet,
    SearchMode,
    TeamDecision,
)
from teamrules.tool.dataspace import Binarizer
from teamrules.tool.discretion import DiscretionModel
from teamrules.tool.objective import team_decisions

logger = logging.getLogger(__name__)


class Advisor(BasePydanticModel):
    """A fitted rule set plus the policy deciding when to show its advice.

    teamrules shows covered rows' advice only when p(a|x) >= tau; hyrs shows
    advice wherever covered; brs and fc_tr advise every row, falling back to
    the default label where no rule covers.

    Attributes:
        rule_set: Fitted rules.
        predicates: Predicates the rule items index into.
        mode: Search mode the rules were fitted under.
        default_label: Recommendation for uncovered rows in full-coverage modes.
        gate_threshold: tau.
        discretion: Discretion model used by the gate.
    """

    rule_set: RuleSet
    predicates: list[Predicate]
    mode: SearchMode = SearchMode.TEAMRULES
    default_label: int = 0
    gate_threshold: float = Field(default=0.5, ge=0.0, le=1.0)
    discretion: Optional[DiscretionModel] = None

    @classmethod
    def from_fit(
        cls,
        result: FitResult,
        predicates: list[Predicate],
        discretion: Optional[DiscretionModel],
        gate_threshold: float,
    ) -> "Advisor":
        return cls(
            rule_set=result.rule_set,
            predicates=predicates,
            mode=result.mode,
            default_label=result.default_label,
            gate_threshold=gate_threshold,
            discretion=discretion,
        )

    def advise_many(self, raw: RawDataset) -> np.ndarray:
        """Recommendation per row: 1, 0, or -1 for no recommendation."""
        decisions = team_decisions(self.rule_set, Binarizer.apply(raw, self.predicates))
        abstain = decisions == TeamDecision.ABSTAIN
        if self.mode.full_coverage:
            return np.where(abstain, self.default_label, decisions)
        if not self.mode.gated:
            return decisions
        if self.discretion is None:
            raise ValueError("the teamrules gate needs a discretion model")
        p_accept = self.discretion.predict_many(raw.rows)
        show = ~abstain & (p_accept >= self.gate_threshold)
        return np.where(show, decisions, NO_RECOMMENDATION)

    def advise(self, row, feature_names: list[str]) -> Optional[int]:
        raw = RawDataset(
            feature_names=feature_names,
            rows=np.asarray(row, dtype=np.float64)[None, :],
            labels=np.zeros(1, dtype=np.int64),
        )
        rec = int(self.advise_many(raw)[0])
        return None if rec == NO_RECOMMENDATION else rec


def advise(
    rs: RuleSet,
    disc: DiscretionModel,
    row,
    tau: float,
    predicates: list[Predicate],
    mode: SearchMode = SearchMode.TEAMRULES,
    default_label: int = 0,
) -> Optional[int]:
    """Recommendation for one raw row, or None when no advice is shown."""
    advisor = Advisor(
        rule_set=rs,
        predicates=predicates,
        mode=mode,
        default_label=default_label,
        gate_threshold=tau,
        discretion=disc,
    )
    return advisor.advise(row, disc.feature_names)
