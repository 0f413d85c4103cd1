"""Rule coverage, incremental rule-set coverage, and candidate pools."""

import logging

import numpy as np
from pydantic import model_validator

from teamrules.onto import (
    BasePydanticModel,
    BinarizedDataset,
    BoolArray,
    DataError,
    Polarity,
    Rule,
    RuleSet,
)

logger = logging.getLogger(__name__)


def rule_coverage(rule: Rule, columns: np.ndarray) -> np.ndarray:
    """Boolean vector: rows where every item column is true."""
    return rule.coverage(columns)


def covers(rule: Rule, dataset: BinarizedDataset, row: int) -> bool:
    if not 0 <= row < dataset.n:
        raise DataError(f"row {row} out of range for {dataset.n} rows")
    if rule.items[-1] >= dataset.m:
        raise DataError(
            f"rule item {rule.items[-1]} out of range for {dataset.m} columns"
        )
    return bool(dataset.columns[row, list(rule.items)].all())


def set_coverage(
    rs: RuleSet, dataset: BinarizedDataset
) -> tuple[np.ndarray, np.ndarray]:
    """Union coverage of R+ and of R- over the rows of ``dataset``."""
    result = []
    for polarity in Polarity:
        mask = np.zeros(dataset.n, dtype=bool)
        for rule in rs.rules(polarity):
            mask |= rule_coverage(rule, dataset.columns)
        result.append(mask)
    return result[0], result[1]


class CandidatePool(BasePydanticModel):
    """Mined candidate rules per polarity with their training-row coverage.

    Attributes:
        pos_candidates: Candidates for R+.
        neg_candidates: Candidates for R-.
        pos_coverage: (len(pos_candidates), n) coverage of each R+ candidate.
        neg_coverage: (len(neg_candidates), n) coverage of each R- candidate.
    """

    pos_candidates: list[Rule]
    neg_candidates: list[Rule]
    pos_coverage: BoolArray
    neg_coverage: BoolArray

    @model_validator(mode="after")
    def _check_shapes(self):
        for rules, cov in (
            (self.pos_candidates, self.pos_coverage),
            (self.neg_candidates, self.neg_coverage),
        ):
            if cov.ndim != 2 or cov.shape[0] != len(rules):
                raise DataError(
                    f"coverage shape {cov.shape} does not match {len(rules)} candidates"
                )
        if self.pos_coverage.shape[1] != self.neg_coverage.shape[1]:
            raise DataError("coverage matrices disagree on the row count")
        return self

    @classmethod
    def build(
        cls, dataset: BinarizedDataset, pos: list[Rule], neg: list[Rule]
    ) -> "CandidatePool":
        def matrix(rules: list[Rule]) -> np.ndarray:
            if not rules:
                return np.zeros((0, dataset.n), dtype=bool)
            return np.vstack([rule_coverage(r, dataset.columns) for r in rules])

        return cls(
            pos_candidates=pos,
            neg_candidates=neg,
            pos_coverage=matrix(pos),
            neg_coverage=matrix(neg),
        )

    @property
    def n(self) -> int:
        return self.pos_coverage.shape[1]

    def candidates(self, polarity: Polarity) -> list[Rule]:
        return self.pos_candidates if polarity is Polarity.POS else self.neg_candidates

    def coverage(self, polarity: Polarity) -> np.ndarray:
        return self.pos_coverage if polarity is Polarity.POS else self.neg_coverage

    def size(self) -> int:
        return len(self.pos_candidates) + len(self.neg_candidates)


class CoverageState:
    """Mutable rule-set state over a pool, with per-row coverage counts.

    Members are pool indices. Coverage is kept as counts so that cutting a
    rule only uncovers rows no other member of that polarity covers.
    """

    def __init__(self, pool: CandidatePool):
        self.pool = pool
        self.members: dict[Polarity, list[int]] = {p: [] for p in Polarity}
        self.counts: dict[Polarity, np.ndarray] = {
            p: np.zeros(pool.n, dtype=np.int64) for p in Polarity
        }

    def covered(self, polarity: Polarity) -> np.ndarray:
        return self.counts[polarity] > 0

    def contains(self, polarity: Polarity, index: int) -> bool:
        return index in self.members[polarity]

    def add(self, polarity: Polarity, index: int) -> None:
        if self.contains(polarity, index):
            raise ValueError(f"candidate {index} already in {polarity}")
        self.members[polarity].append(index)
        self.counts[polarity] += self.pool.coverage(polarity)[index]

    def cut(self, polarity: Polarity, index: int) -> None:
        self.members[polarity].remove(index)
        self.counts[polarity] -= self.pool.coverage(polarity)[index]

    def covering_members(self, polarity: Polarity, row: int) -> list[int]:
        cov = self.pool.coverage(polarity)
        return sorted(i for i in self.members[polarity] if cov[i, row])

    def snapshot(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return tuple(self.members[Polarity.POS]), tuple(self.members[Polarity.NEG])

    def restore(self, snapshot: tuple[tuple[int, ...], tuple[int, ...]]) -> None:
        for polarity, members in zip(Polarity, snapshot):
            self.members[polarity] = list(members)
            cov = self.pool.coverage(polarity)
            self.counts[polarity] = (
                cov[list(members)].sum(axis=0, dtype=np.int64)
                if members
                else np.zeros(self.pool.n, dtype=np.int64)
            )

    def to_rule_set(self) -> RuleSet:
        return RuleSet(
            positive=[
                self.pool.pos_candidates[i] for i in sorted(self.members[Polarity.POS])
            ],
            negative=[
                self.pool.neg_candidates[i] for i in sorted(self.members[Polarity.NEG])
            ],
        )
