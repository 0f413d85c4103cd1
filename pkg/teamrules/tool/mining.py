"""Candidate rule mining.

Frequent itemsets over predicate columns are mined with FP-Growth,
separately on positive-label and negative-label rows, and become the R+
and R- candidates. A random-forest path extractor is available as an
alternative source.
"""

import logging
import math
from collections import defaultdict
from itertools import combinations
from typing import Iterable, Optional

import numpy as np
from pydantic import Field
from sklearn.ensemble import RandomForestClassifier

from teamrules.util import StrEnum
from teamrules.onto import BinarizedDataset, MiningError, Polarity, Rule
from teamrules.tool.onto import Tool
from teamrules.tool.rules import CandidatePool

logger = logging.getLogger(__name__)


class CandidateSource(StrEnum):
    FPGROWTH = "fpgrowth"
    FOREST = "forest"


class FPNode:
    __slots__ = ("item", "count", "parent", "children")

    def __init__(self, item: Optional[int], parent: Optional["FPNode"]):
        self.item = item
        self.count = 0
        self.parent = parent
        self.children: dict[int, FPNode] = {}


class FPTree:
    """Prefix tree of weighted transactions with a header table.

    Items below ``min_count`` are dropped; the rest are inserted in
    descending support order (ties by item index).
    """

    def __init__(self, transactions: Iterable[tuple[list[int], int]], min_count: int):
        transactions = list(transactions)
        support: dict[int, int] = defaultdict(int)
        for items, weight in transactions:
            for item in items:
                support[item] += weight
        self.support = {i: c for i, c in support.items() if c >= min_count}
        self.root = FPNode(None, None)
        self.header: dict[int, list[FPNode]] = defaultdict(list)
        for items, weight in transactions:
            kept = sorted(
                (i for i in items if i in self.support),
                key=lambda i: (-self.support[i], i),
            )
            self._insert(kept, weight)

    def _insert(self, items: list[int], weight: int) -> None:
        node = self.root
        for item in items:
            child = node.children.get(item)
            if child is None:
                child = FPNode(item, node)
                node.children[item] = child
                self.header[item].append(child)
            child.count += weight
            node = child

    def prefix_paths(self, item: int) -> list[tuple[list[int], int]]:
        """Conditional pattern base of ``item``: ancestor paths with counts."""
        paths = []
        for node in self.header[item]:
            path = []
            parent = node.parent
            while parent is not None and parent.item is not None:
                path.append(parent.item)
                parent = parent.parent
            if path:
                paths.append((path[::-1], node.count))
        return paths


def _grow(
    tree: FPTree,
    suffix: tuple[int, ...],
    min_count: int,
    max_length: int,
    out: dict[tuple[int, ...], int],
) -> None:
    for item in sorted(tree.support, key=lambda i: (tree.support[i], i)):
        itemset = tuple(sorted(suffix + (item,)))
        out[itemset] = tree.support[item]
        if len(itemset) < max_length:
            conditional = FPTree(tree.prefix_paths(item), min_count)
            if conditional.support:
                _grow(conditional, itemset, min_count, max_length, out)


def fp_growth(
    columns: np.ndarray, min_count: int, max_length: int
) -> dict[tuple[int, ...], int]:
    """Frequent itemsets of a boolean matrix (rows are transactions).

    Args:
        columns: Boolean (n, m) matrix.
        min_count: Minimum number of rows containing the itemset.
        max_length: Maximum itemset size.

    Returns:
        dict: Sorted column-index tuple to its row count.
    """
    transactions = [(np.flatnonzero(row).tolist(), 1) for row in columns]
    out: dict[tuple[int, ...], int] = {}
    tree = FPTree(transactions, max(min_count, 1))
    _grow(tree, (), max(min_count, 1), max_length, out)
    return dict(sorted(out.items()))


def enumerate_itemsets(
    columns: np.ndarray, min_count: int, max_length: int
) -> dict[tuple[int, ...], int]:
    """Exhaustive itemset counting; exponential in the column count."""
    out = {}
    m = columns.shape[1]
    for k in range(1, max_length + 1):
        for items in combinations(range(m), k):
            count = int(columns[:, list(items)].all(axis=1).sum())
            if count >= max(min_count, 1):
                out[items] = count
    return dict(sorted(out.items()))


def min_support_count(fraction: float, n: int) -> int:
    return max(1, math.ceil(fraction * n - 1e-9))


def _rank(
    dataset: BinarizedDataset,
    itemsets: Iterable[tuple[int, ...]],
    polarity: Polarity,
    max_candidates: int,
) -> list[Rule]:
    positive = dataset.labels == 1
    scored = []
    for items in itemsets:
        cov = dataset.columns[:, list(items)].all(axis=1)
        s_pos = int((cov & positive).sum())
        s_neg = int((cov & ~positive).sum())
        within = s_pos if polarity is Polarity.POS else s_neg
        total = s_pos + s_neg
        precision = within / total if total else 0.0
        scored.append((-precision, -within, items, s_pos, s_neg))
    scored.sort(key=lambda t: t[:3])
    if len(scored) > max_candidates:
        logger.debug(
            f"Truncating {len(scored)} {polarity} candidates to {max_candidates}"
        )
    return [
        Rule(items=items, support_pos=s_pos, support_neg=s_neg)
        for _, _, items, s_pos, s_neg in scored[:max_candidates]
    ]


def forest_itemsets(
    dataset: BinarizedDataset,
    max_length: int,
    n_estimators: int,
    seed: int,
) -> dict[Polarity, set[tuple[int, ...]]]:
    """Root-to-node paths of a random forest over the predicate columns.

    A node's path becomes a candidate of the polarity of its majority class.
    False branches map to the complementary predicate column.
    """
    forest = RandomForestClassifier(
        n_estimators=n_estimators, max_depth=max_length, random_state=seed
    )
    forest.fit(dataset.columns.astype(np.float64), dataset.labels)
    complement = dataset.complement_index
    classes = list(forest.classes_)
    found: dict[Polarity, set[tuple[int, ...]]] = {p: set() for p in Polarity}
    for estimator in forest.estimators_:
        tree = estimator.tree_
        stack = [(0, ())]
        while stack:
            node, path = stack.pop()
            if path:
                label = classes[int(np.argmax(tree.value[node][0]))]
                found[Polarity.of_label(int(label))].add(tuple(sorted(set(path))))
            left, right = tree.children_left[node], tree.children_right[node]
            if left == -1:
                continue
            feature = int(tree.feature[node])
            stack.append((left, path + (complement[feature],)))
            stack.append((right, path + (feature,)))
    return found


class CandidateMiner(Tool):
    """Builds the candidate pool for the annealing search.

    Attributes:
        source: FP-Growth itemsets or random-forest paths.
        min_support: Minimum support as a fraction of the polarity's rows.
        max_length: Maximum number of predicates per rule.
        max_candidates: Per-polarity cap, keeping the most precise.
        n_estimators: Trees for the forest source.
        seed: Seed for the forest source.
    """

    source: CandidateSource = CandidateSource.FPGROWTH
    min_support: float = Field(default=0.05, gt=0.0, lt=1.0)
    max_length: int = Field(default=1, ge=1)
    max_candidates: int = Field(default=10000, ge=1)
    n_estimators: int = Field(default=50, ge=1)
    seed: int = 0

    def __init__(self, **kwargs):
        super().__init__(**kwargs)

    def _itemsets(
        self, dataset: BinarizedDataset, polarity: Polarity
    ) -> dict[tuple[int, ...], int]:
        rows = dataset.columns[dataset.labels == polarity.label]
        if rows.shape[0] == 0:
            return {}
        return fp_growth(
            rows, min_support_count(self.min_support, rows.shape[0]), self.max_length
        )

    def __call__(self, dataset: BinarizedDataset) -> CandidatePool:
        if self.source == CandidateSource.FOREST:
            paths = forest_itemsets(
                dataset, self.max_length, self.n_estimators, self.seed
            )
        rules: dict[Polarity, list[Rule]] = {}
        for polarity in Polarity:
            frequent = self._itemsets(dataset, polarity)
            if self.source == CandidateSource.FOREST:
                frequent = {k: v for k, v in frequent.items() if k in paths[polarity]}
            rules[polarity] = _rank(
                dataset, frequent, polarity, self.max_candidates
            )
        if not rules[Polarity.POS] and not rules[Polarity.NEG]:
            raise MiningError(
                f"no candidate rules at min_support={self.min_support}, "
                f"max_length={self.max_length}; try a lower min_support"
            )
        logger.info(
            f"Mined {len(rules[Polarity.POS])} R+ and {len(rules[Polarity.NEG])} R- "
            f"candidates ({self.source})"
        )
        return CandidatePool.build(dataset, rules[Polarity.POS], rules[Polarity.NEG])


def mine_candidates(
    dataset: BinarizedDataset,
    labels: Optional[np.ndarray] = None,
    min_support_fraction: float = 0.05,
    max_length: int = 1,
    max_candidates: int = 10000,
) -> CandidatePool:
    """FP-Growth candidate pool; ``labels`` overrides the dataset's labels."""
    if labels is not None:
        dataset = dataset.model_copy(update={"labels": np.asarray(labels)})
    return CandidateMiner(
        min_support=min_support_fraction,
        max_length=max_length,
        max_candidates=max_candidates,
    )(dataset)
