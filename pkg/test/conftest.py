import numpy as np
import pytest

from teamrules.config import parse_config
from teamrules.onto import (
    BinarizedDataset,
    Direction,
    Polarity,
    Predicate,
    RawDataset,
    Rule,
    RuleSet,
)
from teamrules.tool.dataspace import Binarizer, gen_checkers
from teamrules.tool.objective import TeamContext


@pytest.fixture
def checkers_small() -> RawDataset:
    return gen_checkers(400, seed=3)


@pytest.fixture
def checkers_binarized(checkers_small) -> BinarizedDataset:
    return Binarizer(bins_per_feature=9)(checkers_small)


@pytest.fixture
def toy_predicates() -> list[Predicate]:
    return [
        Predicate(
            feature_index=0, feature_name="x", direction=Direction.GEQ, threshold=0.5
        ),
        Predicate(
            feature_index=0, feature_name="x", direction=Direction.LT, threshold=0.5
        ),
    ]


@pytest.fixture
def toy_context(toy_predicates):
    """Three rows: two covered by ``x >= 0.5``, one uncovered."""
    raw = RawDataset(
        feature_names=["x"],
        rows=[[1.0], [1.0], [0.0]],
        labels=[1, 0, 1],
    )
    ctx = TeamContext(
        dataset=Binarizer.apply(raw, toy_predicates),
        human_decisions=[0, 0, 0],
        accept_weights=[0.8, 0.5, 0.9],
        alpha=0.1,
    )
    return ctx, RuleSet(positive=[Rule(items=(0,))])


def random_context(rng: np.random.Generator, max_rows: int = 20) -> TeamContext:
    n = int(rng.integers(2, max_rows + 1))
    raw = RawDataset(
        feature_names=["a", "b", "c"],
        rows=rng.uniform(0.0, 1.0, size=(n, 3)),
        labels=rng.integers(0, 2, size=n),
    )
    return TeamContext(
        dataset=Binarizer(bins_per_feature=3)(raw),
        human_decisions=rng.integers(0, 2, size=n),
        accept_weights=rng.uniform(0.0, 1.0, size=n),
        alpha=float(rng.uniform(0.0, 1.0)),
    )


def random_rule_set(rng: np.random.Generator, m: int) -> RuleSet:
    rules = {}
    for polarity in Polarity:
        picked = set()
        for _ in range(int(rng.integers(0, 4))):
            k = int(rng.integers(1, 3))
            picked.add(tuple(sorted(set(rng.integers(0, m, size=k).tolist()))))
        rules[polarity] = [Rule(items=items) for items in sorted(picked)]
    return RuleSet(positive=rules[Polarity.POS], negative=rules[Polarity.NEG])


@pytest.fixture
def make_random_context():
    return random_context


@pytest.fixture
def make_random_rule_set():
    return random_rule_set


@pytest.fixture
def tiny_config_data(tmp_path) -> dict:
    """A fast Checkers experiment: few rows and iterations."""
    return {
        "name": "tiny",
        "dataset": {"kind": "checkers", "n": 360},
        "search": {"iterations": 60},
        "sweep": {
            "alphas": [0.0],
            "seeds": [0],
            "modes": ["teamrules"],
            "adb_modes": ["neutral"],
        },
        "output": str(tmp_path / "out"),
    }


@pytest.fixture
def tiny_config(tiny_config_data):
    return parse_config(tiny_config_data).resolved()
