import numpy as np
import pytest

from teamrules.learner.advisor import Advisor, advise
from teamrules.learner.anneal import (
    SearchConfig,
    fit,
    fit_baseline,
    majority_label,
    search,
    select_rule_to_add,
)
from teamrules.onto import (
    DiscretionKind,
    Polarity,
    RawDataset,
    Rule,
    RuleSet,
    SearchMode,
)
from teamrules.tool.discretion import ConstantPredictor, DiscretionModel
from teamrules.tool.mining import CandidateMiner
from teamrules.tool.objective import TeamContext, TeamObjective, loss
from teamrules.tool.rules import CandidatePool, CoverageState


def _pool(ctx: TeamContext, max_length: int = 2) -> CandidatePool:
    return CandidateMiner(min_support=0.05, max_length=max_length)(ctx.dataset)


def _constant_discretion(value: float) -> DiscretionModel:
    return DiscretionModel(
        kind=DiscretionKind.LEARNED,
        predictor=ConstantPredictor(value=value),
        feature_names=["x"],
        training_size=0,
        holdout_accuracy=1.0,
    )


def test_search_never_ends_above_the_empty_set(make_random_context):
    rng = np.random.default_rng(5)
    for k in range(100):
        ctx = make_random_context(rng, max_rows=30)
        result = fit(ctx, _pool(ctx), SearchConfig(iterations=50, seed=k))
        assert result.best_training_loss.total <= loss(ctx, RuleSet()).total
        assert result.best_training_loss.total == pytest.approx(
            loss(ctx, result.rule_set).total
        )
        trace = result.loss_trace
        assert all(b <= a for a, b in zip(trace, trace[1:]))
        assert len(trace) <= 50


def test_search_is_seeded(make_random_context):
    ctx = make_random_context(np.random.default_rng(8), max_rows=40)
    pool = _pool(ctx)
    a = fit(ctx, pool, SearchConfig(iterations=80, seed=3))
    b = fit(ctx, pool, SearchConfig(iterations=80, seed=3))
    assert a.rule_set == b.rule_set
    assert a.loss_trace == b.loss_trace


def test_full_cost_keeps_the_rule_set_empty(make_random_context):
    rng = np.random.default_rng(13)
    for k in range(30):
        ctx = make_random_context(rng, max_rows=30).with_alpha(1.0)
        result = fit(ctx, _pool(ctx), SearchConfig(iterations=60, seed=k))
        assert result.rule_set.is_empty()


def test_perfect_human_needs_no_advice(make_random_context):
    ctx = make_random_context(np.random.default_rng(2), max_rows=30)
    perfect = TeamContext(
        dataset=ctx.dataset,
        human_decisions=ctx.labels,
        accept_weights=ctx.accept_weights,
        alpha=0.0,
    )
    result = fit(perfect, _pool(perfect), SearchConfig(iterations=40))
    assert result.rule_set.is_empty()
    assert result.best_training_loss.total == 0.0
    assert result.loss_trace == []


def test_hyrs_ignores_discretion(make_random_context):
    ctx = make_random_context(np.random.default_rng(21), max_rows=30)
    flipped = TeamContext(
        dataset=ctx.dataset,
        human_decisions=ctx.human_decisions,
        accept_weights=1.0 - ctx.accept_weights,
        alpha=ctx.alpha,
    )
    pool = _pool(ctx)
    cfg = SearchConfig(iterations=60, seed=4, mode=SearchMode.HYRS_ADAPTED)
    assert fit_baseline(ctx, pool, cfg).rule_set == fit_baseline(
        flipped, pool, cfg
    ).rule_set


def test_modes_are_dispatched(make_random_context):
    ctx = make_random_context(np.random.default_rng(1))
    pool = _pool(ctx)
    with pytest.raises(ValueError):
        fit(ctx, pool, SearchConfig(mode=SearchMode.BRS_LIKE))
    with pytest.raises(ValueError):
        fit_baseline(ctx, pool, SearchConfig(mode=SearchMode.TEAMRULES))
    for mode in SearchMode:
        result = search(ctx, pool, SearchConfig(iterations=10, mode=mode))
        assert result.mode == mode
        assert result.default_label == majority_label(ctx.labels)


def test_pool_must_match_the_context(toy_context, checkers_binarized):
    ctx, _ = toy_context
    pool = CandidateMiner()(checkers_binarized)
    with pytest.raises(ValueError, match="pool covers"):
        fit(ctx, pool, SearchConfig(iterations=5))


def test_majority_label_ties_go_to_zero():
    assert majority_label(np.array([1, 0])) == 0
    assert majority_label(np.array([1, 1, 0])) == 1
    assert majority_label(np.array([0, 0, 1])) == 0


@pytest.fixture
def toy_pool():
    # candidate 0 covers rows 0 and 2, candidate 1 covers rows 0 and 1
    return CandidatePool(
        pos_candidates=[Rule(items=(0,)), Rule(items=(1,))],
        neg_candidates=[Rule(items=(1,))],
        pos_coverage=np.array([[True, False, True], [True, True, False]]),
        neg_coverage=np.array([[False, True, False]]),
    )


def test_select_rule_to_add_prefers_the_best_addition(toy_context, toy_pool):
    ctx, _ = toy_context
    objective = TeamObjective(ctx, SearchMode.TEAMRULES)
    state = CoverageState(toy_pool)
    rng = np.random.default_rng(0)
    picks = {
        select_rule_to_add(toy_pool, Polarity.POS, 0, objective, state, 0.05, rng)
        for _ in range(20)
    }
    assert picks == {0}
    picks = {
        select_rule_to_add(toy_pool, Polarity.POS, 0, objective, state, 1.0, rng)
        for _ in range(50)
    }
    assert picks == {0, 1}


def test_select_rule_to_add_without_candidates(toy_context, toy_pool):
    ctx, _ = toy_context
    objective = TeamObjective(ctx, SearchMode.TEAMRULES)
    state = CoverageState(toy_pool)
    rng = np.random.default_rng(0)
    assert (
        select_rule_to_add(toy_pool, Polarity.NEG, 0, objective, state, 0.05, rng)
        is None
    )
    state.add(Polarity.POS, 0)
    assert (
        select_rule_to_add(toy_pool, Polarity.POS, 2, objective, state, 0.05, rng)
        is None
    )


def test_advise_gate(toy_predicates):
    rs = RuleSet(positive=[Rule(items=(0,))])
    assert advise(rs, _constant_discretion(0.4), [1.0], 0.5, toy_predicates) is None
    assert advise(rs, _constant_discretion(0.9), [1.0], 0.5, toy_predicates) == 1
    assert advise(rs, _constant_discretion(0.9), [0.0], 0.5, toy_predicates) is None
    assert advise(rs, _constant_discretion(0.5), [1.0], 0.5, toy_predicates) == 1


def test_advisor_policies(toy_predicates):
    rs = RuleSet(negative=[Rule(items=(0,))])
    raw = RawDataset(feature_names=["x"], rows=[[1.0], [0.0]], labels=[0, 1])
    low = _constant_discretion(0.1)

    gated = Advisor(rule_set=rs, predicates=toy_predicates, discretion=low)
    assert gated.advise_many(raw).tolist() == [-1, -1]

    hyrs = Advisor(
        rule_set=rs,
        predicates=toy_predicates,
        mode=SearchMode.HYRS_ADAPTED,
        discretion=low,
    )
    assert hyrs.advise_many(raw).tolist() == [0, -1]

    for mode in (SearchMode.BRS_LIKE, SearchMode.FULL_COVERAGE_TR):
        full = Advisor(
            rule_set=rs, predicates=toy_predicates, mode=mode, default_label=1
        )
        assert full.advise_many(raw).tolist() == [0, 1]

    with pytest.raises(ValueError, match="discretion"):
        Advisor(rule_set=rs, predicates=toy_predicates).advise_many(raw)


def test_checkers_fit_uses_short_rules(checkers_binarized):
    raw = checkers_binarized.source
    h = np.where(raw.rows[:, 0] > raw.rows[:, 1], 1 - raw.labels, raw.labels)
    ctx = TeamContext(
        dataset=checkers_binarized,
        human_decisions=h,
        accept_weights=np.ones(raw.n),
        alpha=0.0,
    )
    pool = _pool(ctx, max_length=1)
    result = fit(ctx, pool, SearchConfig(iterations=300, seed=0))
    assert not result.rule_set.is_empty()
    assert all(len(r) == 1 for p in Polarity for r in result.rule_set.rules(p))
    assert result.best_training_loss.total < loss(ctx, RuleSet()).total
    assert result.rules_text == result.rule_set.to_text(checkers_binarized.predicates)
