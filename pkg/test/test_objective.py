import numpy as np
import pytest

from teamrules.onto import Polarity, RuleSet, SearchMode, TeamDecision
from teamrules.tool.objective import (
    NONE,
    POS,
    TeamObjective,
    closed_form_loss,
    loss,
    per_instance_loss,
    per_instance_losses,
    team_decision,
    team_decisions,
)
from teamrules.tool.rules import set_coverage


def test_toy_loss(toy_context):
    ctx, rs = toy_context
    result = loss(ctx, rs)
    assert result.decision_loss == pytest.approx(1.4)
    assert result.reconciliation_loss == pytest.approx(0.2)
    assert result.total == pytest.approx(1.6)
    assert per_instance_losses(ctx, rs) == pytest.approx([0.1, 0.6, 0.9])
    assert per_instance_loss(ctx, rs, 2) == pytest.approx(0.9)


def test_empty_rule_set_is_the_human_alone(toy_context):
    ctx, _ = toy_context
    result = loss(ctx, RuleSet())
    assert result.reconciliation_loss == 0.0
    assert result.decision_loss == pytest.approx(0.8 + 0.9)
    assert team_decisions(RuleSet(), ctx.dataset).tolist() == [-1, -1, -1]


def test_positive_rules_take_precedence(toy_context):
    ctx, rs = toy_context
    both = RuleSet(positive=rs.positive, negative=rs.positive)
    assert team_decision(both, ctx.dataset, 0) == TeamDecision.ONE
    assert team_decision(both, ctx.dataset, 2) == TeamDecision.ABSTAIN
    only_neg = RuleSet(negative=rs.positive)
    assert team_decisions(only_neg, ctx.dataset).tolist() == [0, 0, -1]


def test_closed_form_equals_the_decision_process(
    make_random_context, make_random_rule_set
):
    rng = np.random.default_rng(42)
    for _ in range(1000):
        ctx = make_random_context(rng)
        rs = make_random_rule_set(rng, ctx.dataset.m)
        assert closed_form_loss(ctx, rs) == loss(ctx, rs)


def test_per_instance_losses_sum_to_the_total(
    make_random_context, make_random_rule_set
):
    rng = np.random.default_rng(7)
    for _ in range(100):
        ctx = make_random_context(rng)
        rs = make_random_rule_set(rng, ctx.dataset.m)
        assert per_instance_losses(ctx, rs).sum() == pytest.approx(loss(ctx, rs).total)


def test_teamrules_tables_reproduce_the_loss(
    make_random_context, make_random_rule_set
):
    rng = np.random.default_rng(3)
    for _ in range(200):
        ctx = make_random_context(rng)
        rs = make_random_rule_set(rng, ctx.dataset.m)
        objective = TeamObjective(ctx, SearchMode.TEAMRULES)
        states = objective.states(*set_coverage(rs, ctx.dataset))
        expected = loss(ctx, rs)
        got = objective.breakdown(states)
        assert got.decision_loss == pytest.approx(expected.decision_loss)
        assert got.reconciliation_loss == pytest.approx(expected.reconciliation_loss)
        assert objective.row_losses(states) == pytest.approx(
            per_instance_losses(ctx, rs)
        )


def test_delta_add_matches_recomputation(make_random_context, make_random_rule_set):
    rng = np.random.default_rng(11)
    for _ in range(100):
        ctx = make_random_context(rng)
        rs = make_random_rule_set(rng, ctx.dataset.m)
        objective = TeamObjective(ctx, SearchMode.TEAMRULES)
        pos, neg = set_coverage(rs, ctx.dataset)
        states = objective.states(pos, neg)
        base = objective.breakdown(states).total
        coverage = ctx.dataset.columns.T
        for polarity in Polarity:
            deltas = objective.delta_add(polarity, coverage, states)
            for j in range(coverage.shape[0]):
                if polarity is Polarity.POS:
                    new = objective.states(pos | coverage[j], neg)
                else:
                    new = objective.states(pos, neg | coverage[j])
                after = objective.breakdown(new).total
                assert deltas[j] == pytest.approx(after - base)


def test_baseline_tables(toy_context):
    ctx, rs = toy_context
    states = TeamObjective.states(*set_coverage(rs, ctx.dataset))
    assert states.tolist() == [POS, POS, NONE]

    hyrs = TeamObjective(ctx, SearchMode.HYRS_ADAPTED)
    # every covered row pays alpha and discretion is ignored
    assert hyrs.breakdown(states).reconciliation_loss == pytest.approx(0.2)
    assert hyrs.breakdown(states).decision_loss == pytest.approx(2.0)

    brs = TeamObjective(ctx, SearchMode.BRS_LIKE, default_label=1)
    assert brs.breakdown(states).reconciliation_loss == 0.0
    assert brs.breakdown(states).decision_loss == pytest.approx(1.0)

    fc = TeamObjective(ctx, SearchMode.FULL_COVERAGE_TR, default_label=1)
    # the uncovered row receives the default label, contradicting h = 0
    assert fc.breakdown(states).reconciliation_loss == pytest.approx(0.3)
    assert fc.breakdown(states).decision_loss == pytest.approx(0.5)


def test_alpha_is_bounded(toy_context):
    ctx, _ = toy_context
    with pytest.raises(ValueError):
        ctx.with_alpha(1.5)
