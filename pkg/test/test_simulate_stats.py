import numpy as np
import pytest

from teamrules.harness.simulate import human_alone, team_outcome
from teamrules.harness.stats import mean_se, paired_ttest, spearman
from teamrules.onto import DataError, HumanProfile


@pytest.fixture
def profile():
    return HumanProfile(decisions=[0, 1, 1, 0], accepts=[1, 0, 1, 0])


def test_team_outcome(profile):
    labels = np.array([1, 0, 1, 0])
    outcome = team_outcome(np.array([1, 0, -1, 1]), profile, labels, alpha=0.2)
    # row 0 accepted, row 1 rejected, row 2 not shown, row 3 rejected
    assert outcome.final_decisions.tolist() == [1, 1, 1, 0]
    assert outcome.accepted.tolist() == [1, 0, 0, 0]
    assert outcome.contradiction_count == 3
    assert outcome.recommendation_count == 3
    assert outcome.tdl == pytest.approx(0.25)
    assert outcome.cl == pytest.approx(0.2 * 3 / 4)
    assert outcome.ttl == outcome.tdl + outcome.cl


def test_cl_on_acceptance_only(profile):
    labels = np.array([1, 0, 1, 0])
    outcome = team_outcome(
        np.array([1, 0, -1, 1]), profile, labels, alpha=0.2, cl_on_acceptance=True
    )
    assert outcome.cl == pytest.approx(0.2 / 4)


def test_agreeing_advice_costs_nothing(profile):
    labels = np.array([0, 1, 1, 0])
    outcome = team_outcome(profile.decisions, profile, labels, alpha=1.0)
    assert outcome.ttl == 0.0
    assert outcome.contradiction_count == 0


def test_human_alone(profile):
    outcome = human_alone(profile, np.array([1, 1, 1, 1]))
    assert outcome.tdl == 0.5
    assert outcome.recommendation_count == 0


def test_team_outcome_rejects_bad_input(profile):
    with pytest.raises(DataError):
        team_outcome(np.array([], dtype=int), profile, np.array([]), alpha=0.0)
    with pytest.raises(DataError):
        team_outcome(np.array([1, 0]), profile, np.array([1, 0]), alpha=0.0)


def test_paired_ttest():
    assert paired_ttest([0, 0, 0], [1, 2, 3]) == pytest.approx(0.0370, abs=1e-3)
    assert paired_ttest([1, 2, 3], [0, 0, 0]) > 0.9


def test_paired_ttest_constant_differences():
    assert paired_ttest([1, 2, 3], [2, 3, 4]) == 0.0
    assert paired_ttest([1, 2, 3], [1, 2, 3]) == 0.5
    assert paired_ttest([2, 3, 4], [1, 2, 3]) == 1.0


def test_paired_ttest_differences_equal_up_to_rounding():
    a = [0.1 + 0.2, 0.7, 0.05]
    b = [0.3, 0.6 + 0.1, 0.05]
    assert paired_ttest(a, b) == 0.5
    shifted = [x - 0.1 for x in [0.3, 0.6 + 0.1, 0.15]]
    assert paired_ttest(shifted, [0.3, 0.7, 0.15]) == 0.0


def test_paired_ttest_needs_pairs():
    with pytest.raises(DataError):
        paired_ttest([1.0], [2.0])
    with pytest.raises(DataError):
        paired_ttest([1.0, 2.0], [2.0])


def test_spearman():
    assert spearman([0.0, 0.5, 1.0], [10, 5, 1]) == pytest.approx(-1.0)
    assert spearman([0.0, 0.5, 1.0], [3, 3, 3]) == 0.0
    assert spearman([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8)


def test_mean_se():
    assert mean_se([2.0]) == (2.0, 0.0)
    mean, se = mean_se([1.0, 2.0, 3.0])
    assert mean == 2.0
    assert se == pytest.approx(1.0 / np.sqrt(3.0))
