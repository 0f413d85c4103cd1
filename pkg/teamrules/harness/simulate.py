"""Deployment of an advisor next to a simulated human."""

import logging

import numpy as np

from teamrules.learner.advisor import Advisor
from teamrules.onto import (
    NO_RECOMMENDATION,
    DataError,
    HumanProfile,
    RawDataset,
    TeamOutcome,
)

logger = logging.getLogger(__name__)


def team_outcome(
    recommendations: np.ndarray,
    profile: HumanProfile,
    labels: np.ndarray,
    alpha: float,
    cl_on_acceptance: bool = False,
) -> TeamOutcome:
    """Team decisions and losses for given per-row recommendations.

    A shown recommendation decides the row when it agrees with the human or
    the human accepts it. CL charges alpha for every shown contradiction, or
    only for accepted ones with ``cl_on_acceptance``.

    Args:
        recommendations: 1, 0 or -1 (nothing shown) per row.
        profile: The human on these rows.
        labels: True labels.
        alpha: Reconciliation cost.
        cl_on_acceptance: Charge only contradictions the human accepted.

    Returns:
        TeamOutcome: Per-row decisions and TDL, CL, TTL.
    """
    rec = np.asarray(recommendations, dtype=np.int64)
    n = rec.size
    if n == 0:
        raise DataError("cannot simulate a team on zero rows")
    if profile.n != n or labels.shape != (n,):
        raise DataError("recommendations, profile and labels differ in length")
    h, a = profile.decisions, profile.accepts
    shown = rec != NO_RECOMMENDATION
    contradicted = shown & (rec != h)
    accepted = shown & ((rec == h) | (a == 1))
    final = np.where(accepted, rec, h)
    charged = contradicted & (a == 1) if cl_on_acceptance else contradicted
    tdl = float(np.sum(final != labels)) / n
    cl = alpha * float(np.sum(charged)) / n
    return TeamOutcome(
        recommendations=rec,
        accepted=accepted.astype(np.int64),
        final_decisions=final,
        tdl=tdl,
        cl=cl,
        ttl=tdl + cl,
        contradiction_count=int(np.sum(contradicted)),
        recommendation_count=int(np.sum(shown)),
    )


def simulate_team(
    advisor: Advisor,
    profile: HumanProfile,
    raw_test: RawDataset,
    alpha: float,
    cl_on_acceptance: bool = False,
) -> TeamOutcome:
    """Advise every test row and let the simulated human decide."""
    outcome = team_outcome(
        advisor.advise_many(raw_test),
        profile,
        raw_test.labels,
        alpha,
        cl_on_acceptance,
    )
    logger.debug(
        f"{advisor.mode} on {raw_test.n} rows: TTL {outcome.ttl:.4f} "
        f"(TDL {outcome.tdl:.4f}, CL {outcome.cl:.4f}), "
        f"{outcome.recommendation_count} shown, "
        f"{outcome.contradiction_count} contradicting"
    )
    return outcome


def human_alone(profile: HumanProfile, labels: np.ndarray) -> TeamOutcome:
    return team_outcome(
        np.full(profile.n, NO_RECOMMENDATION), profile, labels, alpha=0.0
    )
