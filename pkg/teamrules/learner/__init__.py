"""Rule-set search and deployment policy."""

from .advisor import Advisor, advise
from .anneal import (
    SearchConfig,
    anneal,
    fit,
    fit_baseline,
    search,
    select_rule_to_add,
)

__all__ = [
    "Advisor",
    "SearchConfig",
    "advise",
    "anneal",
    "fit",
    "fit_baseline",
    "search",
    "select_rule_to_add",
]
