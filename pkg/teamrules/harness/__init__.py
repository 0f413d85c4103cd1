"""Deployment simulation, sweeps, statistics and results files."""

from .pipeline import (
    SweepResult,
    prepare_scenario,
    run_single,
    sweep_alpha,
    sweep_discretion,
)
from .report import comparison_frame, emit_results, load_results
from .simulate import simulate_team, team_outcome
from .stats import paired_ttest

__all__ = [
    "SweepResult",
    "comparison_frame",
    "emit_results",
    "load_results",
    "paired_ttest",
    "prepare_scenario",
    "run_single",
    "simulate_team",
    "sweep_alpha",
    "sweep_discretion",
    "team_outcome",
]
