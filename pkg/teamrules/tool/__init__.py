"""Tool package for teamrules.

Configurable building blocks of an experiment: dataset preparation, human
simulation, discretion models, rule coverage, candidate mining and the
team-loss objective.

The package includes:
- Binarizer: quantile thresholds into paired predicate columns
- CandidateMiner: FP-Growth or random-forest candidate rules
- DiscretionTrainer: learned p(a|x) models
- TeamObjective: per-mode row-state loss tables for the search

Example:
    >>> from teamrules.tool import Binarizer, gen_checkers
    >>> binarized = Binarizer(bins_per_feature=9)(gen_checkers(4000, seed=0))
"""

from .dataspace import Binarizer, gen_checkers, gen_gaussian, load_csv, split
from .discretion import DiscretionModel, DiscretionTrainer
from .mining import CandidateMiner, fp_growth
from .objective import TeamContext, TeamObjective
from .onto import Tool
from .rules import CandidatePool, CoverageState

__all__ = [
    "Binarizer",
    "CandidateMiner",
    "CandidatePool",
    "CoverageState",
    "DiscretionModel",
    "DiscretionTrainer",
    "TeamContext",
    "TeamObjective",
    "Tool",
    "fp_growth",
    "gen_checkers",
    "gen_gaussian",
    "load_csv",
    "split",
]
