import logging

from teamrules.config import ExperimentConfig
from teamrules.onto import ConfigError
from teamrules.tool import Binarizer, CandidateMiner, DiscretionTrainer

logger = logging.getLogger(__name__)


class ToolBox:
    """A container for the configured tools of one experiment.

    Args:
        config: A resolved ExperimentConfig.
        seed: Seed for tools with randomness of their own (forest mining).
    """

    def __init__(self, **kwargs):
        config: ExperimentConfig = kwargs.pop("config")
        seed: int = kwargs.pop("seed", 0)
        if config.dataset.bins_per_feature is None:
            raise ConfigError("ToolBox needs a resolved config")

        self.binarizer: Binarizer = Binarizer(
            bins_per_feature=config.dataset.bins_per_feature
        )
        self.miner: CandidateMiner = CandidateMiner(
            source=config.search.candidate_source,
            min_support=config.search.min_support,
            max_length=config.search.max_rule_length,
            max_candidates=config.search.max_candidates,
            n_estimators=config.search.n_estimators,
            seed=seed,
        )
        self.discretion_trainer: DiscretionTrainer = DiscretionTrainer(
            learner=config.discretion.learner,
            n_rounds=config.discretion.n_rounds,
            learning_rate=config.discretion.learning_rate,
        )
        for tool in (self.binarizer, self.miner, self.discretion_trainer):
            logger.debug(f"Configured {tool}")
