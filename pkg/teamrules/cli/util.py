import logging
import logging.config
import os
import pathlib
from importlib import resources
from typing import Optional

import click

from teamrules.config import ExperimentConfig, load_config
from teamrules.onto import ConfigError

logger = logging.getLogger(__name__)

PRESET_PACKAGE = "teamrules.presets"


def setup_logging(logging_level: Optional[str]) -> None:
    """Load ``logging.<level>.conf`` from the working directory if present."""
    if logging_level is None:
        return
    logger_conf = pathlib.Path(f"logging.{logging_level}.conf")
    if logger_conf.is_file():
        try:
            logging.config.fileConfig(logger_conf, disable_existing_loggers=False)
            logger.debug("debug is on")
            return
        except Exception as e:
            logger.error(f"could not load {logger_conf}: {e}")
    logging.basicConfig(
        level=logging_level.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def available_presets() -> list[str]:
    root = resources.files(PRESET_PACKAGE)
    return sorted(
        p.name.removesuffix(".yaml") for p in root.iterdir() if p.name.endswith(".yaml")
    )


def resolve_preset(name: str) -> pathlib.Path:
    path = resources.files(PRESET_PACKAGE) / f"{name}.yaml"
    if not path.is_file():
        raise ConfigError(
            f"unknown preset '{name}'; available: {', '.join(available_presets())}"
        )
    return pathlib.Path(str(path))


def load_experiment(
    config_path: Optional[pathlib.Path],
    preset: Optional[str],
    seed: Optional[int] = None,
    out: Optional[pathlib.Path] = None,
) -> ExperimentConfig:
    """Load a config file or preset and apply command-line overrides."""
    if (config_path is None) == (preset is None):
        raise click.UsageError("pass exactly one of --config or --preset")
    path = config_path if config_path is not None else resolve_preset(preset)
    config = load_config(path)
    sweep = config.sweep
    if seed is not None:
        sweep = sweep.model_copy(update={"seeds": [seed]})
    if out is None and os.getenv("TEAMRULES_OUT"):
        out = pathlib.Path(os.environ["TEAMRULES_OUT"])
    return config.model_copy(
        update={"sweep": sweep, "output": out if out is not None else config.output}
    ).resolved()


def resolve_jobs(jobs: Optional[int], config: ExperimentConfig) -> int:
    if jobs is not None:
        return jobs
    env = os.getenv("TEAMRULES_JOBS")
    if env:
        try:
            return max(int(env), 1)
        except ValueError:
            raise ConfigError(
                f"TEAMRULES_JOBS must be an integer, got '{env}'"
            ) from None
    if config.sweep.jobs is not None:
        return config.sweep.jobs
    return os.cpu_count() or 1


def dump_resolved(config: ExperimentConfig) -> pathlib.Path:
    config.output.mkdir(parents=True, exist_ok=True)
    path = config.output / "config.resolved.json"
    config.serialize(path)
    logger.info(f"Resolved config written to {path}")
    return path
