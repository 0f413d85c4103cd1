import json

import pytest

from teamrules.cli.util import available_presets, load_experiment, resolve_preset
from teamrules.config import (
    CHECKERS_RULE_LENGTH,
    CSV_BINS,
    DEFAULT_RULE_LENGTH,
    SYNTHETIC_BINS,
    ExperimentConfig,
    load_config,
    parse_config,
)
from teamrules.onto import ConfigError


def test_errors_name_the_field():
    with pytest.raises(ConfigError, match=r"search\.iterations"):
        parse_config({"search": {"iterations": 0}})
    with pytest.raises(ConfigError, match=r"dataset\.bogus"):
        parse_config({"dataset": {"bogus": 1}})
    with pytest.raises(ConfigError, match="path"):
        parse_config({"dataset": {"kind": "csv"}})
    with pytest.raises(ConfigError, match=r"sweep"):
        parse_config({"sweep": {"alphas": [1.5]}})


def test_resolved_defaults():
    checkers = parse_config({}).resolved()
    assert checkers.dataset.name == "checkers"
    assert checkers.dataset.bins_per_feature == SYNTHETIC_BINS
    assert checkers.search.max_rule_length == CHECKERS_RULE_LENGTH

    gaussian = parse_config({"dataset": {"kind": "gaussian"}}).resolved()
    assert gaussian.search.max_rule_length == DEFAULT_RULE_LENGTH

    csv = parse_config({"dataset": {"kind": "csv", "path": "data/hr.csv"}}).resolved()
    assert csv.dataset.name == "hr"
    assert csv.dataset.bins_per_feature == CSV_BINS
    assert csv.search.max_rule_length == DEFAULT_RULE_LENGTH


def test_explicit_values_survive_resolution():
    config = parse_config(
        {
            "dataset": {"kind": "checkers", "bins_per_feature": 5},
            "search": {"max_rule_length": 2, "iterations": 10},
        }
    ).resolved()
    assert config.dataset.bins_per_feature == 5
    assert config.search.max_rule_length == 2
    assert config.search.iterations == 10
    assert config.resolved().model_dump() == config.model_dump()


def test_search_defaults():
    search = parse_config({}).search
    assert search.iterations == 500
    assert search.temperature_base == 0.01
    assert search.min_support == 0.05
    assert search.max_candidates == 10000
    assert search.top_fraction == 0.05
    assert search.gate_threshold == 0.5


@pytest.mark.parametrize("name", available_presets())
def test_presets_load(name):
    config = load_config(resolve_preset(name)).resolved()
    assert config.name == name
    assert str(config.output).endswith(name)


def test_expected_presets_ship():
    assert {"table1-checkers", "fig3-checkers", "fig4-checkers"} <= set(
        available_presets()
    )
    with pytest.raises(ConfigError, match="unknown preset"):
        resolve_preset("nope")


def test_resolved_dump_reloads(tmp_path, tiny_config):
    path = tmp_path / "config.resolved.json"
    tiny_config.serialize(path)
    reloaded = load_config(path)
    assert reloaded.model_dump(mode="json") == tiny_config.model_dump(mode="json")
    assert json.loads(path.read_text())["search"]["iterations"] == 60


def test_load_config_failures(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "missing.yaml")
    path = tmp_path / "list.json"
    path.write_text("[1, 2]")
    with pytest.raises(ConfigError, match="mapping"):
        load_config(path)


def test_load_experiment_overrides(tmp_path, tiny_config_data):
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(tiny_config_data))
    config = load_experiment(path, None, seed=7, out=tmp_path / "elsewhere")
    assert isinstance(config, ExperimentConfig)
    assert config.sweep.seeds == [7]
    assert config.output == tmp_path / "elsewhere"
