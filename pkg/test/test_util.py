import logging

from teamrules.toolbox import ToolBox
from teamrules.util import derive_seed, render_text_hash, wrap_with


def test_wrap_with_logs_the_stage(caplog):
    def double(x):
        return 2 * x

    wrapped = wrap_with(double, "double")
    with caplog.at_level(logging.DEBUG, logger="teamrules.util"):
        assert wrapped(21) == 42
    messages = [r.getMessage() for r in caplog.records]
    assert "Starting to execute double" in messages
    assert any(m.startswith("Finished double in") for m in messages)
    assert wrapped.__name__ == "double"


def test_wrap_with_multiple_calls(caplog):
    calls = []
    wrapped = wrap_with(lambda: calls.append(1), "append")
    with caplog.at_level(logging.INFO, logger="teamrules.util"):
        for _ in range(3):
            wrapped()
    assert len(calls) == 3
    starts = [r for r in caplog.records if "Starting to execute append" in r.message]
    assert len(starts) == 3


def test_derive_seed():
    assert derive_seed(0, "split") == derive_seed(0, "split")
    assert derive_seed(0, "split") != derive_seed(0, "data")
    assert derive_seed(0, "split") != derive_seed(1, "split")
    assert 0 <= derive_seed(123, "x", 4) < 2**32


def test_render_text_hash():
    assert len(render_text_hash("abc")) == 12
    assert render_text_hash("abc", 4) == render_text_hash("abc")[:4]


def test_toolbox_configures_tools(tiny_config):
    tools = ToolBox(config=tiny_config, seed=3)
    assert tools.binarizer.bins_per_feature == tiny_config.dataset.bins_per_feature
    assert tools.miner.max_length == tiny_config.search.max_rule_length
    assert tools.miner.min_support == tiny_config.search.min_support


def test_tool_fingerprint(tiny_config):
    a = ToolBox(config=tiny_config, seed=3)
    b = ToolBox(config=tiny_config, seed=3)
    c = ToolBox(config=tiny_config, seed=4)
    assert a.binarizer.fingerprint() == b.binarizer.fingerprint()
    assert a.miner.fingerprint() != c.miner.fingerprint()
    assert a.binarizer.fingerprint() != a.miner.fingerprint()
    assert str(a.binarizer).startswith("Binarizer(bins_per_feature=9)")
