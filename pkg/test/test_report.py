import pytest
from rich.console import Console

from teamrules.harness.report import (
    comparison_frame,
    emit_results,
    load_results,
    load_sidecar,
    print_comparison,
    print_sweep,
    sweep_frame,
)
from teamrules.onto import (
    AdbMode,
    CellFailure,
    DataError,
    DiscretionKind,
    ExperimentRecord,
    HumanReference,
    SearchMode,
)


def _record(mode: SearchMode, seed: int, ttl: float, alpha: float = 0.0):
    return ExperimentRecord(
        dataset="checkers",
        adb_mode=AdbMode.NEUTRAL,
        mode=mode,
        alpha=alpha,
        seed=seed,
        discretion_kind=DiscretionKind.ORACLE,
        discretion_train_size=4000,
        discretion_accuracy=1.0,
        tdl=ttl,
        cl=0.0,
        ttl=ttl,
        contradictions=10 + seed,
        recommendations=40,
        wall_time_ms=0.0,
    )


@pytest.fixture
def records():
    out = []
    for seed in range(5):
        out.append(_record(SearchMode.TEAMRULES, seed, 0.05 + 0.001 * seed))
        out.append(_record(SearchMode.HYRS_ADAPTED, seed, 0.10 + 0.002 * seed))
        out.append(_record(SearchMode.BRS_LIKE, seed, 0.30 + 0.003 * seed))
    return out


def test_emit_and_load(tmp_path, records):
    human = [
        HumanReference(dataset="checkers", adb_mode=AdbMode.NEUTRAL, seed=s, ttl=0.1)
        for s in range(5)
    ]
    failure = CellFailure(
        dataset="checkers", adb_mode=AdbMode.RATIONAL, seed=2, reason="boom"
    )
    csv_path, json_path = emit_results(
        records,
        tmp_path / "results.csv",
        config={"name": "unit"},
        human=human,
        failures=[failure],
    )
    assert json_path == tmp_path / "results.json"
    assert load_results(csv_path) == records
    sidecar = load_sidecar(csv_path)
    assert sidecar.n_records == len(records)
    assert sidecar.config == {"name": "unit"}
    assert sidecar.human == human
    assert sidecar.failures[0].reason == "boom"
    assert "ttl" in sidecar.columns


def test_emit_needs_records(tmp_path):
    with pytest.raises(DataError):
        emit_results([], tmp_path / "results.csv")


def test_load_rejects_foreign_files(tmp_path):
    with pytest.raises(DataError, match="no such results file"):
        load_results(tmp_path / "missing.csv")
    path = tmp_path / "other.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(DataError, match="results columns"):
        load_results(path)
    assert load_sidecar(path) is None


def test_comparison_markers(records):
    human = [
        HumanReference(dataset="checkers", adb_mode=AdbMode.NEUTRAL, seed=s, ttl=0.1)
        for s in range(5)
    ]
    off_grid = _record(SearchMode.TEAMRULES, 0, 0.9, 0.5)
    frame = comparison_frame(records + [off_grid], human)
    assert len(frame) == 1
    row = frame.iloc[0]
    assert row["teamrules"] == pytest.approx(0.052)
    assert row["hyrs"] == pytest.approx(0.104)
    assert row["human"] == pytest.approx(0.1)
    assert row["marker"] == "**◇"


def test_comparison_without_significance():
    records = [
        _record(SearchMode.TEAMRULES, s, ttl)
        for s, ttl in enumerate([0.1, 0.2, 0.1])
    ] + [
        _record(SearchMode.HYRS_ADAPTED, s, ttl)
        for s, ttl in enumerate([0.2, 0.1, 0.1])
    ]
    assert comparison_frame(records).iloc[0]["marker"] == ""


def test_sweep_frame_and_printing(records):
    frame = sweep_frame(records)
    assert len(frame) == 3
    tr = frame[frame["mode"] == "teamrules"].iloc[0]
    assert tr["seeds"] == 5
    assert tr["contradictions"] == pytest.approx(12.0)
    console = Console(record=True, width=200)
    print_sweep(frame, console)
    print_comparison(comparison_frame(records), console)
    text = console.export_text()
    assert "teamrules" in text and "**" in text
