import numpy as np
import pytest

from teamrules.onto import DataError, Direction, RawDataset, SplitSpec
from teamrules.tool.dataspace import (
    Binarizer,
    checkers_label,
    gaussian_label,
    gen_checkers,
    gen_gaussian,
    load_csv,
    split,
    write_csv,
)


def test_checkers_labels_follow_the_board():
    rows = np.array([[0.5, 1.5], [1.5, 1.5], [1.5, 0.5], [0.5, 0.5]])
    assert checkers_label(rows).tolist() == [1, 0, 1, 0]


def test_gen_checkers_is_seeded():
    a = gen_checkers(200, seed=7)
    b = gen_checkers(200, seed=7)
    assert a.feature_names == ["x1", "x2"]
    assert a.rows.shape == (200, 2)
    assert np.array_equal(a.rows, b.rows)
    assert not np.array_equal(a.rows, gen_checkers(200, seed=8).rows)
    assert ((a.rows >= 0) & (a.rows <= 2)).all()


def test_gen_rejects_empty():
    with pytest.raises(DataError):
        gen_checkers(0, seed=0)
    with pytest.raises(DataError):
        gen_gaussian(0, seed=0)


def test_gen_gaussian_shape():
    raw = gen_gaussian(300, seed=1)
    assert raw.rows.shape == (300, 20)
    assert raw.feature_names[0] == "x1" and raw.feature_names[-1] == "x20"
    assert set(np.unique(raw.labels)) <= {0, 1}


def test_gaussian_label_matches_a_direct_computation():
    raw = gen_gaussian(100, seed=5)

    def phi(s):
        return np.exp(-0.5 * s * s) / np.sqrt(2.0 * np.pi)

    x = raw.rows
    v1 = np.array([phi(r[0] + r[1]) for r in x])
    v2 = np.array(
        [
            phi(r[0:4].sum()) + phi(r[4:8].sum()) + phi(r[8:16].sum())
            + phi(r[16:20].sum())
            for r in x
        ]
    )
    expected = []
    for i, r in enumerate(x):
        if r.sum() < 0:
            expected.append(int(v1[i] > np.median(v1)))
        else:
            expected.append(int(v2[i] < np.median(v2)))
    assert gaussian_label(x).tolist() == expected
    assert raw.labels.tolist() == expected


def test_binarize_median_threshold():
    raw = RawDataset(
        feature_names=["x0"], rows=[[0.0], [1.0], [2.0], [3.0]], labels=[0, 0, 1, 1]
    )
    binarized = Binarizer(bins_per_feature=1)(raw)
    assert [(p.direction, p.threshold) for p in binarized.predicates] == [
        (Direction.GEQ, 1.5),
        (Direction.LT, 1.5),
    ]
    assert binarized.columns.tolist() == [
        [False, True],
        [False, True],
        [True, False],
        [True, False],
    ]


def test_binarize_pairs_are_complements(checkers_binarized):
    columns = checkers_binarized.columns
    for j, k in checkers_binarized.complement_index.items():
        assert np.array_equal(columns[:, j], ~columns[:, k])


def test_binarize_checkers_has_a_threshold_near_one():
    binarized = Binarizer(bins_per_feature=9)(gen_checkers(4000, seed=0))
    thresholds = {
        p.threshold for p in binarized.predicates if p.feature_name == "x1"
    }
    assert len(thresholds) == 9
    assert min(abs(t - 1.0) for t in thresholds) < 0.05


def test_binarize_boolean_and_constant_features():
    raw = RawDataset(
        feature_names=["flag", "const", "x"],
        rows=[[0, 4, 0.1], [1, 4, 0.7], [1, 4, 0.3], [0, 4, 0.9]],
        labels=[0, 1, 1, 0],
    )
    binarized = Binarizer(bins_per_feature=3)(raw)
    flag = [p for p in binarized.predicates if p.feature_name == "flag"]
    assert [p.render() for p in flag] == ["flag = 1", "flag = 0"]
    assert not any(p.feature_name == "const" for p in binarized.predicates)
    assert any("const" in w for w in binarized.warnings)


def test_binarize_empty_input():
    raw = RawDataset(feature_names=["x"], rows=[], labels=[])
    with pytest.raises(DataError, match="empty input"):
        Binarizer(bins_per_feature=3)(raw)


def test_binarized_columns_must_match_predicates(checkers_binarized):
    with pytest.raises(ValueError):
        type(checkers_binarized)(
            predicates=checkers_binarized.predicates,
            columns=~checkers_binarized.columns,
            labels=checkers_binarized.labels,
            source=checkers_binarized.source,
        )


def test_split_sizes_and_determinism():
    raw = gen_checkers(10, seed=0)
    train, test = split(raw, SplitSpec(train_fraction=0.8, seed=4))
    assert len(train) == 8 and len(test) == 2
    assert not set(train) & set(test)
    again = split(raw, SplitSpec(train_fraction=0.8, seed=4))
    assert np.array_equal(train, again[0]) and np.array_equal(test, again[1])

    train, test = split(
        gen_checkers(4800, seed=0), SplitSpec(train_fraction=4000 / 4800, seed=0)
    )
    assert (len(train), len(test)) == (4000, 800)
    assert list(train) == sorted(train)


def test_split_needs_two_rows():
    with pytest.raises(DataError):
        split(gen_checkers(1, seed=0), SplitSpec(train_fraction=0.5))
    train, test = split(gen_checkers(2, seed=0), SplitSpec(train_fraction=0.9))
    assert (len(train), len(test)) == (1, 1)


def test_load_csv_numeric_and_categorical(tmp_path):
    path = tmp_path / "toy.csv"
    path.write_text(
        "age,color,outcome\n"
        "31,red,yes\n"
        "45,blue,no\n"
        "27,green,yes\n"
    )
    raw = load_csv(path, "outcome", positive_label="yes")
    assert raw.feature_names == ["age", "color_blue", "color_green", "color_red"]
    assert raw.labels.tolist() == [1, 0, 1]
    assert raw.rows[:, 0].tolist() == [31.0, 45.0, 27.0]
    assert raw.rows[:, 1:].sum(axis=1).tolist() == [1.0, 1.0, 1.0]


def test_load_csv_positive_label_needs_a_binary_column(tmp_path):
    path = tmp_path / "income.csv"
    path.write_text("age,income\n30,>50K\n41,<=50K\n52,>50K.\n23,other\n")
    with pytest.raises(DataError, match="not binary"):
        load_csv(path, "income", positive_label=">50K")

    path.write_text("age,income\n30,>50K\n41,<=50K\n52,>50K\n")
    with pytest.raises(DataError, match="positive label 'absent' not found"):
        load_csv(path, "income", positive_label="absent")

    raw = load_csv(path, "income", positive_label=">50K")
    assert raw.labels.tolist() == [1, 0, 1]


def test_load_csv_two_rows(tmp_path):
    path = tmp_path / "two.csv"
    path.write_text("x,label\n0.5,1\n1.5,0\n")
    raw = load_csv(path, "label")
    assert (raw.n, raw.d) == (2, 1)


def test_load_csv_reports_location(tmp_path):
    path = tmp_path / "holes.csv"
    path.write_text("x,y,label\n1,2,0\n3,,1\n")
    with pytest.raises(DataError, match=r"row 2 \(line 3\), column 'y'"):
        load_csv(path, "label")

    path.write_text("x,label\n1,0\n2,1\n")
    with pytest.raises(DataError, match="label column 'target'"):
        load_csv(path, "target")

    path.write_text("x,label\n1,a\n2,b\n3,c\n")
    with pytest.raises(DataError, match="not binary"):
        load_csv(path, "label")


def test_write_csv_round_trips(tmp_path):
    raw = gen_checkers(50, seed=11)
    path = write_csv(raw, tmp_path / "checkers.csv")
    loaded = load_csv(path, "label")
    assert loaded.feature_names == raw.feature_names
    assert np.array_equal(loaded.rows, raw.rows)
    assert np.array_equal(loaded.labels, raw.labels)
