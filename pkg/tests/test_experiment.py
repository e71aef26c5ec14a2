# test_experiment.py

from dataclasses import replace
import logging

import numpy as np
import pandas as pd
import pytest

import ConceptRuleSets.datasets as datasets
import ConceptRuleSets.experiment as experiment
from ConceptRuleSets.binarizer import fit_discretizer
from ConceptRuleSets.data_loader import dataset_from_frame
from ConceptRuleSets.errors import ConfigError, DataError
from ConceptRuleSets.experiment import (
    VARIANTS,
    ExperimentConfig,
    ExperimentReport,
    FoldResult,
    run_experiment,
    stratified_kfold,
)
from ConceptRuleSets.metrics import macro_f1
from ConceptRuleSets.model_store import FILE_TYPE_REPORT, read_document

from conftest import tic_tac_toe_frame

REPORT_FILES = ["report.json", "report.csv", "report.txt", "rb_grid.csv"]


def quick_config(**changes) -> ExperimentConfig:
    values = dict(label_column="class", folds=3, rb_grid=[0.0, 0.8], logical_layers=2, hidden=[16],
                  train={"epochs": 5, "batch_size": 32, "lr": 0.05}, seed=3)
    values.update(changes)
    return ExperimentConfig(**values)


@pytest.fixture
def small_board():
    return dataset_from_frame(tic_tac_toe_frame(120, seed=1), "class")


def test_balanced_folds():
    labels = np.array([0, 1] * 5)
    folds = stratified_kfold(labels, 5, seed=0)
    assert len(folds) == 5
    for train_idx, test_idx in folds:
        assert sorted(labels[test_idx].tolist()) == [0, 1]
        assert not set(train_idx) & set(test_idx)
    assert sorted(np.concatenate([test for _, test in folds]).tolist()) == list(range(10))


def test_folds_are_deterministic():
    labels = np.random.default_rng(0).integers(0, 3, size=60)
    first = stratified_kfold(labels, 5, seed=11)
    second = stratified_kfold(labels, 5, seed=11)
    for (a_train, a_test), (b_train, b_test) in zip(first, second):
        assert np.array_equal(a_train, b_train) and np.array_equal(a_test, b_test)
    other = stratified_kfold(labels, 5, seed=12)
    assert any(not np.array_equal(a[1], b[1]) for a, b in zip(first, other))


def test_fold_count_is_checked():
    with pytest.raises(ConfigError):
        stratified_kfold([0, 1, 0], 5, seed=0)
    with pytest.raises(ConfigError):
        stratified_kfold([0, 1, 0, 1], 1, seed=0)


def test_rare_class_falls_back_to_plain_folds(caplog):
    labels = np.array([0] * 9 + [1])
    with caplog.at_level(logging.WARNING):
        folds = stratified_kfold(labels, 5, seed=0)
    assert "unstratified" in caplog.text
    assert sorted(np.concatenate([test for _, test in folds]).tolist()) == list(range(10))


def test_macro_f1_examples():
    assert macro_f1([0, 1, 2, 1], [0, 1, 2, 1], 3) == 1.0
    assert macro_f1([0, 0, 0, 0], [0, 0, 1, 1], 2) == pytest.approx(1 / 3)
    # class 2 never occurs and scores 0
    assert macro_f1([0, 1], [0, 1], 3) == pytest.approx(2 / 3)
    assert macro_f1([], [], 2) == 0.0


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig()
    with pytest.raises(ConfigError):
        quick_config(folds=1)
    with pytest.raises(ConfigError):
        quick_config(rb_grid=[0.5, 1.5])
    with pytest.raises(ConfigError):
        quick_config(train={"seed": 4})
    with pytest.raises(ConfigError):
        quick_config(train={"epochs": -1})
    with pytest.raises(ConfigError):
        quick_config(logical_layers=3)
    with pytest.raises(ConfigError):
        ExperimentConfig(dataset="iris")
    assert ExperimentConfig(dataset="bank-marketing").label_column == "y"


def test_config_round_trip():
    config = quick_config(ablation=True)
    assert ExperimentConfig.from_dict(config.to_dict()) == config


def test_discretizer_sees_only_training_rows(monkeypatch, small_board):
    seen = []
    fit = experiment.fit_discretizer

    def recording_fit(data, label_order=None):
        seen.append(set(data.row_ids.tolist()))
        return fit(data, label_order=label_order)

    monkeypatch.setattr(experiment, "fit_discretizer", recording_fit)
    run_experiment(quick_config(rb_grid=[0.8]), data=small_board)

    folds = stratified_kfold(small_board.labels.to_numpy(), 3, seed=3)
    assert len(seen) == 3
    for rows, (train_idx, test_idx) in zip(seen, folds):
        assert rows == set(train_idx.tolist())
        assert not rows & set(test_idx.tolist())


def test_report_summaries(small_board):
    report = run_experiment(quick_config(ablation=True), data=small_board)
    assert len(report.folds) == 3
    assert report.n_instances == 120 and report.n_classes == 2
    assert report.mean_crs_f1 == pytest.approx(np.mean([f.crs_f1 for f in report.folds]))
    assert report.mean_mllp_p0_f1 is not None and report.mean_crs_p0_f1 is not None

    for fold in report.folds:
        assert fold.selected_rb_rate in (0.0, 0.8)
        assert set(fold.validation_f1) == {"0", "0.8"}
        assert 0.0 <= fold.crs_f1 <= 1.0 and 0.0 <= fold.crs_simplified_f1 <= 1.0
        assert set(fold.edges) == {"CRS_O", *VARIANTS}
        assert fold.edges["CRS_DN&RR"] <= min(fold.edges["CRS_DN"], fold.edges["CRS_RR"])
        assert max(fold.edges["CRS_DN"], fold.edges["CRS_RR"]) <= fold.edges["CRS_O"]
        assert fold.n_train + fold.n_test == 120
        assert "train" in fold.timings and "ablation" in fold.timings

    frame = report.to_frame()
    assert frame["fold"].tolist() == ["0", "1", "2", "mean"]
    assert frame["crs_f1"].iloc[-1] == pytest.approx(round(100 * report.mean_crs_f1, 4))
    assert report.to_dict()["mean"]["fallback_total"] == sum(f.fallback_count for f in report.folds)


def test_single_rate_skips_the_search(small_board):
    report = run_experiment(quick_config(rb_grid=[0.5]), data=small_board)
    assert all(f.selected_rb_rate == 0.5 and f.validation_f1 == {} for f in report.folds)


def test_report_files_are_reproducible(tmp_path, small_board):
    config = quick_config(output_dir=str(tmp_path / "out"))
    run_experiment(config, data=small_board)
    first = {name: (tmp_path / "out" / name).read_bytes() for name in REPORT_FILES}
    run_experiment(config, data=small_board)
    second = {name: (tmp_path / "out" / name).read_bytes() for name in REPORT_FILES}
    assert first == second

    data = read_document(tmp_path / "out" / "report.json", FILE_TYPE_REPORT)
    assert len(data["folds"]) == 3
    assert "timings" not in data["folds"][0]
    assert (tmp_path / "out" / "timings.json").exists()
    grid = pd.read_csv(tmp_path / "out" / "rb_grid.csv")
    assert list(grid.columns) == ["fold", "rb_rate", "validation_f1"]
    assert len(grid) == 3 * 2


def test_global_discretization_is_flagged(caplog, small_board):
    with caplog.at_level(logging.WARNING):
        run_experiment(quick_config(rb_grid=[0.8], global_discretize=True), data=small_board)
    assert "full table" in caplog.text


def test_fold_errors_name_the_fold():
    frame = pd.DataFrame({"noise": [1.0, 2.0, 3.0, 4.0, 5.0, 6.0] * 2,
                          "class": ["a", "b", "a", "b", "a", "b"] * 2})
    with pytest.raises(DataError, match="fold 0: no binary features"):
        run_experiment(quick_config(rb_grid=[0.8], folds=2), data=dataset_from_frame(frame, "class"))


def test_experiment_needs_data():
    with pytest.raises(ConfigError):
        run_experiment(quick_config())


def test_text_report_lists_every_fold():
    folds = [FoldResult(i, 8, 2, 5, 0.8, {}, 0.5 + 0.1 * i, 0.5, {"CRS_O": 10, "CRS_DN&RR": 6}, 0)
             for i in range(2)]
    report = ExperimentReport({}, 10, 2, ["a", "b"], folds)
    lines = report.to_text().splitlines()
    assert lines[0] == "# CRS 2-fold cross-validation: 10 instances, 2 classes"
    assert lines[-1].split()[0] == "mean"
    assert report.mean_edges == {"CRS_O": 10.0, "CRS_DN&RR": 6.0}


def test_binary_feature_count_is_checked_against_the_manifest(monkeypatch, caplog, small_board):
    n_features = fit_discretizer(small_board).n_features
    board_info = replace(datasets.get_dataset("tic-tac-toe"), instances=120, classes=2, features=9)

    monkeypatch.setitem(datasets.DATASETS, "tic-tac-toe", replace(board_info, binary_features=n_features))
    with caplog.at_level(logging.WARNING):
        report = run_experiment(quick_config(rb_grid=[0.8], dataset="tic-tac-toe"), data=small_board)
    assert report.n_binary_features == n_features
    assert report.to_dict()["n_binary_features"] == n_features
    assert report.to_text().splitlines()[0].endswith(f", {n_features} binary features")
    assert "expected" not in caplog.text

    caplog.clear()
    monkeypatch.setitem(datasets.DATASETS, "tic-tac-toe", replace(board_info, binary_features=n_features + 1))
    with caplog.at_level(logging.WARNING):
        run_experiment(quick_config(rb_grid=[0.8], dataset="tic-tac-toe"), data=small_board)
    assert f"binary_features: expected {n_features + 1}, got {n_features}" in caplog.text


def test_binary_feature_count_is_absent_without_a_dataset(small_board):
    report = run_experiment(quick_config(rb_grid=[0.8]), data=small_board)
    assert report.n_binary_features is None
