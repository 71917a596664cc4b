"""Text tables, CSV rows and the results directory."""

import csv
import io
import json

import numpy as np

from siren_elm import reports
from siren_elm.evaluation import ModelParams, compare_models, crossval, feature_summary, sweep_neurons

FAST = {"warmup": 0, "repeats": 1}


class TestRunDir:
    def test_unique_timestamped_dirs(self, tmp_path):
        a = reports.new_run_dir(tmp_path)
        b = reports.new_run_dir(tmp_path)
        assert a != b
        assert a.is_dir() and b.is_dir()
        assert a.name.endswith("Z")


class TestTables:
    def test_crossval_text_and_rows(self, blobs):
        report = crossval(blobs, ModelParams(), seeds=(0,), **FAST)
        text = reports.crossval_text(report)
        assert "Fold 1" in text and "Overall" in text
        assert "94.55" in text  # reference column
        rows = reports.crossval_rows(report)
        assert [r["fold"] for r in rows] == [1, 2, 3, 4, 5, "overall"]
        overall = rows[-1]
        assert overall["tn"] + overall["fp"] + overall["fn"] + overall["tp"] == len(blobs)

    def test_rows_per_fold_and_seed(self, blobs):
        report = crossval(blobs, ModelParams(), seeds=(0, 1), **FAST)
        rows = reports.crossval_rows(report)
        assert len(rows) == 5 * 2 + 2
        by_fold = [r for r in rows if r["fold"] == 1]
        assert [r["seed"] for r in by_fold] == [0, 1]
        n_test = int(np.sum(blobs.folds == 1))
        for r in by_fold:
            assert r["tn"] + r["fp"] + r["fn"] + r["tp"] == n_test
        overall = [r for r in rows if r["fold"] == "overall"]
        assert [r["seed"] for r in overall] == [0, 1]
        for r in overall:
            assert r["tn"] + r["fp"] + r["fn"] + r["tp"] == len(blobs)
            assert r["accuracy"] == report.seed_accuracy[r["seed"]]

    def test_knn_reference_column(self, blobs):
        text = reports.crossval_text(crossval(blobs, ModelParams("knn"), seeds=(0,), **FAST))
        assert "85.30" in text and "2.64" in text

    def test_sweep_text_without_reference(self, blobs):
        sweep = sweep_neurons(blobs, [10, 7], seeds=(0,), **FAST)
        text = reports.sweep_text(sweep)
        assert "L=10 acc %" in text and "L=7 acc %" in text
        assert "94.50" in text
        assert len(reports.sweep_rows(sweep)) == 12

    def test_compare_text(self, blobs):
        text = reports.compare_text(compare_models(blobs, seeds=(0,), **FAST))
        assert "KNN/ELM" in text and "run-time ratio" in text

    def test_summary_text(self, blobs):
        text = reports.summary_text(feature_summary(blobs))
        assert "mfcc_mean_00" in text and "zcr_std" in text
        assert "siren mean" in text and "urban std" in text


class TestWriteReport:
    def test_files(self, tmp_path, blobs):
        report = crossval(blobs, ModelParams(), seeds=(0,), **FAST)
        run_dir = reports.new_run_dir(tmp_path)
        paths = reports.write_report(
            run_dir, "crossval-elm", report.to_dict(), reports.crossval_rows(report),
            reports.crossval_text(report), report.config,
        )
        assert set(paths) == {"json", "csv", "text", "config"}
        payload = json.loads((run_dir / "crossval-elm.json").read_text())
        assert payload["model"] == "elm"
        config = json.loads((run_dir / "config.json").read_text())
        assert config["seeds"] == [0]
        rows = list(csv.DictReader(io.StringIO((run_dir / "crossval-elm.csv").read_text())))
        assert len(rows) == 6

    def test_rows_to_csv_empty(self):
        assert reports.rows_to_csv([]) == ""
