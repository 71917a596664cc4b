"""Full ESC-50 runs; skipped unless SIREN_ELM_ESC50_DIR points at an ESC-50 checkout."""

import time

import pytest

from siren_elm.evaluation import ModelParams, compare_models, crossval, sweep_neurons
from siren_elm.feature_store import LabeledDataset
from siren_elm.ingest import SIREN, URBAN, load_dataset

pytestmark = [pytest.mark.esc50, pytest.mark.slow]


@pytest.fixture(scope="module")
def esc50_features(esc50_dir):
    start = time.perf_counter()
    loaded = load_dataset(esc50_dir / "meta" / "esc50.csv", esc50_dir / "audio")
    assert loaded.counts == {SIREN: 40, URBAN: 640}
    assert loaded.excluded == 2000 - 680
    ds = LabeledDataset.from_clips(loaded.clips)
    return ds, time.perf_counter() - start


def test_elm_accuracy(esc50_features):
    ds, extract_seconds = esc50_features
    start = time.perf_counter()
    report = crossval(ds, ModelParams(hidden=10))
    assert report.overall_accuracy >= 89.0
    assert extract_seconds + time.perf_counter() - start < 300


def test_neuron_sweep_trend(esc50_features):
    ds, _ = esc50_features
    sweep = sweep_neurons(ds, [10, 100, 1000, 10000], seeds=(0,))
    acc = {L: r.overall_accuracy for L, r in zip(sweep.hidden, sweep.reports)}
    runtime = {L: r.overall_runtime_ms for L, r in zip(sweep.hidden, sweep.reports)}
    assert acc[10000] >= acc[10] - 1.0
    assert runtime[10] < runtime[10000]
    assert runtime[10] == min(runtime.values())


def test_elm_faster_than_knn(esc50_features):
    ds, _ = esc50_features
    cmp = compare_models(ds, ModelParams("elm", hidden=10), ModelParams("knn", k=5), seeds=(0,))
    assert cmp.overall_time_ratio >= 2.0
    assert max(cmp.elm.fold_runtime_ms) < 50.0
