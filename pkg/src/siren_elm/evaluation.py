"""
Five-fold cross-validation, run-time measurement, neuron sweep, and
per-class feature statistics.

Per fold: fit normalizer on raw train rows -> normalize train and test ->
SMOTE-balance train -> [timed: train model + classify test]. Timing uses
3 untimed warmups then the median of 10 timed repetitions; only one timed
region runs at a time even when folds are evaluated on several workers.
"""

from __future__ import annotations

import logging
import statistics
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Callable, Iterable, Sequence, TypeVar

import numpy as np

from . import elm, knn
from .balance import DEFAULT_K_NEIGHBORS, balance_training_set
from .errors import ConfigError, ManifestError, UnsupportedModelError
from .feature_store import LabeledDataset
from .features import FEATURE_NAMES, Normalizer, extraction_settings
from .ingest import N_FOLDS

log = logging.getLogger(__name__)

MODEL_KINDS = ("elm", "knn")
DEFAULT_SEEDS = (0, 1, 2, 3, 4)
DEFAULT_SWEEP = (10, 100, 1000, 10000)
DEFAULT_WARMUP = 3
DEFAULT_REPEATS = 10
RUNTIME_DEFINITION = (
    "train + classify held-out fold; excludes feature extraction, normalization and SMOTE"
)

_TIMED_REGION = threading.Lock()

T = TypeVar("T")


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModelParams:
    kind: str = "elm"
    hidden: int = elm.DEFAULT_HIDDEN
    activation: str = elm.DEFAULT_ACTIVATION
    ridge: float | None = None
    k: int = knn.DEFAULT_K
    smote: bool = True
    smote_k: int = DEFAULT_K_NEIGHBORS

    def __post_init__(self) -> None:
        if self.kind not in MODEL_KINDS:
            raise UnsupportedModelError(
                f"unsupported model {self.kind!r}; supported: {', '.join(MODEL_KINDS)}"
            )
        if self.kind == "elm":
            elm.ElmConfig(self.hidden, self.activation, self.ridge)
        elif self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")

    def elm_config(self, seed: int) -> elm.ElmConfig:
        return elm.ElmConfig(self.hidden, self.activation, self.ridge, seed)

    def as_dict(self) -> dict[str, Any]:
        out = asdict(self)
        if self.kind == "elm":
            out.pop("k")
        else:
            for key in ("hidden", "activation", "ridge"):
                out.pop(key)
        return out


@dataclass(frozen=True)
class FoldSplit:
    test_fold: int
    train_idx: np.ndarray
    test_idx: np.ndarray


@dataclass(frozen=True)
class TimingResult:
    warmup: int
    repeats: int
    durations_ms: tuple[float, ...]

    @property
    def median_ms(self) -> float:
        return float(statistics.median(self.durations_ms))


@dataclass
class FoldData:
    """Everything a model sees for one split, already normalized (and balanced)."""

    X_train: np.ndarray
    y_train: np.ndarray
    X_test: np.ndarray
    y_test: np.ndarray
    normalizer: Normalizer
    train_counts: dict[int, int]


@dataclass
class FoldResult:
    test_fold: int
    seed: int
    accuracy: float
    confusion: np.ndarray
    timing: TimingResult
    train_counts: dict[int, int]

    @property
    def n_test(self) -> int:
        return int(self.confusion.sum())

    @property
    def correct(self) -> int:
        return int(np.trace(self.confusion))


@dataclass
class EvalReport:
    model: str
    params: dict[str, Any]
    seeds: tuple[int, ...]
    folds: list[int]
    fold_accuracy: list[float]
    fold_confusion: list[list[np.ndarray]]
    fold_runtime_ms: list[float]
    overall_accuracy: float
    overall_runtime_ms: float
    seed_accuracy: dict[int, float]
    config: dict[str, Any]
    results: list[FoldResult] = field(default_factory=list, repr=False)

    @property
    def accuracy_spread(self) -> tuple[float, float]:
        values = list(self.seed_accuracy.values())
        return min(values), max(values)

    def micro_accuracy_from_confusion(self) -> float:
        matrices = [c for per_seed in self.fold_confusion for c in per_seed]
        return 100.0 * sum(np.trace(c) for c in matrices) / sum(c.sum() for c in matrices)

    def to_dict(self) -> dict[str, Any]:
        lo, hi = self.accuracy_spread
        return {
            "model": self.model,
            "params": self.params,
            "seeds": list(self.seeds),
            "folds": [
                {
                    "fold": f,
                    "accuracy": acc,
                    "runtime_ms": rt,
                    "confusion": [
                        {"seed": seed, "matrix": c.tolist()} for seed, c in zip(self.seeds, conf)
                    ],
                }
                for f, acc, rt, conf in zip(
                    self.folds, self.fold_accuracy, self.fold_runtime_ms, self.fold_confusion
                )
            ],
            "overall": {
                "accuracy": self.overall_accuracy,
                "runtime_ms": self.overall_runtime_ms,
                "accuracy_min": lo,
                "accuracy_max": hi,
                "seed_accuracy": {str(k): v for k, v in self.seed_accuracy.items()},
            },
            "config": self.config,
        }


@dataclass
class SweepReport:
    hidden: list[int]
    reports: list[EvalReport]

    def to_dict(self) -> dict[str, Any]:
        return {
            "hidden": self.hidden,
            "runs": [r.to_dict() for r in self.reports],
            "config": self.reports[0].config if self.reports else {},
        }


@dataclass
class CompareReport:
    elm: EvalReport
    knn: EvalReport

    @property
    def fold_time_ratio(self) -> list[float]:
        """KNN / ELM median run-time per fold."""
        return [k / e if e > 0 else float("inf") for k, e in zip(self.knn.fold_runtime_ms, self.elm.fold_runtime_ms)]

    @property
    def overall_time_ratio(self) -> float:
        e = self.elm.overall_runtime_ms
        return self.knn.overall_runtime_ms / e if e > 0 else float("inf")

    def to_dict(self) -> dict[str, Any]:
        return {
            "elm": self.elm.to_dict(),
            "knn": self.knn.to_dict(),
            "fold_time_ratio": self.fold_time_ratio,
            "overall_time_ratio": self.overall_time_ratio,
        }


# ---------------------------------------------------------------------------
# Folds
# ---------------------------------------------------------------------------


def make_folds(ds: LabeledDataset) -> list[FoldSplit]:
    """One split per ESC-50 fold id; every fold 1..5 must be present."""
    folds = ds.folds
    bad = sorted(set(folds.tolist()) - set(range(1, N_FOLDS + 1)))
    if bad:
        raise ManifestError(f"fold ids outside 1..{N_FOLDS}: {bad}")
    missing = sorted(set(range(1, N_FOLDS + 1)) - set(folds.tolist()))
    if missing:
        raise ManifestError(f"no rows for fold(s) {missing}")
    return [
        FoldSplit(f, np.flatnonzero(folds != f), np.flatnonzero(folds == f))
        for f in range(1, N_FOLDS + 1)
    ]


def confusion_matrix(y_true: np.ndarray, y_pred: np.ndarray, n_classes: int = 2) -> np.ndarray:
    """Rows are true classes, columns predicted classes."""
    out = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(out, (np.asarray(y_true, dtype=np.int64), np.asarray(y_pred, dtype=np.int64)), 1)
    return out


def time_region(
    fn: Callable[[], T],
    warmup: int = DEFAULT_WARMUP,
    repeats: int = DEFAULT_REPEATS,
) -> tuple[T, TimingResult]:
    """Run ``fn`` warmup + repeats times exclusively; return the last result and timings."""
    if repeats < 1 or warmup < 0:
        raise ConfigError(f"need repeats >= 1 and warmup >= 0, got {repeats}/{warmup}")
    durations = []
    with _TIMED_REGION:
        for _ in range(warmup):
            result = fn()
        for _ in range(repeats):
            start = time.perf_counter_ns()
            result = fn()
            durations.append((time.perf_counter_ns() - start) / 1e6)
    return result, TimingResult(warmup, repeats, tuple(durations))


def prepare_fold(ds: LabeledDataset, split: FoldSplit, params: ModelParams, seed: int) -> FoldData:
    """Normalize with train statistics, then balance the train side only."""
    X_train_raw = ds.X[split.train_idx]
    y_train = ds.y[split.train_idx]
    normalizer = Normalizer.fit(X_train_raw)
    X_train = normalizer.apply(X_train_raw)
    X_test = normalizer.apply(ds.X[split.test_idx])
    if params.smote:
        X_train, y_train = balance_training_set(X_train, y_train, seed, k_neighbors=params.smote_k)
    counts = {int(c): int(n) for c, n in zip(*np.unique(y_train, return_counts=True))}
    return FoldData(X_train, y_train, X_test, ds.y[split.test_idx], normalizer, counts)


def fit_model(data: FoldData, params: ModelParams, seed: int, n_classes: int = 2) -> elm.ElmModel | knn.KnnModel:
    if params.kind == "elm":
        return elm.train(data.X_train, data.y_train, params.elm_config(seed), normalizer=data.normalizer)
    return knn.knn_fit(data.X_train, data.y_train, params.k, n_classes)


def classify(model: elm.ElmModel | knn.KnnModel, X_normalized: np.ndarray) -> np.ndarray:
    if isinstance(model, elm.ElmModel):
        return elm.predict_batch(model, X_normalized, normalized=True)
    return knn.knn_predict_batch(model, X_normalized)


def run_fold(
    ds: LabeledDataset,
    split: FoldSplit,
    params: ModelParams,
    seed: int,
    *,
    warmup: int = DEFAULT_WARMUP,
    repeats: int = DEFAULT_REPEATS,
) -> FoldResult:
    data = prepare_fold(ds, split, params, seed)
    n_classes = len(ds.label_names)

    def train_and_classify() -> np.ndarray:
        return classify(fit_model(data, params, seed, n_classes), data.X_test)

    y_pred, timing = time_region(train_and_classify, warmup, repeats)
    conf = confusion_matrix(data.y_test, y_pred, n_classes)
    accuracy = 100.0 * np.trace(conf) / max(1, conf.sum())
    log.info(
        "%s fold %d seed %d: accuracy %.2f%% (%d test rows), median %.3f ms",
        params.kind, split.test_fold, seed, accuracy, conf.sum(), timing.median_ms,
    )
    return FoldResult(split.test_fold, seed, float(accuracy), conf, timing, data.train_counts)


# ---------------------------------------------------------------------------
# Cross-validation and derived experiments
# ---------------------------------------------------------------------------


def run_config(params: ModelParams, seeds: Sequence[int], warmup: int, repeats: int) -> dict[str, Any]:
    """Config echo written next to every report."""
    return {
        "model": params.as_dict(),
        "seeds": list(seeds),
        "features": extraction_settings(),
        "smote": {"enabled": params.smote, "k_neighbors": params.smote_k, "space": "normalized features",
                  "applied_to": "training split only"},
        "normalizer": "z-score fitted on raw training rows of each split",
        "timing": {"warmup": warmup, "repeats": repeats, "statistic": "median",
                   "region": RUNTIME_DEFINITION},
        "accuracy": "micro-averaged over folds and seeds",
    }


def crossval(
    ds: LabeledDataset,
    params: ModelParams,
    seeds: Iterable[int] = DEFAULT_SEEDS,
    *,
    warmup: int = DEFAULT_WARMUP,
    repeats: int = DEFAULT_REPEATS,
    workers: int = 1,
) -> EvalReport:
    seeds = tuple(seeds)
    if not seeds:
        raise ConfigError("at least one seed is required")
    if any(s < 0 for s in seeds):
        raise ConfigError(f"seeds must be non-negative, got {list(seeds)}")
    if len(set(seeds)) != len(seeds):
        raise ConfigError(f"seeds must be distinct, got {list(seeds)}")
    splits = make_folds(ds)
    tasks = [(seed, split) for seed in seeds for split in splits]

    def run(task: tuple[int, FoldSplit]) -> FoldResult:
        seed, split = task
        return run_fold(ds, split, params, seed, warmup=warmup, repeats=repeats)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(t) for t in tasks]

    fold_ids = [s.test_fold for s in splits]
    by_fold = {f: [r for r in results if r.test_fold == f] for f in fold_ids}
    fold_accuracy = [float(np.mean([r.accuracy for r in by_fold[f]])) for f in fold_ids]
    # one matrix per seed, in seed order
    fold_confusion = [[r.confusion for r in by_fold[f]] for f in fold_ids]
    fold_runtime = [float(statistics.median(r.timing.median_ms for r in by_fold[f])) for f in fold_ids]

    seed_accuracy = {}
    for seed in seeds:
        rs = [r for r in results if r.seed == seed]
        seed_accuracy[seed] = 100.0 * sum(r.correct for r in rs) / sum(r.n_test for r in rs)

    total = sum(r.n_test for r in results)
    overall = 100.0 * sum(r.correct for r in results) / total
    report = EvalReport(
        model=params.kind,
        params=params.as_dict(),
        seeds=seeds,
        folds=fold_ids,
        fold_accuracy=fold_accuracy,
        fold_confusion=fold_confusion,
        fold_runtime_ms=fold_runtime,
        overall_accuracy=overall,
        overall_runtime_ms=float(np.mean(fold_runtime)),
        seed_accuracy=seed_accuracy,
        config=run_config(params, seeds, warmup, repeats),
        results=results,
    )
    log.info("%s overall accuracy %.2f%% over %d seeds", params.kind, overall, len(seeds))
    return report


def sweep_neurons(
    ds: LabeledDataset,
    hidden_values: Iterable[int] = DEFAULT_SWEEP,
    seeds: Iterable[int] = DEFAULT_SEEDS,
    params: ModelParams | None = None,
    *,
    warmup: int = DEFAULT_WARMUP,
    repeats: int = DEFAULT_REPEATS,
    workers: int = 1,
) -> SweepReport:
    params = params or ModelParams()
    if params.kind != "elm":
        raise UnsupportedModelError("the neuron sweep only applies to the ELM")
    hidden = list(hidden_values)
    if not hidden:
        raise ConfigError("sweep needs at least one hidden-layer size")
    seeds = tuple(seeds)
    reports = [
        crossval(ds, replace(params, hidden=L), seeds, warmup=warmup, repeats=repeats, workers=workers)
        for L in hidden
    ]
    return SweepReport(hidden=hidden, reports=reports)


def compare_models(
    ds: LabeledDataset,
    elm_params: ModelParams | None = None,
    knn_params: ModelParams | None = None,
    seeds: Iterable[int] = DEFAULT_SEEDS,
    *,
    warmup: int = DEFAULT_WARMUP,
    repeats: int = DEFAULT_REPEATS,
) -> CompareReport:
    """ELM vs KNN on identical splits and balanced training sets."""
    seeds = tuple(seeds)
    elm_params = elm_params or ModelParams("elm")
    knn_params = knn_params or ModelParams("knn")
    return CompareReport(
        elm=crossval(ds, elm_params, seeds, warmup=warmup, repeats=repeats),
        knn=crossval(ds, knn_params, seeds, warmup=warmup, repeats=repeats),
    )


def feature_summary(ds: LabeledDataset) -> list[dict[str, Any]]:
    """Per-class mean / population std for every feature dimension (classes x 28 rows)."""
    rows = []
    for label, name in enumerate(ds.label_names):
        X = ds.X[ds.y == label]
        mean = X.mean(axis=0) if X.shape[0] else np.full(X.shape[1], np.nan)
        std = X.std(axis=0) if X.shape[0] else np.full(X.shape[1], np.nan)
        for j, feature in enumerate(FEATURE_NAMES):
            rows.append({
                "class": name,
                "feature": feature,
                "count": int(X.shape[0]),
                "mean": float(mean[j]),
                "std": float(std[j]),
            })
    return rows
