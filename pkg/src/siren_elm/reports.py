"""
Report rendering (text tables, CSV, JSON) and the results directory layout.

Each run writes into ``<out>/<run id>/`` where the run id is a UTC
timestamp; ``config.json`` echoes every setting of the run. Text tables
print the published reference figures beside the measured ones.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .evaluation import CompareReport, EvalReport, SweepReport

log = logging.getLogger(__name__)

# Published figures: per-fold values for folds 1..5, then the overall row.
REFERENCE_ACCURACY = {
    "elm": ([97.05, 94.85, 95.58, 91.91, 93.38], 94.55),
    "knn": ([92.1, 95.3, 83.9, 58.5, 96.4], 85.3),
}
REFERENCE_RUNTIME_MS = {
    "elm": ([0.26, 0.24, 0.26, 0.24, 0.24], 0.25),
    "knn": ([3.36, 2.49, 2.46, 2.44, 2.43], 2.64),
}
REFERENCE_SWEEP = {
    10: ([97.0, 94.8, 95.5, 91.9, 93.3], 94.5, [0.26, 0.24, 0.26, 0.24, 0.24], 0.25),
    100: ([97.0, 95.5, 96.3, 94.1, 95.5], 95.68, [18.9, 18.9, 16.1, 16.0, 6.5], 15.28),
    1000: ([93.3, 91.1, 94.8, 88.2, 93.3], 92.14, [203.2, 138.9, 125.7, 130.0, 134.8], 146.52),
    10000: ([99.2, 97.0, 96.3, 94.1, 97.0], 96.72, [829.1, 766.8, 872.9, 778.4, 893.0], 828.04),
}


def new_run_dir(out_root: str | Path) -> Path:
    """Create ``<out_root>/<UTC timestamp>`` (suffixed if it already exists)."""
    out_root = Path(out_root)
    stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%SZ")
    run_dir = out_root / stamp
    n = 1
    while run_dir.exists():
        run_dir = out_root / f"{stamp}-{n}"
        n += 1
    run_dir.mkdir(parents=True)
    return run_dir


def _fmt(v: float | None, digits: int = 2) -> str:
    return "-" if v is None else f"{v:.{digits}f}"


def _table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(str(r[i])) for r in [header, *rows]) for i in range(len(header))]
    lines = ["  ".join(str(c).rjust(w) for c, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(str(c).rjust(w) for c, w in zip(r, widths)) for r in rows)
    return "\n".join(lines)


def _ref(values: list[float], i: int) -> float | None:
    return values[i] if i < len(values) else None


# ---------------------------------------------------------------------------
# Cross-validation
# ---------------------------------------------------------------------------


def crossval_text(report: EvalReport) -> str:
    ref_acc, ref_acc_all = REFERENCE_ACCURACY.get(report.model, ([], None))
    ref_rt, ref_rt_all = REFERENCE_RUNTIME_MS.get(report.model, ([], None))
    rows = []
    for i, fold in enumerate(report.folds):
        rows.append([
            f"Fold {fold}",
            _fmt(report.fold_accuracy[i]),
            _fmt(_ref(ref_acc, fold - 1)),
            _fmt(report.fold_runtime_ms[i], 3),
            _fmt(_ref(ref_rt, fold - 1)),
        ])
    rows.append([
        "Overall",
        _fmt(report.overall_accuracy),
        _fmt(ref_acc_all),
        _fmt(report.overall_runtime_ms, 3),
        _fmt(ref_rt_all),
    ])
    lo, hi = report.accuracy_spread
    head = (
        f"{report.model.upper()} cross-validation  params={json.dumps(report.params)}  "
        f"seeds={list(report.seeds)}"
    )
    body = _table(["", "Accuracy %", "Reference %", "Run-time ms", "Reference ms"], rows)
    tail = (
        f"Overall accuracy spread over seeds: {lo:.2f} .. {hi:.2f}\n"
        f"Run-time: {report.config['timing']['region']}"
    )
    return f"{head}\n{body}\n{tail}\n"


def crossval_rows(report: EvalReport) -> list[dict[str, Any]]:
    """One row per (fold, seed) and one overall row per seed; each confusion covers a single run."""
    timing = {(r.test_fold, r.seed): r.timing.median_ms for r in report.results}
    rows = []
    for fold, per_seed in zip(report.folds, report.fold_confusion):
        for seed, c in zip(report.seeds, per_seed):
            rows.append({
                "model": report.model, "fold": fold, "seed": seed,
                "accuracy": 100.0 * float(np.trace(c)) / max(1, int(c.sum())),
                "runtime_ms": timing.get((fold, seed), float("nan")),
                **_cells(c),
            })
    for j, seed in enumerate(report.seeds):
        c = sum(per_seed[j] for per_seed in report.fold_confusion)
        rows.append({
            "model": report.model, "fold": "overall", "seed": seed,
            "accuracy": report.seed_accuracy[seed],
            "runtime_ms": float(np.mean([timing.get((f, seed), float("nan")) for f in report.folds])),
            **_cells(c),
        })
    return rows


def _cells(c: np.ndarray) -> dict[str, int]:
    return {"tn": int(c[0, 0]), "fp": int(c[0, 1]), "fn": int(c[1, 0]), "tp": int(c[1, 1])}


# ---------------------------------------------------------------------------
# Neuron sweep
# ---------------------------------------------------------------------------


def sweep_text(sweep: SweepReport) -> str:
    header = [""]
    for L in sweep.hidden:
        header += [f"L={L} acc %", "ref", "ms", "ref"]
    n_folds = len(sweep.reports[0].folds) if sweep.reports else 0
    rows = []
    for i in range(n_folds):
        row = [f"Fold {sweep.reports[0].folds[i]}"]
        for L, r in zip(sweep.hidden, sweep.reports):
            ref = REFERENCE_SWEEP.get(L)
            row += [
                _fmt(r.fold_accuracy[i]), _fmt(_ref(ref[0], i) if ref else None),
                _fmt(r.fold_runtime_ms[i], 3), _fmt(_ref(ref[2], i) if ref else None),
            ]
        rows.append(row)
    row = ["Overall"]
    for L, r in zip(sweep.hidden, sweep.reports):
        ref = REFERENCE_SWEEP.get(L)
        row += [
            _fmt(r.overall_accuracy), _fmt(ref[1] if ref else None),
            _fmt(r.overall_runtime_ms, 3), _fmt(ref[3] if ref else None),
        ]
    rows.append(row)
    seeds = list(sweep.reports[0].seeds) if sweep.reports else []
    return f"ELM hidden-neuron sweep  seeds={seeds}\n{_table(header, rows)}\n"


def sweep_rows(sweep: SweepReport) -> list[dict[str, Any]]:
    rows = []
    for L, r in zip(sweep.hidden, sweep.reports):
        for row in crossval_rows(r):
            rows.append({"hidden": L, **row})
    return rows


# ---------------------------------------------------------------------------
# ELM vs KNN
# ---------------------------------------------------------------------------


def compare_text(cmp: CompareReport) -> str:
    rows = []
    for i, fold in enumerate(cmp.elm.folds):
        rows.append([
            f"Fold {fold}",
            _fmt(cmp.knn.fold_accuracy[i]), _fmt(cmp.elm.fold_accuracy[i]),
            _fmt(cmp.knn.fold_runtime_ms[i], 3), _fmt(cmp.elm.fold_runtime_ms[i], 3),
            _fmt(cmp.fold_time_ratio[i], 1),
        ])
    rows.append([
        "Overall",
        _fmt(cmp.knn.overall_accuracy), _fmt(cmp.elm.overall_accuracy),
        _fmt(cmp.knn.overall_runtime_ms, 3), _fmt(cmp.elm.overall_runtime_ms, 3),
        _fmt(cmp.overall_time_ratio, 1),
    ])
    table = _table(["", "KNN acc %", "ELM acc %", "KNN ms", "ELM ms", "KNN/ELM"], rows)
    ref_ratio = REFERENCE_RUNTIME_MS["knn"][1] / REFERENCE_RUNTIME_MS["elm"][1]
    return (
        f"ELM {json.dumps(cmp.elm.params)} vs KNN {json.dumps(cmp.knn.params)}\n{table}\n"
        f"Reference: KNN {REFERENCE_ACCURACY['knn'][1]}% / ELM {REFERENCE_ACCURACY['elm'][1]}%, "
        f"run-time ratio {ref_ratio:.1f}x\n"
    )


def compare_rows(cmp: CompareReport) -> list[dict[str, Any]]:
    return crossval_rows(cmp.knn) + crossval_rows(cmp.elm)


# ---------------------------------------------------------------------------
# Feature summary
# ---------------------------------------------------------------------------


def summary_text(rows: list[dict[str, Any]]) -> str:
    by_feature: dict[str, dict[str, dict[str, Any]]] = {}
    classes: list[str] = []
    for r in rows:
        by_feature.setdefault(r["feature"], {})[r["class"]] = r
        if r["class"] not in classes:
            classes.append(r["class"])
    header = ["feature"] + [f"{c} {s}" for c in classes for s in ("mean", "std")]
    table = [
        [feat] + [_fmt(stats[c][s], 3) for c in classes for s in ("mean", "std")]
        for feat, stats in by_feature.items()
    ]
    return f"Per-class feature statistics\n{_table(header, table)}\n"


# ---------------------------------------------------------------------------
# Writers
# ---------------------------------------------------------------------------


def rows_to_csv(rows: list[dict[str, Any]]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def write_report(
    run_dir: Path,
    name: str,
    payload: dict[str, Any],
    rows: list[dict[str, Any]],
    text: str,
    config: dict[str, Any],
) -> dict[str, str]:
    """Write ``<name>.json/.csv/.txt`` and ``config.json``; return the paths."""
    paths = {
        "json": run_dir / f"{name}.json",
        "csv": run_dir / f"{name}.csv",
        "text": run_dir / f"{name}.txt",
        "config": run_dir / "config.json",
    }
    paths["json"].write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    paths["csv"].write_text(rows_to_csv(rows), encoding="utf-8")
    paths["text"].write_text(text, encoding="utf-8")
    paths["config"].write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")
    log.info("wrote %s report to %s", name, run_dir)
    return {k: str(v) for k, v in paths.items()}
