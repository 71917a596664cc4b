"""
Labeled feature matrices and their on-disk formats.

CSV: header ``label,fold,f00..f27``, one row per clip.

Binary (``.selm``), all little-endian:

    offset  size  field
    0       4     magic b"SELM"
    4       2     version (u16, currently 1)
    6       4     rows (u32)
    10      4     cols (u32) = 2 + feature dim
    14      8*r*c row-major float64 values: label, fold, f00..f27
"""

from __future__ import annotations

import csv
import io
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionError, FormatError, ManifestError, UnsupportedVersionError
from .features import FEATURE_DIM, extract_matrix, FrameConfig, MelFilterbank
from .ingest import LABEL_NAMES, N_FOLDS, SIREN, URBAN, AudioClip

log = logging.getLogger(__name__)

SELM_MAGIC = b"SELM"
SELM_VERSION = 1
_SELM_HEADER = struct.Struct("<4sHII")
BINARY_SUFFIXES = (".selm", ".bin")


@dataclass
class LabeledDataset:
    """Feature matrix X (N x 28), integer labels, fold ids, and the label map."""

    X: np.ndarray
    y: np.ndarray
    folds: np.ndarray
    label_names: tuple[str, ...] = LABEL_NAMES
    sources: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.int64)
        self.folds = np.asarray(self.folds, dtype=np.int64)
        if self.X.ndim != 2 or self.X.shape[1] != FEATURE_DIM:
            raise DimensionError(f"feature matrix must be N x {FEATURE_DIM}, got {self.X.shape}")
        n = self.X.shape[0]
        if self.y.shape != (n,) or self.folds.shape != (n,):
            raise DimensionError("labels and folds must have one entry per feature row")
        if np.any((self.y < 0) | (self.y >= len(self.label_names))):
            raise ManifestError(f"labels must be in 0..{len(self.label_names) - 1}")

    def __len__(self) -> int:
        return self.X.shape[0]

    def counts(self) -> dict[str, int]:
        return {name: int(np.sum(self.y == i)) for i, name in enumerate(self.label_names)}

    def subset(self, idx: np.ndarray) -> "LabeledDataset":
        sources = [self.sources[i] for i in idx] if self.sources else []
        return LabeledDataset(self.X[idx], self.y[idx], self.folds[idx], self.label_names, sources)

    def with_labels(self, y: np.ndarray) -> "LabeledDataset":
        return LabeledDataset(self.X, y, self.folds, self.label_names, list(self.sources))

    @classmethod
    def from_clips(
        cls,
        clips: list[AudioClip],
        cfg: FrameConfig | None = None,
        bank: MelFilterbank | None = None,
        *,
        threads: int | None = None,
    ) -> "LabeledDataset":
        X = extract_matrix(clips, cfg, bank, threads=threads)
        return cls(
            X=X,
            y=np.array([c.label for c in clips], dtype=np.int64),
            folds=np.array([c.fold for c in clips], dtype=np.int64),
            sources=[c.source for c in clips],
        )


def _column_names() -> list[str]:
    return ["label", "fold"] + [f"f{i:02d}" for i in range(FEATURE_DIM)]


def _to_table(ds: LabeledDataset) -> np.ndarray:
    return np.column_stack([ds.y.astype(np.float64), ds.folds.astype(np.float64), ds.X])


def _from_table(table: np.ndarray, source: str) -> LabeledDataset:
    if table.ndim != 2 or table.shape[1] != FEATURE_DIM + 2:
        raise FormatError(f"{source}: expected {FEATURE_DIM + 2} columns, got shape {table.shape}")
    labels, folds = table[:, 0], table[:, 1]
    if np.any(labels != np.round(labels)) or np.any(folds != np.round(folds)):
        raise FormatError(f"{source}: label and fold columns must be integers")
    if np.any(~np.isin(labels, (URBAN, SIREN))):
        raise FormatError(f"{source}: labels must be 0 (urban) or 1 (siren)")
    if np.any((folds < 1) | (folds > N_FOLDS)):
        raise FormatError(f"{source}: folds must be in 1..{N_FOLDS}")
    if not np.all(np.isfinite(table)):
        raise FormatError(f"{source}: non-finite feature values")
    return LabeledDataset(X=table[:, 2:], y=labels.astype(np.int64), folds=folds.astype(np.int64))


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def write_csv(ds: LabeledDataset, path: Path) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_column_names())
    for label, fold, row in zip(ds.y, ds.folds, ds.X):
        writer.writerow([int(label), int(fold)] + [repr(float(v)) for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8")


def read_csv(path: Path) -> LabeledDataset:
    reader = csv.reader(io.StringIO(path.read_text(encoding="utf-8")))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != _column_names():
        raise FormatError(f"{path}: header must be label,fold,f00..f{FEATURE_DIM - 1:02d}")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            rows.append([float(v) for v in row])
        except ValueError:
            raise FormatError(f"{path}:{lineno}: non-numeric value") from None
        if len(rows[-1]) != FEATURE_DIM + 2:
            raise FormatError(f"{path}:{lineno}: expected {FEATURE_DIM + 2} values, got {len(row)}")
    table = np.array(rows, dtype=np.float64).reshape(-1, FEATURE_DIM + 2)
    return _from_table(table, str(path))


# ---------------------------------------------------------------------------
# Binary
# ---------------------------------------------------------------------------


def write_binary(ds: LabeledDataset, path: Path) -> None:
    table = _to_table(ds)
    header = _SELM_HEADER.pack(SELM_MAGIC, SELM_VERSION, table.shape[0], table.shape[1])
    path.write_bytes(header + table.astype("<f8").tobytes(order="C"))


def read_binary(path: Path) -> LabeledDataset:
    raw = path.read_bytes()
    if len(raw) < _SELM_HEADER.size:
        raise FormatError(f"{path}: truncated header")
    magic, version, rows, cols = _SELM_HEADER.unpack_from(raw)
    if magic != SELM_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != SELM_VERSION:
        raise UnsupportedVersionError(f"{path}: feature file version {version} (supported: {SELM_VERSION})")
    expected = _SELM_HEADER.size + rows * cols * 8
    if len(raw) != expected:
        raise FormatError(f"{path}: expected {expected} bytes, found {len(raw)}")
    table = np.frombuffer(raw, dtype="<f8", offset=_SELM_HEADER.size).reshape(rows, cols)
    return _from_table(table.astype(np.float64), str(path))


# ---------------------------------------------------------------------------
# Dispatch on suffix
# ---------------------------------------------------------------------------


def save_features(ds: LabeledDataset, path: str | Path) -> Path:
    path = Path(path)
    if path.suffix.lower() in BINARY_SUFFIXES:
        write_binary(ds, path)
    else:
        write_csv(ds, path)
    log.info("wrote %d feature rows to %s", len(ds), path)
    return path


def load_features(path: str | Path) -> LabeledDataset:
    path = Path(path)
    if not path.is_file():
        raise FormatError(f"feature file not found: {path}")
    if path.suffix.lower() in BINARY_SUFFIXES:
        return read_binary(path)
    return read_csv(path)
