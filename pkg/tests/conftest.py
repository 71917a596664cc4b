"""Shared fixtures: in-memory WAV builders, small labeled datasets, a synthetic ESC-50 tree."""

from __future__ import annotations

import logging
import os
import struct
from pathlib import Path

import numpy as np
import pytest

from siren_elm.config import LOGGER_NAME
from siren_elm.feature_store import LabeledDataset, save_features
from siren_elm.features import FEATURE_DIM
from siren_elm.synthetic import synthetic_dataset, write_fixture


def wav_bytes(
    payload: bytes,
    *,
    format_tag: int = 1,
    channels: int = 1,
    rate: int = 44100,
    bits: int = 16,
    extensible_tag: int | None = None,
    extra_chunks: bytes = b"",
) -> bytes:
    """Assemble a RIFF/WAVE file around an already-encoded data payload."""
    block_align = channels * bits // 8
    fmt_body = struct.pack("<HHIIHH", format_tag, channels, rate, rate * block_align, block_align, bits)
    if extensible_tag is not None:
        guid_tail = b"\x00\x00\x00\x00\x10\x00\x80\x00\x00\xaa\x00\x38\x9b\x71"
        fmt_body += struct.pack("<HHI", 22, bits, 0) + struct.pack("<H", extensible_tag) + guid_tail
    chunks = extra_chunks + b"fmt " + struct.pack("<I", len(fmt_body)) + fmt_body
    chunks += b"data" + struct.pack("<I", len(payload)) + payload
    return b"RIFF" + struct.pack("<I", 4 + len(chunks)) + b"WAVE" + chunks


def pcm16(values) -> bytes:
    return np.asarray(values, dtype="<i2").tobytes()


def float32(values) -> bytes:
    return np.asarray(values, dtype="<f4").tobytes()


def blob_dataset(
    n_siren: int = 40,
    n_urban: int = 160,
    *,
    separation: float = 8.0,
    seed: int = 0,
) -> LabeledDataset:
    """Two Gaussian blobs in 28 dims, folds assigned round robin per class."""
    rng = np.random.default_rng(seed)
    X_u = rng.standard_normal((n_urban, FEATURE_DIM))
    X_s = rng.standard_normal((n_siren, FEATURE_DIM)) + separation / np.sqrt(FEATURE_DIM)
    X = np.vstack([X_s, X_u]) * rng.uniform(0.5, 20.0, FEATURE_DIM) + rng.uniform(-50, 50, FEATURE_DIM)
    y = np.concatenate([np.ones(n_siren, dtype=np.int64), np.zeros(n_urban, dtype=np.int64)])
    folds = np.concatenate([np.arange(n_siren) % 5 + 1, np.arange(n_urban) % 5 + 1]).astype(np.int64)
    return LabeledDataset(X=X, y=y, folds=folds)


@pytest.fixture(autouse=True)
def _reset_package_logger():
    """setup_logging() binds a handler to the current stderr; drop it between tests."""
    yield
    logger = logging.getLogger(LOGGER_NAME)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()
    logger.propagate = True
    logger.setLevel(logging.NOTSET)


@pytest.fixture
def blobs() -> LabeledDataset:
    return blob_dataset()


@pytest.fixture(scope="session")
def fixture_tree(tmp_path_factory) -> Path:
    """Small synthetic ESC-50 layout: 10 siren + 30 urban clips, 3 excluded rows."""
    root = tmp_path_factory.mktemp("esc50-synth")
    write_fixture(root, n_siren=10, n_urban=30, seed=7, n_excluded=3)
    return root


@pytest.fixture(scope="session")
def fixture_features(tmp_path_factory) -> Path:
    """Feature CSV of a 10 + 30 synthetic fixture."""
    path = tmp_path_factory.mktemp("features") / "synth.csv"
    save_features(synthetic_dataset(10, 30, seed=3), path)
    return path


@pytest.fixture(scope="session")
def esc50_dir() -> Path:
    raw = os.environ.get("SIREN_ELM_ESC50_DIR")
    if not raw:
        pytest.skip("SIREN_ELM_ESC50_DIR not set")
    return Path(raw)
