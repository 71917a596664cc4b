"""
Dataset-free fixtures: siren-like two-tone sweeps versus noise textures.

Used by the smoke tests and by ``siren-elm synth`` to try the whole
pipeline without downloading ESC-50. Folds are assigned round robin per
class, so 40 + 640 clips give 8 + 128 clips in each of the five folds.
"""

from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import Iterator

import numpy as np

from .feature_store import LabeledDataset
from .features import FrameConfig, MelFilterbank
from .ingest import CLIP_SECONDS, N_FOLDS, SAMPLE_RATE, SIREN, URBAN, AudioClip, write_wav

log = logging.getLogger(__name__)

SIREN_LOW_HZ = 600.0
SIREN_HIGH_HZ = 1500.0
PEAK = 0.9
URBAN_FIXTURE_CATEGORIES = ("engine", "rain", "wind", "helicopter")
ESC50_HEADER = ("filename", "fold", "target", "category", "esc10", "src_file", "take")
_ESC50_TARGETS = {"siren": 42, "engine": 44, "rain": 10, "wind": 16, "helicopter": 40, "dog": 0}


def _n_samples(sample_rate: int, seconds: float) -> int:
    return int(round(sample_rate * seconds))


def siren_clip(rng: np.random.Generator, sample_rate: int = SAMPLE_RATE, seconds: float = CLIP_SECONDS) -> np.ndarray:
    """Alternating two-tone sweep between roughly 600 and 1500 Hz."""
    n = _n_samples(sample_rate, seconds)
    t = np.arange(n) / sample_rate
    lo = rng.uniform(SIREN_LOW_HZ, 800.0)
    hi = rng.uniform(1200.0, SIREN_HIGH_HZ)
    period = rng.uniform(0.3, 1.2)
    phase = (t / period + rng.random()) % 1.0
    if rng.random() < 0.5:
        # wail: triangular sweep lo -> hi -> lo
        shape = 1.0 - np.abs(2.0 * phase - 1.0)
    else:
        # hi-lo: hard alternation with short glides
        shape = np.clip((np.abs(2.0 * phase - 1.0) - 0.5) * -20.0 + 0.5, 0.0, 1.0)
    freq = lo + (hi - lo) * shape
    tone = np.sin(2.0 * np.pi * np.cumsum(freq) / sample_rate + rng.uniform(0, 2 * np.pi))
    tone += 0.02 * rng.standard_normal(n)
    return PEAK * rng.uniform(0.4, 1.0) * tone / np.max(np.abs(tone))


def urban_clip(rng: np.random.Generator, sample_rate: int = SAMPLE_RATE, seconds: float = CLIP_SECONDS) -> np.ndarray:
    """White, brown, or bursty noise."""
    n = _n_samples(sample_rate, seconds)
    kind = rng.integers(3)
    noise = rng.standard_normal(n)
    if kind == 1:
        noise = np.cumsum(noise)
        noise -= np.linspace(noise[0], noise[-1], n)
    elif kind == 2:
        envelope = np.repeat(rng.random(n // 2205 + 1) ** 4, 2205)[:n]
        noise *= envelope
    peak = np.max(np.abs(noise))
    if peak == 0:
        return noise
    return PEAK * rng.uniform(0.2, 1.0) * noise / peak


def iter_clips(
    n_siren: int = 40,
    n_urban: int = 640,
    seed: int = 0,
    sample_rate: int = SAMPLE_RATE,
) -> Iterator[AudioClip]:
    rng = np.random.default_rng(seed)
    for i in range(n_siren):
        yield AudioClip(siren_clip(rng, sample_rate), sample_rate, SIREN, i % N_FOLDS + 1, f"synth-siren-{i:03d}")
    for i in range(n_urban):
        yield AudioClip(urban_clip(rng, sample_rate), sample_rate, URBAN, i % N_FOLDS + 1, f"synth-urban-{i:03d}")


def synthetic_dataset(
    n_siren: int = 40,
    n_urban: int = 640,
    seed: int = 0,
    *,
    cfg: FrameConfig | None = None,
    chunk: int = 32,
    threads: int | None = None,
) -> LabeledDataset:
    """Feature matrix of a synthetic fixture, extracted chunk by chunk to bound memory."""
    cfg = cfg or FrameConfig()
    bank = MelFilterbank.build(frame_len=cfg.frame_len)
    parts: list[LabeledDataset] = []
    batch: list[AudioClip] = []
    for clip in iter_clips(n_siren, n_urban, seed):
        batch.append(clip)
        if len(batch) == chunk:
            parts.append(LabeledDataset.from_clips(batch, cfg, bank, threads=threads))
            batch = []
    if batch:
        parts.append(LabeledDataset.from_clips(batch, cfg, bank, threads=threads))
    return LabeledDataset(
        X=np.vstack([p.X for p in parts]),
        y=np.concatenate([p.y for p in parts]),
        folds=np.concatenate([p.folds for p in parts]),
        sources=[s for p in parts for s in p.sources],
    )


def write_fixture(
    out_dir: str | Path,
    n_siren: int = 40,
    n_urban: int = 640,
    seed: int = 0,
    *,
    n_excluded: int = 0,
) -> Path:
    """Write ``audio/*.wav`` and an ESC-50 style ``meta/esc50.csv``; return the manifest path."""
    out_dir = Path(out_dir)
    audio_dir = out_dir / "audio"
    meta_dir = out_dir / "meta"
    audio_dir.mkdir(parents=True, exist_ok=True)
    meta_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    for i, clip in enumerate(iter_clips(n_siren, n_urban, seed)):
        if clip.label == SIREN:
            category = "siren"
        else:
            category = URBAN_FIXTURE_CATEGORIES[i % len(URBAN_FIXTURE_CATEGORIES)]
        filename = f"{clip.fold}-{clip.source}.wav"
        write_wav(audio_dir / filename, clip.samples, clip.sample_rate)
        rows.append((filename, clip.fold, _ESC50_TARGETS[category], category, "False", clip.source, "A"))
    for i in range(n_excluded):
        # excluded rows never need audio on disk
        rows.append((f"{i % N_FOLDS + 1}-synth-dog-{i:03d}.wav", i % N_FOLDS + 1, 0, "dog", "True", f"dog-{i}", "A"))

    manifest = meta_dir / "esc50.csv"
    with manifest.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(ESC50_HEADER)
        writer.writerows(rows)
    log.info("wrote synthetic fixture: %d siren, %d urban clips under %s", n_siren, n_urban, out_dir)
    return manifest
