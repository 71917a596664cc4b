"""
WAV decoding, clip standardization, and ESC-50 manifest loading.

Only the siren category (class 1) and sixteen urban categories (class 0)
of ESC-50 are kept; every other manifest row is excluded and counted.
"""

from __future__ import annotations

import csv
import io
import logging
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .config import get_threads
from .errors import (
    EmptyInputError,
    FormatError,
    IngestionError,
    ManifestError,
    RateMismatchError,
    UnsupportedCodecError,
)

log = logging.getLogger(__name__)

SAMPLE_RATE = 44100
CLIP_SECONDS = 5.0
N_FOLDS = 5

SIREN = 1
URBAN = 0
LABEL_NAMES = ("urban", "siren")

SIREN_CATEGORY = "siren"
URBAN_CATEGORIES = frozenset({
    "car_horn",
    "engine",
    "train",
    "helicopter",
    "chainsaw",
    "airplane",
    "fireworks",
    "hand_saw",
    "crying_baby",
    "sneezing",
    "clapping",
    "coughing",
    "footsteps",
    "laughing",
    "rain",
    "wind",
})

# Full ESC-50: 2000 rows; the siren/urban slice is 40 + 640.
ESC50_ROWS = 2000
ESC50_COUNTS = {SIREN: 40, URBAN: 640}

MANIFEST_COLUMNS = ("filename", "fold", "category")

# RIFF format tags
WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_IEEE_FLOAT = 0x0003
WAVE_FORMAT_EXTENSIBLE = 0xFFFE
_CODEC_NAMES = {0x0002: "ADPCM", 0x0006: "A-law", 0x0007: "mu-law", 0x0055: "MP3"}


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


class WavData(NamedTuple):
    """Decoded audio: ``samples`` has shape (channels, frames), values in [-1, 1]."""

    samples: np.ndarray
    sample_rate: int
    channels: int


@dataclass(frozen=True)
class AudioClip:
    """A standardized mono clip: exactly ``sample_rate * 5`` finite samples in [-1, 1]."""

    samples: np.ndarray
    sample_rate: int
    label: int
    fold: int
    source: str

    def __post_init__(self) -> None:
        if self.sample_rate <= 0:
            raise FormatError(f"{self.source}: sample rate must be positive")
        if self.fold not in range(1, N_FOLDS + 1):
            raise ManifestError(f"{self.source}: fold {self.fold} not in 1..{N_FOLDS}")
        if self.label not in (URBAN, SIREN):
            raise ManifestError(f"{self.source}: label {self.label} is not binary")
        samples = np.asarray(self.samples, dtype=np.float64)
        expected = int(round(self.sample_rate * CLIP_SECONDS))
        if samples.ndim != 1 or samples.shape[0] != expected:
            raise FormatError(
                f"{self.source}: clip must hold {expected} mono samples, got shape {samples.shape}"
            )
        if not np.all(np.isfinite(samples)) or np.any(np.abs(samples) > 1.0):
            raise FormatError(f"{self.source}: samples must be finite and within [-1, 1]")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def duration(self) -> float:
        return self.samples.shape[0] / self.sample_rate


@dataclass(frozen=True)
class ManifestEntry:
    filename: str
    fold: int
    category: str

    @property
    def label(self) -> int | None:
        """1 for siren, 0 for the urban list, None when the row is excluded."""
        return category_label(self.category)


@dataclass
class LoadedDataset:
    """Clips kept from a manifest plus bookkeeping for reports."""

    clips: list[AudioClip]
    excluded: int = 0
    manifest_rows: int = 0
    counts: dict[int, int] = field(default_factory=dict)

    def __iter__(self) -> Iterator[AudioClip]:
        return iter(self.clips)

    def __len__(self) -> int:
        return len(self.clips)

    def __getitem__(self, i: int) -> AudioClip:
        return self.clips[i]

    @property
    def duration_hours(self) -> float:
        return sum(c.duration for c in self.clips) / 3600.0


# ---------------------------------------------------------------------------
# WAV decoding
# ---------------------------------------------------------------------------


def _read_fmt_chunk(body: bytes, source: str) -> tuple[int, int, int, int]:
    if len(body) < 16:
        raise FormatError(f"{source}: fmt chunk too small ({len(body)} bytes)")
    format_tag, channels, rate, _byte_rate, block_align, bits = struct.unpack("<HHIIHH", body[:16])
    if format_tag == WAVE_FORMAT_EXTENSIBLE:
        if len(body) < 40:
            raise FormatError(f"{source}: truncated WAVE_FORMAT_EXTENSIBLE fmt chunk")
        # Subformat GUID starts at offset 24; its first two bytes are the real tag.
        format_tag = struct.unpack("<H", body[24:26])[0]
    if channels < 1 or rate < 1 or block_align < 1:
        raise FormatError(f"{source}: invalid fmt chunk (channels={channels}, rate={rate})")
    return format_tag, channels, rate, bits


def _sample_dtype(format_tag: int, bits: int, source: str) -> tuple[str, float]:
    if format_tag == WAVE_FORMAT_PCM and bits == 16:
        return "<i2", 32768.0
    if format_tag == WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        return "<f4", 1.0
    if format_tag in (WAVE_FORMAT_PCM, WAVE_FORMAT_IEEE_FLOAT):
        kind = "PCM" if format_tag == WAVE_FORMAT_PCM else "IEEE float"
        raise UnsupportedCodecError(f"{source}: {bits}-bit {kind} is not supported (PCM16 or float32 only)")
    name = _CODEC_NAMES.get(format_tag, f"format tag {format_tag:#06x}")
    raise UnsupportedCodecError(f"{source}: unsupported encoding {name} (PCM16 or float32 only)")


def decode_wav_bytes(raw: bytes, source: str = "<bytes>") -> WavData:
    """Decode an in-memory RIFF/WAVE file (PCM16 little-endian or IEEE float32)."""
    if len(raw) < 12 or raw[:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise FormatError(f"{source}: not a RIFF/WAVE file")

    fid = io.BytesIO(raw)
    fid.seek(12)
    fmt: tuple[int, int, int, int] | None = None
    data: bytes | None = None
    while True:
        header = fid.read(8)
        if len(header) == 0:
            break
        if len(header) < 8:
            raise FormatError(f"{source}: truncated chunk header")
        chunk_id, size = struct.unpack("<4sI", header)
        body = fid.read(size)
        if len(body) < size:
            raise FormatError(
                f"{source}: truncated {chunk_id.decode('latin-1')!r} chunk "
                f"({len(body)} of {size} bytes)"
            )
        if size % 2:
            fid.read(1)  # pad byte
        if chunk_id == b"fmt ":
            fmt = _read_fmt_chunk(body, source)
        elif chunk_id == b"data":
            data = body
        if fmt is not None and data is not None:
            break

    if fmt is None:
        raise FormatError(f"{source}: missing fmt chunk")
    if data is None:
        raise FormatError(f"{source}: missing data chunk")

    format_tag, channels, rate, bits = fmt
    dtype, scale = _sample_dtype(format_tag, bits, source)
    frame_bytes = channels * np.dtype(dtype).itemsize
    if len(data) % frame_bytes:
        raise FormatError(f"{source}: data chunk is not a whole number of frames")

    values = np.frombuffer(data, dtype=dtype).astype(np.float64) / scale
    if not np.all(np.isfinite(values)):
        raise FormatError(f"{source}: non-finite float samples")
    values = np.clip(values, -1.0, 1.0)
    samples = values.reshape(-1, channels).T.copy()
    return WavData(samples=samples, sample_rate=rate, channels=channels)


def decode_wav(path: str | Path) -> WavData:
    """Read and decode a WAV file from disk."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except FileNotFoundError:
        raise IngestionError(f"missing audio file: {path}", path=str(path)) from None
    return decode_wav_bytes(raw, source=str(path))


def write_wav(path: str | Path, samples: np.ndarray, sample_rate: int = SAMPLE_RATE) -> None:
    """Write mono or (channels, frames) samples in [-1, 1] as PCM16 WAV."""
    arr = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    channels = arr.shape[0]
    pcm = np.round(np.clip(arr, -1.0, 1.0) * 32767.0).astype("<i2")
    data = pcm.T.tobytes()
    header = b"RIFF" + struct.pack("<I", 36 + len(data)) + b"WAVE"
    fmt = b"fmt " + struct.pack(
        "<IHHIIHH", 16, WAVE_FORMAT_PCM, channels, sample_rate,
        sample_rate * channels * 2, channels * 2, 16,
    )
    Path(path).write_bytes(header + fmt + b"data" + struct.pack("<I", len(data)) + data)


# ---------------------------------------------------------------------------
# Standardization
# ---------------------------------------------------------------------------


def to_mono(samples: Sequence[Sequence[float]] | np.ndarray) -> np.ndarray:
    """Element-wise mean across channels."""
    arr = np.asarray(samples, dtype=np.float64)
    if arr.size == 0 or arr.ndim != 2 or arr.shape[0] == 0:
        raise EmptyInputError("to_mono: need at least one non-empty channel")
    return arr.mean(axis=0)


def fix_length(
    samples: Sequence[float] | np.ndarray,
    sample_rate: int,
    target_seconds: float = CLIP_SECONDS,
) -> np.ndarray:
    """Zero-pad or truncate at the end to exactly ``sample_rate * target_seconds`` samples."""
    if sample_rate <= 0:
        raise FormatError(f"sample rate must be positive, got {sample_rate}")
    arr = np.asarray(samples, dtype=np.float64)
    if arr.size == 0:
        raise EmptyInputError("fix_length: empty input")
    target = int(round(sample_rate * target_seconds))
    if arr.shape[0] >= target:
        return arr[:target].copy()
    out = np.zeros(target, dtype=np.float64)
    out[: arr.shape[0]] = arr
    return out


def standardize(wav: WavData) -> np.ndarray:
    return fix_length(to_mono(wav.samples), wav.sample_rate)


# ---------------------------------------------------------------------------
# Manifest
# ---------------------------------------------------------------------------


def normalize_category(raw: str) -> str:
    """Trim, lower-case, and map spaces/hyphens to underscores ("Car horn" -> "car_horn")."""
    return "_".join(raw.strip().lower().replace("-", " ").split())


def category_label(category: str) -> int | None:
    name = normalize_category(category)
    if name == SIREN_CATEGORY:
        return SIREN
    if name in URBAN_CATEGORIES:
        return URBAN
    return None


def read_manifest(path: str | Path) -> list[ManifestEntry]:
    """Parse an ESC-50 style CSV; only filename, fold and category are consumed."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8-sig")
    except FileNotFoundError:
        raise ManifestError(f"manifest not found: {path}") from None

    reader = csv.DictReader(io.StringIO(text))
    header = [h.strip().lower() for h in (reader.fieldnames or [])]
    missing = [c for c in MANIFEST_COLUMNS if c not in header]
    if missing:
        raise ManifestError(
            f"{path}: unknown column layout {header}; required columns: {', '.join(MANIFEST_COLUMNS)}"
        )
    reader.fieldnames = header

    entries = []
    for lineno, row in enumerate(reader, start=2):
        filename = (row.get("filename") or "").strip()
        fold_raw = (row.get("fold") or "").strip()
        if not filename:
            raise ManifestError(f"{path}:{lineno}: empty filename")
        try:
            fold = int(fold_raw)
        except ValueError:
            raise ManifestError(f"{path}:{lineno}: missing or non-integer fold {fold_raw!r}") from None
        entries.append(ManifestEntry(filename=filename, fold=fold, category=row.get("category") or ""))
    return entries


def _load_clip(entry: ManifestEntry, audio_dir: Path) -> AudioClip:
    path = audio_dir / entry.filename
    try:
        wav = decode_wav(path)
        if wav.sample_rate != SAMPLE_RATE:
            raise RateMismatchError(
                f"{entry.filename}: sample rate {wav.sample_rate} Hz, expected {SAMPLE_RATE} Hz",
                path=str(path),
            )
        return AudioClip(
            samples=standardize(wav),
            sample_rate=wav.sample_rate,
            label=entry.label,
            fold=entry.fold,
            source=entry.filename,
        )
    except IngestionError:
        raise
    except (FormatError, EmptyInputError) as e:
        raise IngestionError(f"{entry.filename}: {e}", path=str(path)) from e


def load_dataset(
    manifest: str | Path,
    audio_dir: str | Path,
    *,
    threads: int | None = None,
) -> LoadedDataset:
    """Load the siren/urban slice of a manifest, decoding files concurrently.

    Clips keep manifest order. On a full 2000-row ESC-50 manifest the class
    counts must come out as 40 siren / 640 urban.
    """
    audio_dir = Path(audio_dir)
    if not audio_dir.is_dir():
        raise IngestionError(f"audio directory not found: {audio_dir}", path=str(audio_dir))

    entries = read_manifest(manifest)
    kept = [e for e in entries if e.label is not None]
    excluded = len(entries) - len(kept)
    if excluded:
        log.warning("excluded %d manifest rows outside the siren/urban categories", excluded)
    for e in kept:
        if e.fold not in range(1, N_FOLDS + 1):
            raise ManifestError(f"{e.filename}: fold {e.fold} not in 1..{N_FOLDS}")

    workers = min(threads or get_threads(), max(1, len(kept)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        clips = list(pool.map(lambda e: _load_clip(e, audio_dir), kept))

    counts = {SIREN: 0, URBAN: 0}
    for c in clips:
        counts[c.label] += 1
    log.info("loaded %d clips: %d siren, %d urban", len(clips), counts[SIREN], counts[URBAN])

    if len(entries) == ESC50_ROWS and counts != ESC50_COUNTS:
        raise ManifestError(
            f"full ESC-50 manifest should yield 40 siren / 640 urban clips, "
            f"got {counts[SIREN]} / {counts[URBAN]}"
        )
    return LoadedDataset(clips=clips, excluded=excluded, manifest_rows=len(entries), counts=counts)
