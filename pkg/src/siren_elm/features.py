"""
Framed MFCC + zero-crossing-rate features and z-score normalization.

Per clip: frame (2048 / hop 512, Hamming) -> power spectrum -> 26-filter
mel bank -> log (floor 1e-10) -> orthonormal DCT-II, keep c0..c12; ZCR
per frame. The clip vector is 28 values:

    [mfcc_mean_00..12, mfcc_std_00..12, zcr_mean, zcr_std]

Standard deviations use the population convention (divide by n_frames).
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.fft

from .config import get_threads
from .errors import (
    ConfigError,
    DimensionError,
    DomainError,
    InsufficientDataError,
    StateError,
    TooShortError,
)
from .ingest import SAMPLE_RATE, AudioClip

log = logging.getLogger(__name__)

DEFAULT_FRAME_LEN = 2048
DEFAULT_HOP = 512
DEFAULT_WINDOW = "hamming"
DEFAULT_N_FILTERS = 26
N_MFCC = 13
LOG_FLOOR = 1e-10
FEATURE_DIM = 2 * N_MFCC + 2

FEATURE_NAMES = (
    tuple(f"mfcc_mean_{i:02d}" for i in range(N_MFCC))
    + tuple(f"mfcc_std_{i:02d}" for i in range(N_MFCC))
    + ("zcr_mean", "zcr_std")
)

WINDOWS = {
    "hamming": np.hamming,
    "hann": np.hanning,
    "rectangular": np.ones,
}


# ---------------------------------------------------------------------------
# Mel scale
# ---------------------------------------------------------------------------


def hz_to_mel(f: float | np.ndarray) -> float | np.ndarray:
    f_arr = np.asarray(f, dtype=np.float64)
    if np.any(f_arr < 0):
        raise DomainError(f"hz_to_mel: frequency must be >= 0, got {f}")
    out = 2595.0 * np.log10(1.0 + f_arr / 700.0)
    return float(out) if out.ndim == 0 else out


def mel_to_hz(m: float | np.ndarray) -> float | np.ndarray:
    m_arr = np.asarray(m, dtype=np.float64)
    if np.any(m_arr < 0):
        raise DomainError(f"mel_to_hz: mel value must be >= 0, got {m}")
    out = 700.0 * (10.0 ** (m_arr / 2595.0) - 1.0)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Configuration types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FrameConfig:
    frame_len: int = DEFAULT_FRAME_LEN
    hop: int = DEFAULT_HOP
    window: str = DEFAULT_WINDOW

    def __post_init__(self) -> None:
        if not 0 < self.hop <= self.frame_len:
            raise ConfigError(f"need 0 < hop <= frame_len, got hop={self.hop}, frame_len={self.frame_len}")
        if self.window not in WINDOWS:
            raise ConfigError(f"unknown window {self.window!r}; supported: {', '.join(WINDOWS)}")

    def as_dict(self) -> dict[str, object]:
        return {"frame_len": self.frame_len, "hop": self.hop, "window": self.window}


@dataclass(frozen=True)
class MelFilterbank:
    """Triangular filters (peak 1) with centers uniform in mel between f_min and f_max."""

    n_filters: int
    fft_bins: int
    weights: np.ndarray
    f_min: float
    f_max: float
    sample_rate: int

    @classmethod
    def build(
        cls,
        n_filters: int = DEFAULT_N_FILTERS,
        frame_len: int = DEFAULT_FRAME_LEN,
        sample_rate: int = SAMPLE_RATE,
        f_min: float = 0.0,
        f_max: float | None = None,
    ) -> "MelFilterbank":
        f_max = sample_rate / 2.0 if f_max is None else f_max
        if n_filters < 1:
            raise ConfigError("mel filterbank needs at least one filter")
        if not 0.0 <= f_min < f_max <= sample_rate / 2.0:
            raise ConfigError(f"need 0 <= f_min < f_max <= Nyquist, got {f_min}..{f_max}")

        fft_bins = frame_len // 2 + 1
        edges = mel_to_hz(np.linspace(hz_to_mel(f_min), hz_to_mel(f_max), n_filters + 2))
        centers = np.arange(fft_bins) * sample_rate / frame_len

        weights = np.zeros((n_filters, fft_bins))
        for m in range(n_filters):
            lo, mid, hi = edges[m], edges[m + 1], edges[m + 2]
            rising = (centers - lo) / (mid - lo)
            falling = (hi - centers) / (hi - mid)
            weights[m] = np.maximum(0.0, np.minimum(rising, falling))
        weights.setflags(write=False)
        return cls(n_filters, fft_bins, weights, float(f_min), float(f_max), sample_rate)

    def as_dict(self) -> dict[str, object]:
        return {"n_filters": self.n_filters, "f_min": self.f_min, "f_max": self.f_max}


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (FEATURE_DIM,):
            raise DimensionError(f"feature vector must have {FEATURE_DIM} values, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise DomainError("feature vector has non-finite entries")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def mfcc_mean(self) -> np.ndarray:
        return self.values[:N_MFCC]

    @property
    def mfcc_std(self) -> np.ndarray:
        return self.values[N_MFCC: 2 * N_MFCC]

    @property
    def zcr_mean(self) -> float:
        return float(self.values[-2])

    @property
    def zcr_std(self) -> float:
        return float(self.values[-1])


# ---------------------------------------------------------------------------
# Front end
# ---------------------------------------------------------------------------


def frame_signal(samples: Sequence[float] | np.ndarray, cfg: FrameConfig) -> np.ndarray:
    """Return a read-only (n_frames, frame_len) view; no partial trailing frame."""
    arr = np.asarray(samples, dtype=np.float64)
    if arr.shape[0] < cfg.frame_len:
        raise TooShortError(f"clip of {arr.shape[0]} samples is shorter than one frame ({cfg.frame_len})")
    return np.lib.stride_tricks.sliding_window_view(arr, cfg.frame_len)[:: cfg.hop]


def _window(name: str, n: int) -> np.ndarray:
    try:
        return WINDOWS[name](n)
    except KeyError:
        raise ConfigError(f"unknown window {name!r}; supported: {', '.join(WINDOWS)}") from None


def _power_spectra(frames: np.ndarray, window: str) -> np.ndarray:
    n = frames.shape[-1]
    if n < 1 or n & (n - 1):
        raise ConfigError(f"frame length must be a power of two, got {n}")
    spec = scipy.fft.rfft(frames * _window(window, n), axis=-1)
    return spec.real ** 2 + spec.imag ** 2


def power_spectrum(frame: Sequence[float] | np.ndarray, window: str = DEFAULT_WINDOW) -> np.ndarray:
    """One-sided |DFT|^2 (bins 0..n/2) of the tapered frame, unnormalized."""
    return _power_spectra(np.asarray(frame, dtype=np.float64), window)


def _mfcc_frames(frames: np.ndarray, cfg: FrameConfig, bank: MelFilterbank, n_coeffs: int) -> np.ndarray:
    if bank.fft_bins != cfg.frame_len // 2 + 1:
        raise ConfigError(
            f"filterbank has {bank.fft_bins} bins, frame_len {cfg.frame_len} needs {cfg.frame_len // 2 + 1}"
        )
    if not 1 <= n_coeffs <= bank.n_filters:
        raise ConfigError(f"n_coeffs must be in 1..{bank.n_filters}, got {n_coeffs}")
    energies = _power_spectra(frames, cfg.window) @ bank.weights.T
    log_energies = np.log(np.maximum(energies, LOG_FLOOR))
    return scipy.fft.dct(log_energies, type=2, norm="ortho", axis=-1)[:, :n_coeffs]


def mfcc(
    clip_samples: Sequence[float] | np.ndarray,
    cfg: FrameConfig,
    bank: MelFilterbank,
    n_coeffs: int = N_MFCC,
) -> np.ndarray:
    """(n_frames, n_coeffs) cepstra, coefficient 0 included."""
    return _mfcc_frames(frame_signal(clip_samples, cfg), cfg, bank, n_coeffs)


def _zcr_frames(frames: np.ndarray) -> np.ndarray:
    signs = np.sign(frames)
    return np.abs(np.diff(signs, axis=-1)).sum(axis=-1) / 2.0


def zcr(frame: Sequence[float] | np.ndarray) -> float:
    """Sum of |sgn(x_i) - sgn(x_{i-1})| / 2, with sgn(0) = 0."""
    arr = np.asarray(frame, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] < 2:
        raise TooShortError("zcr: frame needs at least 2 samples")
    return float(_zcr_frames(arr))


# ---------------------------------------------------------------------------
# Clip vectors
# ---------------------------------------------------------------------------


def features_from_samples(samples: np.ndarray, cfg: FrameConfig, bank: MelFilterbank) -> FeatureVector:
    frames = frame_signal(samples, cfg)
    cepstra = _mfcc_frames(frames, cfg, bank, N_MFCC)
    crossings = _zcr_frames(frames)
    values = np.concatenate([
        cepstra.mean(axis=0),
        cepstra.std(axis=0),
        [crossings.mean(), crossings.std()],
    ])
    return FeatureVector(values)


def extract_features(clip: AudioClip, cfg: FrameConfig, bank: MelFilterbank) -> FeatureVector:
    if bank.sample_rate != clip.sample_rate:
        raise ConfigError(f"filterbank built for {bank.sample_rate} Hz, clip is {clip.sample_rate} Hz")
    return features_from_samples(clip.samples, cfg, bank)


def extract_matrix(
    clips: Iterable[AudioClip],
    cfg: FrameConfig | None = None,
    bank: MelFilterbank | None = None,
    *,
    threads: int | None = None,
) -> np.ndarray:
    """Feature rows for many clips, extracted concurrently, in input order."""
    cfg = cfg or FrameConfig()
    bank = bank or MelFilterbank.build(frame_len=cfg.frame_len)
    clips = list(clips)
    if not clips:
        return np.zeros((0, FEATURE_DIM))
    with ThreadPoolExecutor(max_workers=min(threads or get_threads(), len(clips))) as pool:
        rows = list(pool.map(lambda c: extract_features(c, cfg, bank).values, clips))
    log.info("extracted %d feature vectors (%d dims)", len(rows), FEATURE_DIM)
    return np.vstack(rows)


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Normalizer:
    """Per-dimension z-score; an unfitted instance refuses to transform."""

    mean: np.ndarray | None = None
    std: np.ndarray | None = None

    @property
    def fitted(self) -> bool:
        return self.mean is not None and self.std is not None

    @classmethod
    def fit(cls, features: np.ndarray) -> "Normalizer":
        X = np.asarray(features, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] < 2:
            raise InsufficientDataError(f"normalizer needs >= 2 rows, got shape {X.shape}")
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        std = np.where(std > 0, std, 1.0)
        mean.setflags(write=False)
        std.setflags(write=False)
        return cls(mean=mean, std=std)

    @classmethod
    def identity(cls, dim: int) -> "Normalizer":
        return cls(mean=np.zeros(dim), std=np.ones(dim))

    def apply(self, features: np.ndarray) -> np.ndarray:
        if not self.fitted:
            raise StateError("normalizer applied before fit")
        X = np.asarray(features, dtype=np.float64)
        if X.shape[-1] != self.mean.shape[0]:
            raise DimensionError(f"expected {self.mean.shape[0]} features, got {X.shape[-1]}")
        return (X - self.mean) / self.std


def fit_normalizer(train_features: np.ndarray) -> Normalizer:
    return Normalizer.fit(train_features)


def apply_normalizer(normalizer: Normalizer, features: np.ndarray) -> np.ndarray:
    return normalizer.apply(features)


def extraction_settings(cfg: FrameConfig | None = None, bank: MelFilterbank | None = None) -> dict[str, object]:
    """Feature-extraction parameters echoed into every report."""
    cfg = cfg or FrameConfig()
    out: dict[str, object] = dict(cfg.as_dict())
    out.update(bank.as_dict() if bank else {"n_filters": DEFAULT_N_FILTERS, "f_min": 0.0, "f_max": SAMPLE_RATE / 2.0})
    out.update({"n_mfcc": N_MFCC, "c0_included": True, "log_floor": LOG_FLOOR,
                "dct": "type-II orthonormal", "std": "population", "feature_dim": FEATURE_DIM})
    return out
