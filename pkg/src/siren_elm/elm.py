"""
Extreme Learning Machine: random hidden layer, output weights in closed form.

    H[n, i] = g(a_i . x_n + b_i)        a_i, b_i ~ U[-1, 1], fixed by seed
    beta    = pinv(H) @ T               (default)
    beta    = (H'H + I/lam)^-1 H'T      (--ridge lam)

Model file (``.elmm``), all little-endian:

    magic       4   b"ELMM"
    version     2   u16 (currently 1)
    seed        8   i64
    d, L, m     12  u32 x 3  (input dim, hidden nodes, classes)
    activation  2+n u16 byte length + UTF-8 identifier
    W           8*L*d  float64, row-major (L x d)
    b           8*L    float64
    beta        8*L*m  float64, row-major (L x m)
    norm mean   8*d    float64
    norm std    8*d    float64
    labels      m x (u16 byte length + UTF-8 name)

Nothing may follow the last label.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
import scipy.linalg
from scipy.special import expit

from .errors import (
    ConfigError,
    DegenerateDataError,
    DimensionError,
    ModelFormatError,
    NumericError,
    StateError,
    UnsupportedVersionError,
)
from .features import Normalizer
from .ingest import LABEL_NAMES

log = logging.getLogger(__name__)

MODEL_MAGIC = b"ELMM"
MODEL_VERSION = 1

DEFAULT_HIDDEN = 10
DEFAULT_ACTIVATION = "sigmoid"

ACTIVATIONS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "sigmoid": expit,
    "tanh": np.tanh,
    "hardlim": lambda z: (z >= 0).astype(np.float64),
    "relu": lambda z: np.maximum(z, 0.0),
    "linear": lambda z: z,
}


@dataclass(frozen=True)
class ElmConfig:
    hidden_nodes: int = DEFAULT_HIDDEN
    activation: str = DEFAULT_ACTIVATION
    ridge: float | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.hidden_nodes < 1:
            raise ConfigError(f"hidden_nodes must be >= 1, got {self.hidden_nodes}")
        if self.activation not in ACTIVATIONS:
            raise ConfigError(
                f"unknown activation {self.activation!r}; supported: {', '.join(ACTIVATIONS)}"
            )
        if self.ridge is not None and not self.ridge >= 0:
            raise ConfigError(f"ridge must be >= 0, got {self.ridge}")


@dataclass(frozen=True, eq=False)
class ElmModel:
    input_weights: np.ndarray
    biases: np.ndarray
    output_weights: np.ndarray
    activation: str
    norm_mean: np.ndarray
    norm_std: np.ndarray
    label_names: tuple[str, ...]
    seed: int

    @property
    def n_inputs(self) -> int:
        return self.input_weights.shape[1]

    @property
    def hidden_nodes(self) -> int:
        return self.input_weights.shape[0]

    @property
    def normalizer(self) -> Normalizer:
        return Normalizer(mean=self.norm_mean, std=self.norm_std)

    def decision_scores(self, X: np.ndarray, *, normalized: bool = False) -> np.ndarray:
        """(N, m) scores h(x) @ beta; raw rows are normalized with the stored statistics first."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.n_inputs:
            raise DimensionError(f"model expects {self.n_inputs} features, got {X.shape[1]}")
        if not normalized:
            X = self.normalizer.apply(X)
        H = hidden_output(X, self.input_weights, self.biases, self.activation)
        return H @ self.output_weights


# ---------------------------------------------------------------------------
# Training steps
# ---------------------------------------------------------------------------


def init_random_layer(d: int, L: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Input weights (L x d) and biases (L,) drawn i.i.d. from U[-1, 1]."""
    if d < 1 or L < 1:
        raise ConfigError(f"need d >= 1 and L >= 1, got d={d}, L={L}")
    rng = np.random.default_rng(seed)
    weights = rng.uniform(-1.0, 1.0, size=(L, d))
    biases = rng.uniform(-1.0, 1.0, size=L)
    return weights, biases


def hidden_output(
    X: np.ndarray,
    weights: np.ndarray,
    biases: np.ndarray,
    activation: str = DEFAULT_ACTIVATION,
) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or weights.ndim != 2 or X.shape[1] != weights.shape[1]:
        raise DimensionError(f"X {X.shape} does not match input weights {weights.shape}")
    if biases.shape != (weights.shape[0],):
        raise DimensionError(f"biases {biases.shape} do not match {weights.shape[0]} hidden nodes")
    try:
        g = ACTIVATIONS[activation]
    except KeyError:
        raise ConfigError(f"unknown activation {activation!r}") from None
    return g(X @ weights.T + biases)


def pinv_cutoff(singular_values: np.ndarray, shape: tuple[int, int]) -> float:
    """Singular values at or below max(N, L) * sigma_max * eps count as zero."""
    if singular_values.size == 0:
        return 0.0
    return max(shape) * float(singular_values.max()) * np.finfo(np.float64).eps


def solve_output_weights(H: np.ndarray, T: np.ndarray, ridge: float | None = None) -> np.ndarray:
    H = np.asarray(H, dtype=np.float64)
    T = np.asarray(T, dtype=np.float64)
    if H.ndim != 2 or H.shape[0] < 1:
        raise DimensionError(f"H must be a non-empty matrix, got shape {H.shape}")
    if T.ndim != 2 or T.shape[0] != H.shape[0]:
        raise DimensionError(f"T {T.shape} does not match H {H.shape}")
    if not np.all(np.isfinite(H)):
        raise NumericError("hidden layer output contains non-finite values")

    if ridge is None:
        U, s, Vt = np.linalg.svd(H, full_matrices=False)
        keep = s > pinv_cutoff(s, H.shape)
        inv = np.zeros_like(s)
        inv[keep] = 1.0 / s[keep]
        return Vt.T @ (inv[:, None] * (U.T @ T))

    if ridge == 0:
        return np.zeros((H.shape[1], T.shape[1]))
    gram = H.T @ H + np.eye(H.shape[1]) / ridge
    return scipy.linalg.solve(gram, H.T @ T, assume_a="pos")


def one_hot(y: np.ndarray, n_classes: int) -> np.ndarray:
    y = np.asarray(y, dtype=np.int64)
    if np.any((y < 0) | (y >= n_classes)):
        raise ConfigError(f"labels must be in 0..{n_classes - 1}")
    T = np.zeros((y.shape[0], n_classes))
    T[np.arange(y.shape[0]), y] = 1.0
    return T


def train(
    X_train: np.ndarray,
    y_train: np.ndarray,
    cfg: ElmConfig,
    *,
    normalizer: Normalizer | None = None,
    label_names: tuple[str, ...] = LABEL_NAMES,
) -> ElmModel:
    """Fit on already-normalized rows; ``normalizer`` is stored for raw-input prediction."""
    X = np.asarray(X_train, dtype=np.float64)
    y = np.asarray(y_train, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise DimensionError(f"X {X.shape} and y {y.shape} disagree")
    if X.shape[0] < 2 or np.unique(y).shape[0] < 2:
        raise DegenerateDataError("training needs at least two rows covering both classes")

    d = X.shape[1]
    if normalizer is None:
        normalizer = Normalizer.identity(d)
    elif not normalizer.fitted:
        raise StateError("train() was given an unfitted normalizer")
    weights, biases = init_random_layer(d, cfg.hidden_nodes, cfg.seed)
    H = hidden_output(X, weights, biases, cfg.activation)
    beta = solve_output_weights(H, one_hot(y, len(label_names)), cfg.ridge)
    if not np.all(np.isfinite(beta)):
        raise NumericError("output weights are not finite")
    return ElmModel(
        input_weights=weights,
        biases=biases,
        output_weights=beta,
        activation=cfg.activation,
        norm_mean=np.asarray(normalizer.mean, dtype=np.float64),
        norm_std=np.asarray(normalizer.std, dtype=np.float64),
        label_names=tuple(label_names),
        seed=cfg.seed,
    )


def predict(model: ElmModel, x: np.ndarray) -> tuple[int, np.ndarray]:
    """Label and scores for one raw feature vector; exact ties go to the lower class."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionError(f"expected one feature vector, got shape {x.shape}")
    scores = model.decision_scores(x[None, :])[0]
    return int(np.argmax(scores)), scores


def predict_batch(model: ElmModel, X: np.ndarray, *, normalized: bool = False) -> np.ndarray:
    return np.argmax(model.decision_scores(X, normalized=normalized), axis=1)


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

_HEAD = struct.Struct("<4sHqIII")


def _pack_str(s: str) -> bytes:
    raw = s.encode("utf-8")
    return struct.pack("<H", len(raw)) + raw


class _Reader:
    def __init__(self, raw: bytes, source: str):
        self.raw = raw
        self.pos = 0
        self.source = source

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.raw):
            raise ModelFormatError(f"{self.source}: truncated model file")
        out = self.raw[self.pos: self.pos + n]
        self.pos += n
        return out

    def string(self) -> str:
        (n,) = struct.unpack("<H", self.take(2))
        try:
            return self.take(n).decode("utf-8")
        except UnicodeDecodeError:
            raise ModelFormatError(f"{self.source}: invalid string") from None

    def floats(self, *shape: int) -> np.ndarray:
        count = int(np.prod(shape))
        return np.frombuffer(self.take(8 * count), dtype="<f8").astype(np.float64).reshape(shape)


def model_to_bytes(model: ElmModel) -> bytes:
    L, d = model.input_weights.shape
    m = model.output_weights.shape[1]
    parts = [
        _HEAD.pack(MODEL_MAGIC, MODEL_VERSION, model.seed, d, L, m),
        _pack_str(model.activation),
    ]
    for arr in (model.input_weights, model.biases, model.output_weights, model.norm_mean, model.norm_std):
        parts.append(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    parts.extend(_pack_str(name) for name in model.label_names)
    return b"".join(parts)


def model_from_bytes(raw: bytes, source: str = "<bytes>") -> ElmModel:
    if len(raw) < 6 or raw[:4] != MODEL_MAGIC:
        raise ModelFormatError(f"{source}: not a model file (bad magic)")
    (version,) = struct.unpack_from("<H", raw, 4)
    if version != MODEL_VERSION:
        raise UnsupportedVersionError(
            f"{source}: model file version {version} is not supported (this build reads {MODEL_VERSION})"
        )
    r = _Reader(raw, source)
    _, _, seed, d, L, m = _HEAD.unpack(r.take(_HEAD.size))
    if d < 1 or L < 1 or m < 1:
        raise ModelFormatError(f"{source}: invalid dimensions d={d}, L={L}, m={m}")
    if seed < 0:
        raise ModelFormatError(f"{source}: negative seed {seed}")
    activation = r.string()
    if activation not in ACTIVATIONS:
        raise ModelFormatError(f"{source}: unknown activation {activation!r}")
    weights = r.floats(L, d)
    biases = r.floats(L)
    beta = r.floats(L, m)
    mean = r.floats(d)
    std = r.floats(d)
    labels = tuple(r.string() for _ in range(m))
    if r.pos != len(raw):
        raise ModelFormatError(f"{source}: {len(raw) - r.pos} trailing bytes")
    for name, arr in (("weights", weights), ("biases", biases), ("output weights", beta),
                      ("normalizer mean", mean), ("normalizer std", std)):
        if not np.all(np.isfinite(arr)):
            raise ModelFormatError(f"{source}: non-finite {name}")
    if np.any(std <= 0):
        raise ModelFormatError(f"{source}: normalizer std must be positive")
    return ElmModel(weights, biases, beta, activation, mean, std, labels, seed)


def save_model(model: ElmModel, path: str | Path) -> Path:
    path = Path(path)
    path.write_bytes(model_to_bytes(model))
    log.info("saved ELM (L=%d, %s) to %s", model.hidden_nodes, model.activation, path)
    return path


def load_model(path: str | Path) -> ElmModel:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except FileNotFoundError:
        raise ModelFormatError(f"model file not found: {path}") from None
    return model_from_bytes(raw, source=str(path))
