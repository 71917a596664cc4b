"""
Brute-force k-nearest-neighbours baseline (Euclidean, linear scan).

Distance ties go to the lower training-row index; vote ties to the lower class.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError

DEFAULT_K = 5


@dataclass(frozen=True, eq=False)
class KnnModel:
    X: np.ndarray
    y: np.ndarray
    k: int = DEFAULT_K
    n_classes: int = 2

    def __len__(self) -> int:
        return self.X.shape[0]


def knn_fit(X: np.ndarray, y: np.ndarray, k: int = DEFAULT_K, n_classes: int = 2) -> KnnModel:
    X = np.array(X, dtype=np.float64)
    y = np.array(y, dtype=np.int64)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise DimensionError(f"X {X.shape} and y {y.shape} disagree")
    if k < 1 or k > X.shape[0]:
        raise ConfigError(f"k must be in 1..{X.shape[0]} (training rows), got {k}")
    return KnnModel(X=X, y=y, k=k, n_classes=max(n_classes, int(y.max()) + 1))


def neighbor_indices(model: KnnModel, Q: np.ndarray) -> np.ndarray:
    Q = np.atleast_2d(np.asarray(Q, dtype=np.float64))
    if Q.shape[1] != model.X.shape[1]:
        raise DimensionError(f"model expects {model.X.shape[1]} features, got {Q.shape[1]}")
    d = ((Q[:, None, :] - model.X[None, :, :]) ** 2).sum(axis=-1)
    return np.argsort(d, axis=1, kind="stable")[:, : model.k]


def knn_predict_batch(model: KnnModel, Q: np.ndarray) -> np.ndarray:
    votes = model.y[neighbor_indices(model, Q)]
    counts = (votes[:, :, None] == np.arange(model.n_classes)).sum(axis=1)
    return np.argmax(counts, axis=1)


def knn_predict(model: KnnModel, x: np.ndarray) -> int:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionError(f"expected one feature vector, got shape {x.shape}")
    return int(knn_predict_batch(model, x[None, :])[0])
