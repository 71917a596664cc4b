"""
SMOTE oversampling of the minority class in (normalized) feature space.

Synthetic row i uses base row ``i mod n_minority`` (round robin), one of its
k nearest minority neighbours chosen by the seeded generator, and a gap
u in [0, 1):  s = x + u * (x_nn - x).  The generator draws all neighbour
choices first, then all gaps, so the trace is fixed by the seed alone.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateDataError, InsufficientDataError

log = logging.getLogger(__name__)

DEFAULT_K_NEIGHBORS = 5


@dataclass(frozen=True)
class SmoteConfig:
    target_count: int
    k_neighbors: int = DEFAULT_K_NEIGHBORS
    seed: int = 0

    def __post_init__(self) -> None:
        if self.k_neighbors < 1:
            raise ConfigError(f"k_neighbors must be >= 1, got {self.k_neighbors}")


@dataclass(frozen=True)
class SmotePlan:
    """Which rows each synthetic sample interpolates between, and how far."""

    base: np.ndarray
    neighbor: np.ndarray
    gap: np.ndarray

    def __len__(self) -> int:
        return self.base.shape[0]


def nearest_neighbors(X: np.ndarray, k: int) -> np.ndarray:
    """(n, k) indices of each row's k nearest other rows; ties go to the lower index."""
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if k >= n:
        raise InsufficientDataError(f"need more than {k} rows for {k} neighbours, got {n}")
    d = ((X[:, None, :] - X[None, :, :]) ** 2).sum(axis=-1)
    np.fill_diagonal(d, np.inf)
    return np.argsort(d, axis=1, kind="stable")[:, :k]


def smote_plan(neighbors: np.ndarray, n_synthetic: int, seed: int) -> SmotePlan:
    n_minority, k = neighbors.shape
    rng = np.random.default_rng(seed)
    base = np.arange(n_synthetic) % n_minority
    choice = rng.integers(0, k, size=n_synthetic)
    gap = rng.random(n_synthetic)
    return SmotePlan(base=base, neighbor=neighbors[base, choice], gap=gap)


def apply_plan(minority: np.ndarray, plan: SmotePlan) -> np.ndarray:
    x = minority[plan.base]
    return x + plan.gap[:, None] * (minority[plan.neighbor] - x)


def smote(minority: np.ndarray, cfg: SmoteConfig) -> np.ndarray:
    """Return ``target_count - len(minority)`` synthetic minority rows."""
    minority = np.asarray(minority, dtype=np.float64)
    n = minority.shape[0]
    if n < cfg.k_neighbors + 1:
        raise InsufficientDataError(
            f"SMOTE with k={cfg.k_neighbors} needs at least {cfg.k_neighbors + 1} minority rows, got {n}"
        )
    if cfg.target_count < n:
        raise ConfigError(f"target_count {cfg.target_count} is below the minority count {n}")
    n_synthetic = cfg.target_count - n
    if n_synthetic == 0:
        return np.zeros((0, minority.shape[1]))
    plan = smote_plan(nearest_neighbors(minority, cfg.k_neighbors), n_synthetic, cfg.seed)
    return apply_plan(minority, plan)


def balance_training_set(
    train_X: np.ndarray,
    train_y: np.ndarray,
    seed: int = 0,
    *,
    k_neighbors: int = DEFAULT_K_NEIGHBORS,
) -> tuple[np.ndarray, np.ndarray]:
    """Oversample the minority class up to the majority count.

    Original rows come first, in input order; synthetic rows are appended.
    """
    X = np.asarray(train_X, dtype=np.float64)
    y = np.asarray(train_y)
    classes, counts = np.unique(y, return_counts=True)
    if classes.shape[0] != 2:
        raise DegenerateDataError(f"balancing needs exactly two classes, found {classes.tolist()}")
    if counts[0] == counts[1]:
        return X.copy(), y.copy()

    minority_class = classes[np.argmin(counts)]
    majority_count = int(counts.max())
    synthetic = smote(X[y == minority_class], SmoteConfig(majority_count, k_neighbors, seed))
    out_X = np.vstack([X, synthetic])
    out_y = np.concatenate([y, np.full(synthetic.shape[0], minority_class, dtype=y.dtype)])
    log.debug(
        "SMOTE: class %s %d -> %d (+%d synthetic), class %s %d",
        minority_class, int(counts.min()), majority_count, synthetic.shape[0],
        classes[np.argmax(counts)], majority_count,
    )
    return out_X, out_y
