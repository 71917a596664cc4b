"""Brute-force KNN baseline."""

import numpy as np
import pytest

from siren_elm.errors import ConfigError, DimensionError
from siren_elm.knn import knn_fit, knn_predict, knn_predict_batch, neighbor_indices


def brute_force_predict(X, y, k, q):
    d = [(float(np.sum((q - X[i]) ** 2)), i) for i in range(X.shape[0])]
    nearest = [i for _, i in sorted(d)[:k]]
    votes = np.bincount(y[nearest], minlength=2)
    return int(np.argmax(votes)), sorted(nearest)


class TestKnn:
    @pytest.mark.parametrize("seed", range(3))
    @pytest.mark.parametrize("k", [1, 3, 5])
    def test_matches_brute_force(self, seed, k):
        rng = np.random.default_rng(seed)
        X = rng.standard_normal((40, 5))
        y = rng.integers(0, 2, 40)
        Q = rng.standard_normal((25, 5))
        model = knn_fit(X, y, k)
        preds = knn_predict_batch(model, Q)
        idx = neighbor_indices(model, Q)
        for q, p, nn in zip(Q, preds, idx):
            label, nearest = brute_force_predict(X, y, k, q)
            assert p == label
            assert sorted(nn.tolist()) == nearest

    def test_k1_returns_nearest_label(self):
        model = knn_fit(np.array([[0.0], [10.0]]), np.array([1, 0]), k=1)
        assert knn_predict(model, np.array([2.0])) == 1
        assert knn_predict(model, np.array([8.0])) == 0

    def test_distance_tie_goes_to_lower_index(self):
        model = knn_fit(np.array([[0.0], [2.0]]), np.array([1, 0]), k=1)
        assert knn_predict(model, np.array([1.0])) == 1
        model = knn_fit(np.array([[0.0], [2.0]]), np.array([0, 1]), k=1)
        assert knn_predict(model, np.array([1.0])) == 0

    def test_vote_tie_goes_to_lower_class(self):
        model = knn_fit(np.array([[0.0], [1.0]]), np.array([1, 0]), k=2)
        assert knn_predict(model, np.array([0.4])) == 0

    def test_batch_equals_single(self):
        rng = np.random.default_rng(3)
        model = knn_fit(rng.standard_normal((30, 4)), rng.integers(0, 2, 30), k=5)
        Q = rng.standard_normal((10, 4))
        assert knn_predict_batch(model, Q).tolist() == [knn_predict(model, q) for q in Q]

    def test_deterministic(self):
        rng = np.random.default_rng(4)
        X, y, Q = rng.standard_normal((30, 4)), rng.integers(0, 2, 30), rng.standard_normal((10, 4))
        np.testing.assert_array_equal(
            knn_predict_batch(knn_fit(X, y), Q), knn_predict_batch(knn_fit(X, y), Q)
        )

    @pytest.mark.parametrize("k", [1, 4, 5])
    def test_training_row_order_does_not_matter(self, k):
        rng = np.random.default_rng(11)
        X, y, Q = rng.standard_normal((60, 6)), rng.integers(0, 2, 60), rng.standard_normal((20, 6))
        perm = rng.permutation(60)
        np.testing.assert_array_equal(
            knn_predict_batch(knn_fit(X, y, k), Q), knn_predict_batch(knn_fit(X[perm], y[perm], k), Q)
        )

    def test_k1_reproduces_training_labels(self):
        rng = np.random.default_rng(12)
        X, y = rng.standard_normal((50, 28)), rng.integers(0, 2, 50)
        preds = knn_predict_batch(knn_fit(X, y, k=1), X)
        assert np.mean(preds == y) == 1.0

    def test_k_out_of_range(self):
        with pytest.raises(ConfigError):
            knn_fit(np.zeros((3, 2)), np.array([0, 1, 0]), k=4)
        with pytest.raises(ConfigError):
            knn_fit(np.zeros((3, 2)), np.array([0, 1, 0]), k=0)

    def test_dimension_mismatch(self):
        model = knn_fit(np.zeros((3, 2)), np.array([0, 1, 0]), k=1)
        with pytest.raises(DimensionError):
            knn_predict(model, np.zeros(3))
