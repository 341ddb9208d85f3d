import numpy as np
import pytest

from mlsh.synth import gaussian_clusters, gaussian_sign_dataset


class TestGaussianSignDataset:
    def test_size_and_dimension(self):
        ds = gaussian_sign_dataset(300, 1)
        assert len(ds) == 300
        assert ds.dim == 3

    def test_labels_match_sign_of_first_component(self):
        ds = gaussian_sign_dataset(500, 2)
        for vec, labels in zip(ds.vectors, ds.labels):
            expected = "pos" if vec[0] > 0 else "neg"
            assert labels == frozenset([expected])

    def test_component_means_within_clt_bound(self):
        n = 4000
        ds = gaussian_sign_dataset(n, 3)
        assert np.all(np.abs(ds.vectors.mean(axis=0)) < 4.0 / np.sqrt(n))

    def test_deterministic(self):
        a = gaussian_sign_dataset(50, 9)
        b = gaussian_sign_dataset(50, 9)
        np.testing.assert_array_equal(a.vectors, b.vectors)
        assert a.labels == b.labels

    def test_minimum_size(self):
        with pytest.raises(ValueError, match=">= 2"):
            gaussian_sign_dataset(1, 0)


class TestGaussianClusters:
    def test_geometry_and_labels(self):
        ds = gaussian_clusters([[-5.0, 0.0], [5.0, 0.0]], 0.2, 20, ["a", "b"], 4)
        assert len(ds) == 40
        assert all(l == frozenset(["a"]) for l in ds.labels[:20])
        assert all(l == frozenset(["b"]) for l in ds.labels[20:])
        assert np.all(ds.vectors[:20, 0] < 0)
        assert np.all(ds.vectors[20:, 0] > 0)

    def test_overlapping_label_sets_allowed(self):
        ds = gaussian_clusters(
            [[0.0, 5.0], [0.0, -5.0], [5.0, 0.0]], 0.1, 5,
            [{"a", "b"}, {"b", "c"}, {"c"}], 5,
        )
        assert ds.labels[0] == frozenset(["a", "b"])
        assert ds.labels[5] == frozenset(["b", "c"])

    def test_per_cluster_counts(self):
        ds = gaussian_clusters([[1.0, 1.0], [9.0, 9.0]], 0.5, [3, 7], ["a", "b"], 6)
        assert len(ds) == 10
        assert sum(1 for l in ds.labels if l == frozenset(["a"])) == 3

    def test_deterministic(self):
        a = gaussian_clusters([[1.0, 2.0]], 0.3, 10, ["a"], 11)
        b = gaussian_clusters([[1.0, 2.0]], 0.3, 10, ["a"], 11)
        np.testing.assert_array_equal(a.vectors, b.vectors)

    def test_validation(self):
        with pytest.raises(ValueError, match="spread"):
            gaussian_clusters([[1.0, 1.0]], 0.0, 5, ["a"], 0)
        with pytest.raises(ValueError, match="label set per cluster"):
            gaussian_clusters([[1.0, 1.0]], 0.5, 5, ["a", "b"], 0)
        with pytest.raises(ValueError, match="count per cluster"):
            gaussian_clusters([[1.0, 1.0], [2.0, 2.0]], 0.5, [5], ["a", "b"], 0)
