"""Synthetic labeled datasets for experiments and tests."""

import numpy as np

from .data import LabeledDataset
from .rng import check_seed


def gaussian_sign_dataset(n: int, seed) -> LabeledDataset:
    """Draws from the 3-D standard normal, labeled by the first component's
    sign: "pos" when strictly positive, "neg" otherwise.

    The planted structure makes (+-1, 0, 0) the ideal hyperplane normal.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    rng = np.random.default_rng(check_seed(seed))
    X = rng.standard_normal((n, 3))
    labels = ["pos" if v > 0.0 else "neg" for v in X[:, 0]]
    return LabeledDataset(X, labels)


def gaussian_clusters(centers, spread: float, per_cluster, labels, seed) -> LabeledDataset:
    """Isotropic Gaussian blobs at the given centers.

    ``labels[i]`` is the label (or label set) applied to every record of
    cluster i; overlapping label sets across clusters are allowed, which is
    how multi-label boundary geometries are built.  ``per_cluster`` may be a
    single count or one count per cluster.  Records are generated cluster by
    cluster, in order.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=np.float64))
    if not spread > 0.0:
        raise ValueError("spread must be positive")
    n_clusters = centers.shape[0]
    if len(labels) != n_clusters:
        raise ValueError("one label set per cluster is required")
    if np.isscalar(per_cluster):
        counts = [int(per_cluster)] * n_clusters
    else:
        counts = [int(c) for c in per_cluster]
        if len(counts) != n_clusters:
            raise ValueError("one count per cluster is required")
    if any(c < 1 for c in counts):
        raise ValueError("cluster counts must be >= 1")

    rng = np.random.default_rng(check_seed(seed))
    blocks = []
    record_labels = []
    for center, count, label in zip(centers, counts, labels):
        blocks.append(center + spread * rng.standard_normal((count, centers.shape[1])))
        record_labels.extend([label] * count)
    return LabeledDataset(np.concatenate(blocks, axis=0), record_labels)
