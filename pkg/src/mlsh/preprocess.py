"""Noise reduction: per-component standardization, then PCA projection."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .validation import as_float_matrix


class StandardizePCA(BaseEstimator, TransformerMixin):
    """Standardize each component to mean 0 / stddev 1, then project onto the
    leading principal components of the standardized training data.

    The projection keeps the smallest number of components whose cumulative
    share of total variance reaches ``contribution_threshold``.  Constant
    components get stddev 1 so standardization is a no-op on them; PCA then
    discards them naturally (they carry no variance).

    Parameters
    ----------
    contribution_threshold : float in (0, 1], default 0.8
        Target cumulative variance fraction.

    Attributes
    ----------
    mean_, scale_ : (n_features,) arrays fitted on the training data.
    components_ : (n_components_, n_features) orthonormal projection rows,
        sign-fixed so each row's largest-magnitude entry is positive.
    explained_variance_ : all eigenvalues, descending.
    """

    def __init__(self, contribution_threshold=0.8):
        self.contribution_threshold = contribution_threshold

    def fit(self, X, y=None):
        X = as_float_matrix(X)
        n, d = X.shape
        if n < 2:
            raise ValueError("fit requires at least 2 records")
        threshold = float(self.contribution_threshold)
        if not 0.0 < threshold <= 1.0:
            raise ValueError("contribution_threshold must be in (0, 1]")

        self.mean_ = X.mean(axis=0)
        std = X.std(axis=0, ddof=1)
        self.scale_ = np.where(std == 0.0, 1.0, std)
        Z = (X - self.mean_) / self.scale_

        cov = Z.T @ Z / (n - 1)
        asym = np.abs(cov - cov.T).max()
        if asym > 1e-8 * max(1.0, np.abs(cov).max()):
            raise ValueError("covariance is not symmetric within tolerance")
        cov = (cov + cov.T) / 2.0

        eigvals, eigvecs = np.linalg.eigh(cov)
        order = np.argsort(-eigvals, kind="stable")
        eigvals = eigvals[order]
        eigvecs = eigvecs[:, order]

        total = eigvals.sum()
        if total <= 0.0:
            raise ValueError("training data has no variance")
        fractions = np.cumsum(eigvals) / total
        crossed = np.flatnonzero(fractions >= threshold - 1e-12)
        k = int(crossed[0]) + 1 if crossed.size else d

        components = eigvecs[:, :k].T.copy()
        for row in components:
            if row[np.argmax(np.abs(row))] < 0:
                row *= -1.0

        self.components_ = components
        self.explained_variance_ = eigvals
        self.explained_variance_ratio_ = eigvals / total
        self.n_components_ = k
        self.n_features_in_ = d
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "components_"):
            raise NotFittedError("fit must be called before transform")
        X = as_float_matrix(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return (X - self.mean_) / self.scale_ @ self.components_.T

    def transform_vector(self, x) -> np.ndarray:
        """Transform a single vector; same statistics as :meth:`transform`."""
        return self.transform(np.asarray(x, dtype=np.float64)[None, :])[0]


def identity_preprocess(dim: int) -> StandardizePCA:
    """A fitted no-op model (zero mean, unit scale, identity projection).

    Used when training runs in the raw input space but the model file format
    still carries a preprocessing stage.
    """
    model = StandardizePCA(contribution_threshold=1.0)
    model.mean_ = np.zeros(dim)
    model.scale_ = np.ones(dim)
    model.components_ = np.eye(dim)
    model.explained_variance_ = np.ones(dim)
    model.explained_variance_ratio_ = np.full(dim, 1.0 / dim)
    model.n_components_ = dim
    model.n_features_in_ = dim
    return model
