"""Input validation helpers shared by estimators, samplers, and loaders."""

import numpy as np


def as_float_matrix(X, name: str = "X") -> np.ndarray:
    """Coerce to a 2-D float64 array, rejecting NaN/Inf entries."""
    A = np.asarray(X, dtype=np.float64)
    if A.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {A.shape}")
    if A.shape[0] == 0 or A.shape[1] == 0:
        raise ValueError(f"{name} must be non-empty, got shape {A.shape}")
    if not np.isfinite(A).all():
        raise ValueError(f"{name} contains non-finite values")
    return A


def as_float_vector(x, name: str = "x") -> np.ndarray:
    """Coerce to a 1-D float64 array, rejecting NaN/Inf entries."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got shape {v.shape}")
    if not np.isfinite(v).all():
        raise ValueError(f"{name} contains non-finite values")
    return v


def as_label_sets(y, n_records: int) -> tuple:
    """Normalize per-record labels to a tuple of non-empty frozensets.

    Each element of ``y`` may be a single label (string or number) or an
    iterable of labels.  Strings count as single labels, never as iterables
    of characters.
    """
    if isinstance(y, (str, bytes)) or not hasattr(y, "__len__"):
        raise ValueError("labels must be a sequence with one entry per record")
    if len(y) != n_records:
        raise ValueError(f"expected {n_records} label entries, got {len(y)}")
    out = []
    for i, entry in enumerate(y):
        if isinstance(entry, (str, bytes, int, np.integer)):
            labels = frozenset([entry])
        elif isinstance(entry, (set, frozenset, list, tuple, np.ndarray)):
            labels = frozenset(entry)
        else:
            labels = frozenset([entry])
        if not labels:
            raise ValueError(f"record {i} has an empty label set")
        out.append(labels)
    return tuple(out)
