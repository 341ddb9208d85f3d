"""Labeled feature-vector collections and their on-disk CSV format.

A dataset is an ordered list of (vector, label set) records.  Records may
carry several labels; two records are considered similar when their label
sets intersect.  Record order is stable, and the record index is the
canonical tie-breaker wherever a nearest/farthest query can tie.

CSV format, one record per line::

    label1;label2;...,v1,v2,...,vN

i.e. the semicolon-separated label set first, then the N numeric
components.  Labels are opaque strings and may not contain ',' or ';'.
"""

import numpy as np

from .validation import as_float_matrix, as_label_sets


def common_label(a, b) -> bool:
    """True iff the two label sets share at least one label."""
    return not frozenset(a).isdisjoint(frozenset(b))


class LabeledDataset:
    """Immutable collection of feature vectors paired with label sets.

    Construction validates the invariants every other module relies on:
    a single shared dimension, finite components, a non-empty label set per
    record, and no zero-norm vectors (cosines against hyperplane normals
    must always be defined).
    """

    def __init__(self, vectors, labels):
        vectors = as_float_matrix(vectors, "vectors")
        self.labels = as_label_sets(labels, vectors.shape[0])
        norms = np.linalg.norm(vectors, axis=1)
        zero = np.flatnonzero(norms == 0.0)
        if zero.size:
            raise ValueError(f"record {zero[0]} has zero norm")
        vectors = np.ascontiguousarray(vectors)
        vectors.setflags(write=False)
        self.vectors = vectors

    def __len__(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def subset(self, indices) -> "LabeledDataset":
        """New dataset holding the given records, in the given order."""
        indices = np.asarray(indices, dtype=np.intp)
        return LabeledDataset(self.vectors[indices], [self.labels[i] for i in indices])


def load_dataset_csv(path) -> LabeledDataset:
    """Read a dataset from the CSV format described in the module docstring."""
    rows = []
    labels = []
    dim = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if len(fields) < 2:
                raise ValueError(f"{path}:{lineno}: expected 'labels,v1,...,vN'")
            names = [s.strip() for s in fields[0].split(";")]
            if any(not s for s in names):
                raise ValueError(f"{path}:{lineno}: empty label")
            try:
                vec = [float(s) for s in fields[1:]]
            except ValueError:
                raise ValueError(f"{path}:{lineno}: malformed numeric field") from None
            if dim is None:
                dim = len(vec)
            elif len(vec) != dim:
                raise ValueError(f"{path}:{lineno}: expected {dim} components, got {len(vec)}")
            rows.append(vec)
            labels.append(frozenset(names))
    if not rows:
        raise ValueError(f"{path}: no records")
    return LabeledDataset(np.asarray(rows, dtype=np.float64), labels)


def save_dataset_csv(path, dataset: LabeledDataset) -> None:
    """Write a dataset in the CSV format, labels stringified and sorted."""
    with open(path, "w", encoding="utf-8") as fh:
        for vec, labels in zip(dataset.vectors, dataset.labels):
            names = sorted(str(l) for l in labels)
            for name in names:
                if "," in name or ";" in name:
                    raise ValueError(f"label {name!r} contains a reserved character")
            fh.write(";".join(names))
            fh.write(",")
            fh.write(",".join(repr(float(v)) for v in vec))
            fh.write("\n")
