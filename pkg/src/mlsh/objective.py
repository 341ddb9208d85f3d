"""Scores for one hyperplane normal against a set of sampled pairs.

For a pair, let c1 and c2 be the cosines of its two endpoints against the
normal.  The four score variants:

* count        - number of positive pairs with c1*c2 > 0 plus number of
                 negative pairs with c1*c2 < 0
* ratio        - the same two counts, each divided by its pair-set size
* cosine       - sum of |c1 + c2| over positives plus |c1 - c2| over negatives
* cosine_ratio - the cosine sums, each divided by its pair-set size

Scores are consumed in the log domain: log U = x / temperature.  The count
variant over tens of thousands of pairs would overflow exp(x) long before a
walk finishes, so U itself is never materialized; acceptance tests work on
log-U differences only.

Endpoints exactly on a hyperplane (cosine 0) sit on neither side and count
toward nothing; the strict inequalities make that explicit.
"""

from dataclasses import dataclass

import numpy as np

from .data import LabeledDataset
from .pairs import PairSet
from .validation import as_float_vector

OBJECTIVE_KINDS = ("count", "ratio", "cosine", "cosine_ratio")


@dataclass(frozen=True)
class ObjectiveConfig:
    kind: str = "count"
    temperature: float = 1.0

    def __post_init__(self):
        if self.kind not in OBJECTIVE_KINDS:
            raise ValueError(f"unknown objective kind {self.kind!r}")
        if not self.temperature > 0.0:
            raise ValueError("temperature must be positive")


@dataclass(frozen=True)
class ObjectiveValue:
    x: float
    log_u: float


@dataclass(frozen=True)
class PairTerms:
    """Pair endpoints gathered into one unit-row matrix, ready for scoring.

    ``endpoints`` stacks all first endpoints (positives then negatives) on
    top of all second endpoints, so one matrix product against a block of
    normals yields every cosine at once.  Rows are pre-normalized so a plain
    dot product with a unit normal is the endpoint's cosine.  A zero-norm
    endpoint (possible only for vectors that preprocessing collapsed exactly
    to the origin) keeps a zero row: it lies on every hyperplane and counts
    toward nothing.
    """

    endpoints: np.ndarray  # (2 * (n_positive + n_negative), dim)
    n_positive: int
    n_negative: int

    @property
    def first(self) -> np.ndarray:
        return self.endpoints[: self.n_positive + self.n_negative]

    @property
    def second(self) -> np.ndarray:
        return self.endpoints[self.n_positive + self.n_negative :]


def _safe_unit_rows(rows: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(rows, axis=1)
    return rows / np.where(norms == 0.0, 1.0, norms)[:, None]


def build_pair_terms(dataset: LabeledDataset, pair_set: PairSet) -> PairTerms:
    """Gather pair endpoints out of the dataset for repeated evaluation."""
    idx = np.concatenate([pair_set.positives, pair_set.negatives], axis=0).reshape(-1, 2)
    stacked = dataset.vectors[np.concatenate([idx[:, 0], idx[:, 1]])]
    return PairTerms(
        endpoints=np.ascontiguousarray(_safe_unit_rows(stacked)),
        n_positive=len(pair_set.positives),
        n_negative=len(pair_set.negatives),
    )


def evaluate_terms(normals: np.ndarray, terms: PairTerms, config: ObjectiveConfig):
    """Score a (B, dim) block of unit normals at once.

    Returns ``(x, log_u)``, each of shape (B,).  Ratio variants require both
    pair sets to be non-empty.
    """
    p = terms.n_positive
    m = terms.n_negative
    t = p + m
    if config.kind in ("ratio", "cosine_ratio") and (p == 0 or m == 0):
        raise ValueError("undefined ratio: ratio objectives need at least one positive and one negative pair")
    cos = terms.endpoints @ np.ascontiguousarray(normals.T)  # (2t, B)
    c1 = cos[:t]
    c2 = cos[t:]
    if config.kind in ("count", "ratio"):
        prod = c1 * c2
        pos = np.count_nonzero(prod[:p] > 0.0, axis=0).astype(np.float64)
        neg = np.count_nonzero(prod[p:] < 0.0, axis=0).astype(np.float64)
        x = pos + neg if config.kind == "count" else pos / p + neg / m
    else:
        pos = np.abs(c1[:p] + c2[:p]).sum(axis=0)
        neg = np.abs(c1[p:] - c2[p:]).sum(axis=0)
        if config.kind == "cosine":
            x = pos + neg
        else:
            x = pos / p + neg / m
    return x, x / config.temperature


def evaluate(normal, pair_set: PairSet, config: ObjectiveConfig, dataset: LabeledDataset) -> ObjectiveValue:
    """Score a single unit normal against a pair set."""
    normal = as_float_vector(normal, "normal")
    terms = build_pair_terms(dataset, pair_set)
    x, log_u = evaluate_terms(normal[None, :], terms, config)
    return ObjectiveValue(x=float(x[0]), log_u=float(log_u[0]))


def classify_pair(normal, x1, x2) -> int:
    """Side classification of a pair against a hyperplane.

    Returns +1 when both endpoints are strictly on the same side, -1 when
    strictly on opposite sides, and 0 when either endpoint lies exactly on
    the hyperplane.
    """
    normal = as_float_vector(normal, "normal")
    d1 = float(normal @ as_float_vector(x1, "x1"))
    d2 = float(normal @ as_float_vector(x2, "x2"))
    prod = d1 * d2
    if prod > 0.0:
        return 1
    if prod < 0.0:
        return -1
    return 0
