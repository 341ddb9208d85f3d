"""Sampling strategies for positive and negative training pairs.

A positive pair shares at least one label, a negative pair shares none.
Positive anchors draw a partner from the records sharing a label with the
anchor; negative anchors draw from the records sharing none.  Strategies:

* randomhit    - partner chosen uniformly among same-label records
* nearhit      - nearest same-label record
* farhit       - farthest same-label record
* randommiss   - partner chosen uniformly among disjoint-label records
* nearmiss     - nearest disjoint-label record
* boundarymiss - nearmiss partner b, then the anchor is replaced by the
                 record nearest to b that shares a label with the original
                 anchor and none with b, so the pair straddles the boundary

Distances are L2 in whatever space the dataset lives in (typically the
preprocessed space).  Nearest/farthest queries are exact linear scans and
break ties toward the lowest record index; the anchor itself is never a
candidate partner.
"""

from dataclasses import dataclass

import numpy as np

from .data import LabeledDataset

POSITIVE_METHODS = ("randomhit", "nearhit", "farhit")
NEGATIVE_METHODS = ("randommiss", "nearmiss", "boundarymiss")

# Named preset combinations exposed on the command line.
SAMPLING_PRESETS = (
    "randomhit-randommiss",
    "randomhit-nearmiss",
    "nearhit-nearmiss",
    "farhit-nearmiss",
    "randomhit-boundarymiss",
)

# Bounded anchor redraws before giving up on a degenerate dataset.
MAX_REDRAWS = 100


@dataclass(frozen=True)
class SamplingConfig:
    positive_method: str = "randomhit"
    negative_method: str = "nearmiss"
    n_positive: int = 1000
    n_negative: int = 1000

    def __post_init__(self):
        if self.positive_method not in POSITIVE_METHODS:
            raise ValueError(f"unknown positive method {self.positive_method!r}")
        if self.negative_method not in NEGATIVE_METHODS:
            raise ValueError(f"unknown negative method {self.negative_method!r}")
        if self.n_positive < 0 or self.n_negative < 0:
            raise ValueError("pair counts must be >= 0")


def sampling_config_from_preset(preset: str, pairs_total: int) -> SamplingConfig:
    """Build a config from a "<positive>-<negative>" name and a total pair
    count split evenly between positives and negatives."""
    parts = preset.split("-")
    if len(parts) != 2:
        raise ValueError(f"malformed sampling preset {preset!r}")
    if pairs_total < 0 or pairs_total % 2 != 0:
        raise ValueError("total pair count must be even (equal positives and negatives)")
    half = pairs_total // 2
    return SamplingConfig(parts[0], parts[1], half, half)


@dataclass(frozen=True)
class PairSet:
    """Sampled index pairs: positives share a label, negatives share none."""

    positives: np.ndarray  # (n_positive, 2) int64
    negatives: np.ndarray  # (n_negative, 2) int64


class PairSampler:
    """Samples pairs from one dataset, caching per-label-set index arrays.

    The cache keys are the records' label sets, so datasets with few
    distinct label combinations (the common case) pay the linear set-up
    cost once per combination, not once per draw.
    """

    def __init__(self, dataset: LabeledDataset):
        self.dataset = dataset
        by_label = {}
        for i, labels in enumerate(dataset.labels):
            for label in labels:
                by_label.setdefault(label, []).append(i)
        self._by_label = {l: np.asarray(ix, dtype=np.int64) for l, ix in by_label.items()}
        self._same_cache = {}
        self._diff_cache = {}

    def same_label_indices(self, record: int) -> np.ndarray:
        """Sorted indices of records sharing a label with ``record``
        (includes the record itself)."""
        key = self.dataset.labels[record]
        cached = self._same_cache.get(key)
        if cached is None:
            parts = [self._by_label[l] for l in key]
            cached = np.unique(np.concatenate(parts))
            self._same_cache[key] = cached
        return cached

    def disjoint_label_indices(self, record: int) -> np.ndarray:
        """Sorted indices of records sharing no label with ``record``."""
        key = self.dataset.labels[record]
        cached = self._diff_cache.get(key)
        if cached is None:
            mask = np.ones(len(self.dataset), dtype=bool)
            mask[self.same_label_indices(record)] = False
            cached = np.flatnonzero(mask).astype(np.int64)
            self._diff_cache[key] = cached
        return cached

    def _sq_dists(self, anchor: int, candidates: np.ndarray) -> np.ndarray:
        diff = self.dataset.vectors[candidates] - self.dataset.vectors[anchor]
        return np.einsum("ij,ij->i", diff, diff)

    def positive_pair_from(self, anchor: int, method: str, rng):
        """Positive pair anchored at ``anchor``, or None if it has no
        same-label partner."""
        partners = self.same_label_indices(anchor)
        partners = partners[partners != anchor]
        if partners.size == 0:
            return None
        if method == "randomhit":
            b = partners[rng.integers(partners.size)]
        elif method == "nearhit":
            b = partners[np.argmin(self._sq_dists(anchor, partners))]
        elif method == "farhit":
            b = partners[np.argmax(self._sq_dists(anchor, partners))]
        else:
            raise ValueError(f"unknown positive method {method!r}")
        return int(anchor), int(b)

    def negative_pair_from(self, anchor: int, method: str, rng):
        """Negative pair anchored at ``anchor``, or None if every record
        shares a label with it."""
        others = self.disjoint_label_indices(anchor)
        if others.size == 0:
            return None
        if method == "randommiss":
            return int(anchor), int(others[rng.integers(others.size)])
        b = int(others[np.argmin(self._sq_dists(anchor, others))])
        if method == "nearmiss":
            return int(anchor), b
        if method == "boundarymiss":
            # Records sharing a label with the anchor but none with b; the
            # anchor itself always qualifies, so this is never empty, but the
            # guard keeps the fallback explicit.
            candidates = np.intersect1d(
                self.same_label_indices(anchor), self.disjoint_label_indices(b)
            )
            if candidates.size == 0:
                return int(anchor), b
            a2 = candidates[np.argmin(self._sq_dists(b, candidates))]
            return int(a2), b
        raise ValueError(f"unknown negative method {method!r}")

    def sample_positive(self, method: str, rng):
        """Draw one positive pair, redrawing the anchor a bounded number of
        times before failing."""
        n = len(self.dataset)
        for _ in range(MAX_REDRAWS):
            pair = self.positive_pair_from(int(rng.integers(n)), method, rng)
            if pair is not None:
                return pair
        raise ValueError("no positive pair exists")

    def sample_negative(self, method: str, rng):
        n = len(self.dataset)
        for _ in range(MAX_REDRAWS):
            pair = self.negative_pair_from(int(rng.integers(n)), method, rng)
            if pair is not None:
                return pair
        raise ValueError("no negative pair exists")

    def sample_pair_set(self, config: SamplingConfig, rng) -> PairSet:
        """Draw the configured numbers of pairs, with replacement, positives
        first."""
        rng = np.random.default_rng(rng)
        pos = [self.sample_positive(config.positive_method, rng) for _ in range(config.n_positive)]
        neg = [self.sample_negative(config.negative_method, rng) for _ in range(config.n_negative)]
        return PairSet(
            positives=np.asarray(pos, dtype=np.int64).reshape(len(pos), 2),
            negatives=np.asarray(neg, dtype=np.int64).reshape(len(neg), 2),
        )


def sample_positive(dataset: LabeledDataset, method: str, rng):
    """One-shot positive draw; builds a throwaway sampler."""
    return PairSampler(dataset).sample_positive(method, np.random.default_rng(rng))


def sample_negative(dataset: LabeledDataset, method: str, rng):
    """One-shot negative draw; builds a throwaway sampler."""
    return PairSampler(dataset).sample_negative(method, np.random.default_rng(rng))


def sample_pair_set(dataset: LabeledDataset, config: SamplingConfig, rng) -> PairSet:
    """Sample a full pair set; ``rng`` may be a seed or a Generator."""
    return PairSampler(dataset).sample_pair_set(config, rng)
