"""Linear-scan retrieval in Hamming or L2 space and its quality metrics.

Retrieval is a full scan: distances to every searched record, sorted
ascending with ties broken by ascending record index.  Quality is measured
per query by precision and recall over common-label relevance, then
macro-averaged across queries.  The acquisition rate is the fraction of the
searched collection returned per query; a recall-precision curve sweeps it.
"""

from dataclasses import dataclass
import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .data import LabeledDataset, common_label
from .hashing import encode_all, hamming_to_all, words_per_code
from .validation import as_float_vector


@dataclass(frozen=True)
class CodeTable:
    """Packed codes aligned with a searched dataset's record indices."""

    codes: np.ndarray  # (n, words) uint64
    n_bits: int

    def __post_init__(self):
        codes = np.ascontiguousarray(self.codes, dtype=np.uint64)
        if codes.ndim != 2:
            raise ValueError("codes must be a 2-D packed array")
        if codes.shape[1] != words_per_code(self.n_bits):
            raise ValueError("code width does not match n_bits")
        object.__setattr__(self, "codes", codes)

    def __len__(self) -> int:
        return self.codes.shape[0]

    @classmethod
    def from_vectors(cls, normals, X) -> "CodeTable":
        return cls(codes=encode_all(normals, X), n_bits=normals.shape[0])


@dataclass(frozen=True)
class EvalPoint:
    acquisition: float
    precision: float
    recall: float


@dataclass(frozen=True)
class CurveResult:
    """Macro-averaged metrics over the grid, plus query accounting.

    Queries whose relevant set is empty have undefined recall; they are
    excluded from the averages and counted in ``n_excluded``.
    """

    points: tuple
    n_queries: int
    n_excluded: int


def rank_by_hamming(table: CodeTable, query_code) -> np.ndarray:
    """All record indices ordered by Hamming distance, ties by index."""
    return np.argsort(hamming_to_all(table.codes, query_code), kind="stable")


def rank_by_l2(vectors, query) -> np.ndarray:
    """All record indices ordered by L2 distance, ties by index."""
    query = as_float_vector(query, "query")
    if vectors.shape[1] != query.shape[0]:
        raise ValueError("query dimension does not match searched vectors")
    diff = vectors - query
    return np.argsort(np.einsum("ij,ij->i", diff, diff), kind="stable")


def _check_k(k: int, n: int) -> None:
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")


def top_k_by_hamming(table: CodeTable, query_code, k: int) -> np.ndarray:
    _check_k(k, len(table))
    return rank_by_hamming(table, query_code)[:k]


def top_k_by_l2(data: LabeledDataset, query, k: int) -> np.ndarray:
    _check_k(k, len(data))
    return rank_by_l2(data.vectors, query)[:k]


def evaluate_query(retrieved, query_labels, searched: LabeledDataset):
    """Precision and recall of one retrieval result.

    Returns ``(precision, recall)``; recall is None when no searched record
    shares a label with the query (undefined denominator).
    """
    retrieved = np.asarray(retrieved, dtype=np.intp)
    if retrieved.size == 0:
        raise ValueError("retrieved index list is empty")
    if retrieved.min() < 0 or retrieved.max() >= len(searched):
        raise ValueError("retrieved index out of range")
    relevant = np.fromiter(
        (common_label(labels, query_labels) for labels in searched.labels),
        dtype=bool,
        count=len(searched),
    )
    hits = int(relevant[retrieved].sum())
    precision = hits / retrieved.size
    total = int(relevant.sum())
    recall = hits / total if total > 0 else None
    return precision, recall


def acquisition_to_k(rate: float, n_searched: int) -> int:
    """Result-list size for an acquisition rate: ceil(rate * n), at least 1."""
    if not 0.0 < rate <= 1.0:
        raise ValueError(f"acquisition rate must be in (0, 1], got {rate}")
    return min(n_searched, max(1, math.ceil(rate * n_searched)))


def recall_precision_curve(rankings, query_label_sets, searched: LabeledDataset,
                           acquisition_grid) -> CurveResult:
    """Sweep acquisition rates over full per-query rankings.

    ``rankings`` holds one full ranking (as from :func:`rank_by_hamming` or
    :func:`rank_by_l2`) per query, aligned with ``query_label_sets``.
    """
    grid = [float(r) for r in acquisition_grid]
    n = len(searched)
    ks = [acquisition_to_k(r, n) for r in grid]
    if len(rankings) != len(query_label_sets):
        raise ValueError("one ranking per query is required")
    if len(rankings) == 0:
        raise ValueError("query set is empty")

    precision_sum = np.zeros(len(grid))
    recall_sum = np.zeros(len(grid))
    n_used = 0
    n_excluded = 0
    for ranking, query_labels in zip(rankings, query_label_sets):
        relevant = np.fromiter(
            (common_label(labels, query_labels) for labels in searched.labels),
            dtype=bool,
            count=n,
        )
        total = int(relevant.sum())
        if total == 0:
            n_excluded += 1
            continue
        hits = np.cumsum(relevant[np.asarray(ranking, dtype=np.intp)])
        for j, k in enumerate(ks):
            precision_sum[j] += hits[k - 1] / k
            recall_sum[j] += hits[k - 1] / total
        n_used += 1
    if n_used == 0:
        raise ValueError("every query has an empty relevant set")

    points = tuple(
        EvalPoint(acquisition=r, precision=float(precision_sum[j] / n_used),
                  recall=float(recall_sum[j] / n_used))
        for j, r in enumerate(grid)
    )
    return CurveResult(points=points, n_queries=n_used, n_excluded=n_excluded)


def hamming_rankings(table: CodeTable, query_codes, n_threads=None) -> list:
    """Full Hamming rankings for a batch of query codes."""
    query_codes = np.ascontiguousarray(query_codes, dtype=np.uint64)
    return _map_queries(lambda code: rank_by_hamming(table, code), list(query_codes), n_threads)


def l2_rankings(vectors, queries, n_threads=None) -> list:
    """Full L2 rankings for a batch of query vectors."""
    return _map_queries(lambda q: rank_by_l2(vectors, q), list(np.asarray(queries, dtype=np.float64)), n_threads)


def _map_queries(fn, items, n_threads):
    if n_threads is None:
        n_threads = os.cpu_count() or 1
    n_threads = max(1, int(n_threads))
    if n_threads == 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class ScaledPoint:
    """Method metrics relative to a baseline at one acquisition rate.

    Ratios against a zero baseline value are undefined and reported as NaN,
    never as infinity.
    """

    acquisition: float
    precision_ratio: float
    recall_ratio: float


def scaled_metrics(method_points, baseline_points) -> list:
    """Elementwise method/baseline ratios over aligned acquisition grids."""
    if len(method_points) != len(baseline_points):
        raise ValueError("acquisition grids differ in length")
    out = []
    for mp, bp in zip(method_points, baseline_points):
        if mp.acquisition != bp.acquisition:
            raise ValueError("acquisition grids are not aligned")
        out.append(ScaledPoint(
            acquisition=mp.acquisition,
            precision_ratio=mp.precision / bp.precision if bp.precision != 0.0 else math.nan,
            recall_ratio=mp.recall / bp.recall if bp.recall != 0.0 else math.nan,
        ))
    return out


def default_acquisition_grid() -> list:
    """0.01..0.09 in steps of 0.01, then 0.1..1.0 in steps of 0.1."""
    return [i / 100 for i in range(1, 10)] + [i / 10 for i in range(1, 11)]


def curves_csv(curves: dict) -> str:
    """CSV with columns acquisition,precision,recall,method."""
    lines = ["acquisition,precision,recall,method"]
    for method, result in curves.items():
        for p in result.points:
            lines.append(f"{p.acquisition!r},{p.precision!r},{p.recall!r},{method}")
    return "\n".join(lines) + "\n"


def scaled_csv(scaled: dict) -> str:
    """CSV with columns acquisition,precision_ratio,recall_ratio,method."""
    lines = ["acquisition,precision_ratio,recall_ratio,method"]
    for method, points in scaled.items():
        for p in points:
            lines.append(f"{p.acquisition!r},{p.precision_ratio!r},{p.recall_ratio!r},{method}")
    return "\n".join(lines) + "\n"
