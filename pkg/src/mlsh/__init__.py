"""Supervised hyperplane hashing for fast Hamming-space similarity search.

Feature vectors are hashed to packed bit codes by an arrangement of
hyperplanes through the origin.  Arrangements are either random
(sign-random-projection, the classic baseline) or learned from labeled
pairs, one hyperplane at a time, by Metropolis-Hastings random walks on the
unit sphere.
"""

from .data import LabeledDataset, common_label, load_dataset_csv, save_dataset_csv
from .hashing import (
    RandomHyperplaneHasher,
    encode,
    encode_all,
    hamming_distance,
    hamming_to_all,
    pack_bits,
    pairwise_abs_cosine,
    random_arrangement,
    unpack_bits,
)
from .mcmc import MCMCHyperplaneHasher, TrainConfig, TrainReport, mh_step, propose_step, train
from .model_io import load_code_table, load_model, save_code_table, save_model
from .objective import ObjectiveConfig, ObjectiveValue, classify_pair, evaluate
from .pairs import (
    PairSampler,
    PairSet,
    SamplingConfig,
    sample_negative,
    sample_pair_set,
    sample_positive,
)
from .preprocess import StandardizePCA, identity_preprocess
from .search import (
    CodeTable,
    CurveResult,
    EvalPoint,
    evaluate_query,
    recall_precision_curve,
    scaled_metrics,
    top_k_by_hamming,
    top_k_by_l2,
)
from .synth import gaussian_clusters, gaussian_sign_dataset

__version__ = "0.1.0"

__all__ = [
    "CodeTable",
    "CurveResult",
    "EvalPoint",
    "LabeledDataset",
    "MCMCHyperplaneHasher",
    "ObjectiveConfig",
    "ObjectiveValue",
    "PairSampler",
    "PairSet",
    "RandomHyperplaneHasher",
    "SamplingConfig",
    "StandardizePCA",
    "TrainConfig",
    "TrainReport",
    "classify_pair",
    "common_label",
    "encode",
    "encode_all",
    "evaluate",
    "evaluate_query",
    "gaussian_clusters",
    "gaussian_sign_dataset",
    "hamming_distance",
    "hamming_to_all",
    "identity_preprocess",
    "load_code_table",
    "load_dataset_csv",
    "load_model",
    "mh_step",
    "pack_bits",
    "pairwise_abs_cosine",
    "propose_step",
    "random_arrangement",
    "recall_precision_curve",
    "sample_negative",
    "sample_pair_set",
    "sample_positive",
    "save_code_table",
    "save_dataset_csv",
    "save_model",
    "scaled_metrics",
    "top_k_by_hamming",
    "top_k_by_l2",
    "train",
    "unpack_bits",
]
