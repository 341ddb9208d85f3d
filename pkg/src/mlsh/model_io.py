"""On-disk formats for trained models and packed code tables.

Model file: a versioned JSON document carrying the preprocessing statistics,
the hyperplane arrangement (base-10 full-precision floats throughout), and
an echo of the training configuration.  JSON float serialization uses the
shortest round-tripping decimal, so a written model reloads bit-exactly.

Code-table file: a little-endian binary header (magic, version, n_bits,
count) followed by the packed codes, one ceil(n_bits/64)-word row per
record in the bit layout of :mod:`mlsh.hashing`.
"""

import json
import struct

import numpy as np

from .hashing import validate_arrangement, words_per_code
from .preprocess import StandardizePCA
from .search import CodeTable

MODEL_FORMAT_VERSION = 1

CODE_TABLE_MAGIC = b"MLSHCODE"
CODE_TABLE_VERSION = 1
_CODE_HEADER = struct.Struct("<8sIIQ")


def save_model(path, preprocess: StandardizePCA, normals, config: dict) -> None:
    """Write a trained model; ``config`` is echoed verbatim (scalars only)."""
    normals = validate_arrangement(normals)
    if preprocess.n_components_ != normals.shape[1]:
        raise ValueError("arrangement dimension does not match preprocess output")
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "preprocess": {
            "input_dim": int(preprocess.n_features_in_),
            "output_dim": int(preprocess.n_components_),
            "mean": preprocess.mean_.tolist(),
            "stddev": preprocess.scale_.tolist(),
            "projection": preprocess.components_.tolist(),
        },
        "arrangement": {
            "n_bits": int(normals.shape[0]),
            "dim": int(normals.shape[1]),
            "normals": normals.tolist(),
        },
        "config": config,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_model(path):
    """Read a model file; returns ``(preprocess, normals, config)``."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise ValueError(f"{path}: not a valid model file: {e}") from None
    version = doc.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported model format version {version!r}")

    pp = doc["preprocess"]
    model = StandardizePCA()
    model.mean_ = np.asarray(pp["mean"], dtype=np.float64)
    model.scale_ = np.asarray(pp["stddev"], dtype=np.float64)
    model.components_ = np.asarray(pp["projection"], dtype=np.float64)
    model.n_features_in_ = int(pp["input_dim"])
    model.n_components_ = int(pp["output_dim"])
    if model.components_.shape != (model.n_components_, model.n_features_in_):
        raise ValueError(f"{path}: projection shape does not match declared dimensions")
    if (model.scale_ <= 0.0).any():
        raise ValueError(f"{path}: stddev entries must be strictly positive")
    gram = model.components_ @ model.components_.T
    if not np.allclose(gram, np.eye(model.n_components_), atol=1e-8):
        raise ValueError(f"{path}: projection rows are not orthonormal")

    arr = doc["arrangement"]
    normals = validate_arrangement(np.asarray(arr["normals"], dtype=np.float64))
    if normals.shape != (int(arr["n_bits"]), int(arr["dim"])):
        raise ValueError(f"{path}: arrangement shape does not match declared sizes")
    if normals.shape[1] != model.n_components_:
        raise ValueError(f"{path}: arrangement dimension does not match preprocess output")
    return model, normals, doc.get("config", {})


def save_code_table(path, table: CodeTable) -> None:
    header = _CODE_HEADER.pack(CODE_TABLE_MAGIC, CODE_TABLE_VERSION, table.n_bits, len(table))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(table.codes, dtype="<u8").tobytes())


def load_code_table(path) -> CodeTable:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _CODE_HEADER.size:
        raise ValueError(f"{path}: truncated code table")
    magic, version, n_bits, count = _CODE_HEADER.unpack_from(blob)
    if magic != CODE_TABLE_MAGIC:
        raise ValueError(f"{path}: not a code-table file")
    if version != CODE_TABLE_VERSION:
        raise ValueError(f"{path}: unsupported code-table version {version}")
    words = words_per_code(n_bits)
    expected = _CODE_HEADER.size + count * words * 8
    if len(blob) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, found {len(blob)}")
    codes = np.frombuffer(blob, dtype="<u8", offset=_CODE_HEADER.size).reshape(count, words)
    return CodeTable(codes=codes.astype(np.uint64), n_bits=n_bits)
