"""Sign hashing against hyperplane normals and packed Hamming distance.

A vector is encoded against an arrangement of hyperplanes through the
origin: bit i is 1 iff the dot product with normal i is strictly positive,
0 otherwise (in particular, a point exactly on a hyperplane hashes to 0).

Codes are packed little-endian into 64-bit words: bit ``i`` of a code lives
in word ``i // 64`` at bit position ``i % 64``.  Padding bits beyond the
code length are zero.  This layout is also the serialized one.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from . import rng as _rng
from .validation import as_float_matrix, as_float_vector

WORD_BITS = 64
_WORD_DTYPE = np.dtype("<u8")


def words_per_code(n_bits: int) -> int:
    if n_bits < 1:
        raise ValueError("n_bits must be >= 1")
    return -(-n_bits // WORD_BITS)


def pack_bits(bits) -> np.ndarray:
    """Pack a (..., n_bits) array of 0/1 values into (..., words) uint64."""
    bits = np.asarray(bits)
    if bits.ndim < 1 or bits.shape[-1] < 1:
        raise ValueError("bits must have at least one bit along the last axis")
    n_bits = bits.shape[-1]
    packed8 = np.packbits(bits.astype(np.uint8), axis=-1, bitorder="little")
    pad = words_per_code(n_bits) * 8 - packed8.shape[-1]
    if pad:
        pad_block = np.zeros(packed8.shape[:-1] + (pad,), dtype=np.uint8)
        packed8 = np.concatenate([packed8, pad_block], axis=-1)
    return np.ascontiguousarray(packed8).view(_WORD_DTYPE)


def unpack_bits(words, n_bits: int) -> np.ndarray:
    """Inverse of :func:`pack_bits`; returns a (..., n_bits) uint8 array."""
    words = np.ascontiguousarray(words, dtype=_WORD_DTYPE)
    if words.shape[-1] != words_per_code(n_bits):
        raise ValueError("word count does not match n_bits")
    bits = np.unpackbits(words.view(np.uint8), axis=-1, bitorder="little")
    return bits[..., :n_bits]


def encode(normals, x) -> np.ndarray:
    """Hash one vector into a packed code: bit i = 1 iff dot(normals[i], x) > 0."""
    x = as_float_vector(x)
    if x.shape[0] != normals.shape[1]:
        raise ValueError(f"vector has dimension {x.shape[0]}, arrangement expects {normals.shape[1]}")
    return pack_bits(normals @ x > 0.0)


def encode_all(normals, X) -> np.ndarray:
    """Hash the rows of X into an (n, words) packed code array."""
    X = as_float_matrix(X)
    if X.shape[1] != normals.shape[1]:
        raise ValueError(f"vectors have dimension {X.shape[1]}, arrangement expects {normals.shape[1]}")
    return pack_bits(X @ normals.T > 0.0)


def hamming_distance(a, b) -> int:
    """Number of differing bits between two packed codes of equal length."""
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    if a.shape != b.shape:
        raise ValueError(f"code length mismatch: {a.shape} vs {b.shape}")
    return int(np.bitwise_count(a ^ b).sum())


def hamming_to_all(codes, code) -> np.ndarray:
    """Hamming distance from one packed code to every row of a code table."""
    codes = np.asarray(codes, dtype=np.uint64)
    code = np.asarray(code, dtype=np.uint64)
    if codes.ndim != 2 or code.ndim != 1 or codes.shape[1] != code.shape[0]:
        raise ValueError(f"code length mismatch: {codes.shape} vs {code.shape}")
    return np.bitwise_count(codes ^ code[None, :]).sum(axis=1, dtype=np.int64)


def unit_rows(rows, generator=None) -> np.ndarray:
    """Normalize rows to unit length, redrawing near-zero rows if a generator
    is supplied (degenerate draws are measure-zero but must not divide by 0)."""
    rows = np.array(rows, dtype=np.float64)
    norms = np.linalg.norm(rows, axis=1)
    if generator is not None:
        while True:
            bad = np.flatnonzero(norms < 1e-12)
            if not bad.size:
                break
            rows[bad] = generator.standard_normal((bad.size, rows.shape[1]))
            norms[bad] = np.linalg.norm(rows[bad], axis=1)
    elif (norms < 1e-12).any():
        raise ValueError("cannot normalize a zero row")
    return rows / norms[:, None]


def random_arrangement(dim: int, n_bits: int, seed) -> np.ndarray:
    """Draw n_bits normals independently and uniformly on the unit sphere.

    This is the untrained baseline arrangement.  It uses the same seed
    substream as trainer initialization, so for a given seed it equals the
    trainer's starting state.
    """
    if dim < 2:
        raise ValueError("dim must be >= 2")
    if n_bits < 1:
        raise ValueError("n_bits must be >= 1")
    gen = _rng.substream(seed, _rng.ARRANGEMENT_STREAM)
    return unit_rows(gen.standard_normal((n_bits, dim)), gen)


def validate_arrangement(normals) -> np.ndarray:
    """Check arrangement invariants: 2-D, dim >= 2, unit rows within 1e-9."""
    normals = as_float_matrix(normals, "normals")
    if normals.shape[1] < 2:
        raise ValueError("arrangement dimension must be >= 2")
    norms = np.linalg.norm(normals, axis=1)
    if not np.allclose(norms, 1.0, rtol=0.0, atol=1e-9):
        raise ValueError("arrangement normals must have unit norm within 1e-9")
    return normals


def pairwise_abs_cosine(normals) -> np.ndarray:
    """|cosine| between every pair of normals, diagonal fixed to zero."""
    normals = validate_arrangement(normals)
    m = np.abs(normals @ normals.T)
    np.fill_diagonal(m, 0.0)
    return m


class RandomHyperplaneHasher(BaseEstimator, TransformerMixin):
    """Classic sign-random-projection hashing (the untrained baseline).

    Parameters
    ----------
    n_bits : int, default 1024
        Number of hyperplanes, i.e. code length in bits.
    random_state : int, default 0
        Master seed.  There is no entropy-based default; identical inputs
        always produce identical arrangements.
    """

    def __init__(self, n_bits=1024, random_state=0):
        self.n_bits = n_bits
        self.random_state = random_state

    def fit(self, X, y=None):
        X = as_float_matrix(X)
        self.normals_ = random_arrangement(X.shape[1], self.n_bits, self.random_state)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "normals_"):
            raise NotFittedError("fit must be called before transform")
        return encode_all(self.normals_, X)
