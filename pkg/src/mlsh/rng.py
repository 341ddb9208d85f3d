"""Deterministic substream derivation from a single 64-bit master seed."""

import numpy as np

# Top-level stream tags. Every consumer of randomness hangs off exactly one
# of these, so streams never collide across subsystems.
ARRANGEMENT_STREAM = 0
PAIR_STREAM = 1
WALK_STREAM = 2


def check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    if not 0 <= seed < 2**64:
        raise ValueError("seed must fit in an unsigned 64-bit integer")
    return int(seed)


def substream(seed, *key: int) -> np.random.Generator:
    """Generator for the (seed, *key) substream of the master seed.

    Identical arguments always yield an identical stream, so work split by
    hyperplane and batch stays reproducible no matter how the pieces are
    scheduled across workers.
    """
    return np.random.default_rng(np.random.SeedSequence(check_seed(seed), spawn_key=key))
