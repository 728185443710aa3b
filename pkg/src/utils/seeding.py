"""Seed-stream derivation for reproducible searches and simulations."""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64_finalize(z: int) -> int:
    """SplitMix64 output mix; a bijection on 64-bit integers."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_candidate_seed(master_seed: int, stream_id: int) -> int:
    """
    Derive the seed of an independent random stream.

    Distinct stream ids under one master seed always give distinct seeds: the
    multiplication by an odd constant, the XOR and the finalizer are all bijections
    modulo 2**64.

    Args:
        master_seed (int): 64-bit unsigned master seed.
        stream_id (int): 64-bit unsigned stream identifier.

    Returns:
        int: 64-bit unsigned derived seed.
    """
    mixed = (master_seed & MASK64) ^ (((stream_id & MASK64) * GOLDEN_GAMMA) & MASK64)
    return splitmix64_finalize(mixed)


def stream_rng(master_seed: int, stream_id: int) -> np.random.Generator:
    """numpy Generator for one derived stream."""
    return np.random.default_rng(derive_candidate_seed(master_seed, stream_id))
