"""Seeded random streams.

Every random draw in the package comes from numpy's Philox-4x64
counter-based bit generator, keyed by ``SeedSequence([seed, *stream])``.
Normal variates use numpy's ziggurat ``standard_normal``. Given the same
numpy major version, a (seed, stream) pair reproduces the same numbers on
any platform.
"""
import numpy as np

# stream identifiers
CHANNEL = 0
INPUT = 1
NOISE = 2
KACZMARZ = 3


def philox(seed: int, *stream: int) -> np.random.Generator:
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *stream])))


def derive_seed(*key: int) -> int:
    """Deterministic 64-bit seed from a tuple of non-negative integers."""
    return int(np.random.SeedSequence(list(key)).generate_state(1, np.uint64)[0])
