"""Deterministic random-number plumbing.

All randomness in the package flows through numpy Generators backed by the
Philox 4x64 counter-based bit generator, so identical (seed, config) pairs
reproduce bit-identical streams across runs and platforms.
"""

import numpy as np

GENERATOR_NAME = "philox4x64"

_MASK64 = (1 << 64) - 1


def make_rng(seed: int) -> np.random.Generator:
    """Generator seeded directly with a 64-bit key."""
    return np.random.Generator(np.random.Philox(key=seed & _MASK64))


def _mix64(x: int) -> int:
    # splitmix64 finalizer; a bijection on 64-bit integers
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def derive_seed(seed: int, replication: int) -> int:
    """64-bit seed for one replication.

    Computed as mix(seed ^ mix(replication)) where mix is the splitmix64
    finalizer. Both applications are bijective, so for a fixed master seed
    distinct replication indices always map to distinct derived seeds.
    """
    return _mix64((seed & _MASK64) ^ _mix64(replication & _MASK64))


def replication_rng(seed: int, replication: int) -> np.random.Generator:
    return make_rng(derive_seed(seed, replication))
