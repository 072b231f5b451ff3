"""
Seeded randomness.

Every sampler takes a ``numpy.random.Generator`` backed by PCG64.  A run is
fully determined by its 64-bit seed; sub-streams come from
``SeedSequence.spawn`` so independent suites never share draws.
"""

import numpy as np

# Bounds for random group elements.
NUM_BOUND = 2 ** 16
EXP_MAX = 6
C_BOUND = 8


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def split(seed: int, n: int) -> list[np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(n)
    return [np.random.Generator(np.random.PCG64(s)) for s in children]


def ints(rng: np.random.Generator, lo: int, hi: int, size: int) -> list[int]:
    """``size`` uniform integers in [lo, hi] as Python ints."""
    return rng.integers(lo, hi, size=size, endpoint=True).tolist()
