"""Seeded RNG used by every randomized step.

PCG64 seeded through numpy's SeedSequence with the integer seed; both the
bit generator and the seeding procedure are defined by numpy and give the
same stream on every platform.  Wall-clock seeding is never used.
"""
import numpy as np


def make_rng(seed):
    if seed is None:
        raise ValueError("a seed is required for randomized steps")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed {seed} is not a u64")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
