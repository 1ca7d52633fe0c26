"""Seed derivation for reproducible, order-independent Monte Carlo."""

import numpy as np

#: Default master seed used by the command-line tools when --seed is omitted.
DEFAULT_SEED = 20230615


def rng_for(seed: int, *path: int) -> np.random.Generator:
    """Return the generator owned by one logical task.

    The generator is derived from ``(seed, *path)`` alone, so every task
    (replicate, grid cell, retry) gets the same stream no matter how work is
    scheduled across processes.  ``path`` components must be nonnegative
    integers, e.g. ``rng_for(seed, replicate_index, attempt)``.
    """
    entropy = (int(seed),) + tuple(int(p) for p in path)
    if any(p < 0 for p in entropy[1:]):
        raise ValueError("path components must be nonnegative integers")
    return np.random.default_rng(np.random.SeedSequence(entropy))
