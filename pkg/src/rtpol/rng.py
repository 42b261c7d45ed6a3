"""Seed derivation helpers.

One master seed drives every randomized stage. Sub-seeds are derived with
splitmix64 so that stage k (or permutation replicate k) can be regenerated
in isolation without sharing sequential generator state, which keeps
replicates embarrassingly parallel and runs reproducible.
"""

from __future__ import annotations

import numpy as np

_M64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One splitmix64 scrambling round on a 64-bit integer."""
    x = (x + _GAMMA) & _M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _M64
    return (x ^ (x >> 31)) & _M64


def splitmix64_array(x: np.ndarray) -> np.ndarray:
    """Vectorized splitmix64 on a uint64 array (wraparound arithmetic)."""
    x = (x + np.uint64(_GAMMA)).astype(np.uint64)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def derive_seed(master: int, *indices: int) -> int:
    """Fold stage/replicate indices into the master seed, one round per index."""
    s = splitmix64(master & _M64)
    for ix in indices:
        s = splitmix64(s ^ (ix & _M64))
    return s


def generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & _M64))
