"""Counter-based SplitMix64 streams.

A stream seeded with ``s`` emits ``mix64(s + (t + 1) * GAMMA)`` at position
``t``. Because every output depends only on ``(s, t)``, symbols can be drawn
at arbitrary positions in any order and in any batch layout with identical
results, which is what makes Monte Carlo output independent of the worker
count.
"""

from __future__ import annotations

import numpy as np

RNG_NAME = "splitmix64"
GAMMA = np.uint64(0x9E3779B97F4A7C15)
# Distinct odd increment for deriving per-sample seeds from a master seed.
SPLIT_GAMMA = np.uint64(0xD1B54A32D192ED03)

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / (1 << 53)


def mix64(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer applied elementwise (wrapping uint64 arithmetic)."""
    z = np.asarray(z, dtype=np.uint64)
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def as_seed(seed: int) -> np.uint64:
    return np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF)


def split_seeds(master_seed: int, indices: np.ndarray) -> np.ndarray:
    """Per-sample seeds ``mix64(master + (i + 1) * SPLIT_GAMMA)``."""
    idx = np.asarray(indices, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return mix64(as_seed(master_seed) + (idx + np.uint64(1)) * SPLIT_GAMMA)


def uniforms(seeds: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """Uniform [0, 1) draws, shape ``(len(seeds), len(positions))``."""
    seeds = np.asarray(seeds, dtype=np.uint64)
    pos = np.asarray(positions, dtype=np.uint64)
    with np.errstate(over="ignore"):
        ctr = (pos + np.uint64(1)) * GAMMA
        z = mix64(seeds[:, None] + ctr[None, :])
    return (z >> _S11).astype(np.float64) * _INV53
