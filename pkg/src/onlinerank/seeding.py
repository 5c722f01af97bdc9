"""Counter-based rank streams.

All randomness flows through SplitMix64 so that a trial's ranks depend only
on ``(master_seed, trial_index)``:

* ``trial_key(seed, k)`` is output ``k`` of the SplitMix64 stream started at
  ``seed``, i.e. ``mix64(seed + (k + 1) * GAMMA)``;
* rank ``j`` of trial ``k`` is output ``j`` of the stream started at
  ``trial_key(seed, k)``, keeping the top 53 bits as a double in ``[0, 1)``.

Chunking or reordering trials therefore never changes any value.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def trial_key(master_seed: int, k: int) -> int:
    return mix64(master_seed + (k + 1) * GAMMA)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_M1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def rank_matrix(master_seed: int, start: int, stop: int, dim: int) -> np.ndarray:
    """Ranks for trials ``start..stop-1``, shape ``(stop - start, dim)``."""
    ks = np.arange(start, stop, dtype=np.uint64)
    with np.errstate(over="ignore"):
        keys = _mix64_array(np.uint64(master_seed & MASK64) + (ks + np.uint64(1)) * np.uint64(GAMMA))
        js = np.arange(1, dim + 1, dtype=np.uint64) * np.uint64(GAMMA)
        raw = _mix64_array(keys[:, None] + js[None, :])
    return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def trial_ranks(master_seed: int, k: int, dim: int) -> np.ndarray:
    return rank_matrix(master_seed, k, k + 1, dim)[0]


def derive_seed(master_seed: int, k: int) -> int:
    """64-bit per-case seed, for suites that need a whole numpy Generator per case."""
    return trial_key(master_seed, k)
