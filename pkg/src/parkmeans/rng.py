"""Counter-based uniform streams for order-independent parallel sampling."""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_PHASE_SALT = 0xD1342543DE82EF95
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _mix64_int(z: int) -> int:
    # splitmix64 finalizer on a plain Python int.
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


def _mix64(z: np.ndarray) -> np.ndarray:
    # splitmix64 finalizer, vectorized over uint64 arrays (wrapping arithmetic).
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def stream_key(rng: np.random.Generator) -> int:
    """Draw a 63-bit key that seeds a family of per-index uniform streams."""
    return int(rng.integers(0, 1 << 63))


def point_uniforms(key: int, phase: int, indices: np.ndarray) -> np.ndarray:
    """Uniforms in [0, 1) addressed by (key, phase, index).

    The value at a given index depends only on the triple, never on how the
    index set is split across workers, so sampling decisions are identical
    for every shard layout and worker count.
    """
    base = _mix64_int(int(key) ^ ((int(phase) + 1) * _PHASE_SALT))
    z = np.asarray(indices, dtype=np.uint64) * np.uint64(_GOLDEN)
    z = _mix64(z + np.uint64(base))
    return (z >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
