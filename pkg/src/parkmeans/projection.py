"""Random projection with binary-coin matrices.

Projects an N x M data matrix to N x P via ``(1 / sqrt(P)) * X @ R`` where
R has i.i.d. entries from one of the two classic sign distributions:
dense +-1 with probability 1/2 each, or sparse {-1, 0, +1} with
probabilities {1/6, 2/3, 1/6}.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class RpDistribution(enum.Enum):
    """Entry distribution of a random projection matrix."""

    PLUS_MINUS_ONE = "pm1"
    SPARSE = "sparse"


@dataclass(frozen=True)
class RpMatrix:
    """Random sign matrix; the 1/sqrt(P) factor is applied at projection time.

    Entries are stored as exact float64 values in {-1.0, 0.0, +1.0} so the
    matrix multiplies data directly without conversion.
    """

    entries: np.ndarray
    dist: RpDistribution

    @property
    def n_rows(self) -> int:
        return self.entries.shape[0]

    @property
    def n_cols(self) -> int:
        return self.entries.shape[1]


def sample_rp_matrix(
    m: int, p: int, dist: RpDistribution, rng: np.random.Generator
) -> RpMatrix:
    """Sample an m x p matrix of i.i.d. entries from the given distribution."""
    if m < 1 or p < 1:
        raise ValueError(f"projection matrix shape must be positive, got {m}x{p}")
    if dist is RpDistribution.PLUS_MINUS_ONE:
        entries = rng.integers(0, 2, size=(m, p)).astype(np.float64) * 2.0 - 1.0
    elif dist is RpDistribution.SPARSE:
        u = rng.random(size=(m, p))
        entries = np.zeros((m, p))
        entries[u < 1.0 / 6.0] = -1.0
        entries[u >= 5.0 / 6.0] = 1.0
    else:
        raise ValueError(f"unknown distribution {dist!r}")
    return RpMatrix(entries=entries, dist=dist)


def project(data: np.ndarray, r: RpMatrix) -> np.ndarray:
    """Compute the projected matrix ``(1 / sqrt(P)) * data @ R``."""
    if data.ndim != 2 or data.shape[1] != r.n_rows:
        raise ValueError(
            f"cannot project {data.shape} data with a {r.n_rows}x{r.n_cols} matrix"
        )
    return (data @ r.entries) * (1.0 / math.sqrt(r.n_cols))
