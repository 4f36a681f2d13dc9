"""Dataset representation, file IO, min-max scaling, and row partitioning.

A dataset is a dense row-major float64 matrix, one observation per row.
Two on-disk formats are supported:

* ``csv``: UTF-8, comma-separated decimal reals, no header, one row per line.
* ``f64bin``: 16-byte header of two little-endian uint64 (N, M) followed by
  N*M little-endian float64 values, row-major.

Label files hold one nonnegative integer per line.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .projection import RpDistribution

_F64BIN_HEADER = struct.Struct("<QQ")


@dataclass(frozen=True)
class SubsetPartition:
    """Disjoint, covering row-index subsets of roughly equal size."""

    row_index_lists: tuple[np.ndarray, ...]

    @property
    def subset_count(self) -> int:
        return len(self.row_index_lists)


@dataclass
class ClusterConfig:
    """All run parameters for one clustering job.

    ``oversampling`` defaults to ``2 * k`` when left as None, matching the
    standard choice for oversampled parallel seeding.
    """

    k: int
    oversampling: float | None = None
    rounds: int = 5
    t_init: int = 5
    subsets: int = 8
    rp_dim: int = 40
    rp_dist: RpDistribution = RpDistribution.PLUS_MINUS_ONE
    seed: int = 0
    conv_threshold: int = 0
    max_lloyd_iters: int = 300

    def __post_init__(self) -> None:
        if self.oversampling is None:
            self.oversampling = 2.0 * self.k
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.oversampling <= 0:
            raise ValueError(f"oversampling must be > 0, got {self.oversampling}")
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")
        if self.t_init < 0:
            raise ValueError(f"t_init must be >= 0, got {self.t_init}")
        if self.subsets < 1:
            raise ValueError(f"subsets must be >= 1, got {self.subsets}")
        if self.rp_dim < 1:
            raise ValueError(f"rp_dim must be >= 1, got {self.rp_dim}")
        if self.conv_threshold < 0:
            raise ValueError(f"conv_threshold must be >= 0, got {self.conv_threshold}")
        if self.max_lloyd_iters < 0:
            raise ValueError(f"max_lloyd_iters must be >= 0, got {self.max_lloyd_iters}")


def _detect_format(path: str | Path, fmt: str | None) -> str:
    if fmt is not None:
        if fmt not in ("csv", "f64bin"):
            raise ValueError(f"unknown matrix format {fmt!r}")
        return fmt
    suffix = Path(path).suffix.lower()
    return "csv" if suffix == ".csv" else "f64bin"


def _check_finite(values: np.ndarray, path: str | Path) -> None:
    bad = ~np.isfinite(values)
    if bad.any():
        row, col = np.argwhere(bad)[0]
        raise ValueError(
            f"{path}: non-finite value {values[row, col]!r} at row {row + 1}, column {col + 1}"
        )


def _load_csv(path: str | Path) -> np.ndarray:
    rows: list[np.ndarray] = []
    n_cols: int | None = None
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            text = line.strip()
            if not text:
                continue
            parts = text.split(",")
            if n_cols is None:
                n_cols = len(parts)
            elif len(parts) != n_cols:
                raise ValueError(
                    f"{path}: ragged CSV, row {lineno} has {len(parts)} columns, expected {n_cols}"
                )
            try:
                rows.append(np.array(parts, dtype=np.float64))
            except ValueError:
                for col, token in enumerate(parts, start=1):
                    try:
                        float(token)
                    except ValueError:
                        raise ValueError(
                            f"{path}: cannot parse {token!r} at row {lineno}, column {col}"
                        ) from None
                raise
    if not rows:
        raise ValueError(f"{path}: empty CSV file")
    return np.vstack(rows)


def _load_f64bin(path: str | Path) -> np.ndarray:
    with open(path, "rb") as handle:
        header = handle.read(_F64BIN_HEADER.size)
        if len(header) != _F64BIN_HEADER.size:
            raise ValueError(f"{path}: truncated f64bin header")
        n_rows, n_cols = _F64BIN_HEADER.unpack(header)
        if n_rows < 1 or n_cols < 1:
            raise ValueError(f"{path}: invalid f64bin shape {n_rows}x{n_cols}")
        values = np.fromfile(handle, dtype="<f8", count=n_rows * n_cols)
        if values.size != n_rows * n_cols:
            raise ValueError(
                f"{path}: f64bin payload holds {values.size} values, "
                f"header promises {n_rows * n_cols}"
            )
        trailing = handle.read(1)
        if trailing:
            raise ValueError(f"{path}: trailing bytes after f64bin payload")
    return values.reshape(n_rows, n_cols)


def load_matrix(path: str | Path, fmt: str | None = None) -> np.ndarray:
    """Load a data matrix; ``fmt`` is 'csv' or 'f64bin' (default: by suffix)."""
    resolved = _detect_format(path, fmt)
    values = _load_csv(path) if resolved == "csv" else _load_f64bin(path)
    _check_finite(values, path)
    return np.ascontiguousarray(values, dtype=np.float64)


def save_matrix(path: str | Path, data: np.ndarray, fmt: str | None = None) -> None:
    """Write a matrix in 'csv' or 'f64bin' format (default: by suffix)."""
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
        raise ValueError(f"expected a nonempty 2-D matrix, got shape {data.shape}")
    resolved = _detect_format(path, fmt)
    if resolved == "csv":
        with open(path, "w", encoding="utf-8") as handle:
            for row in data:
                handle.write(",".join(repr(v) for v in row))
                handle.write("\n")
    else:
        with open(path, "wb") as handle:
            handle.write(_F64BIN_HEADER.pack(data.shape[0], data.shape[1]))
            np.ascontiguousarray(data, dtype="<f8").tofile(handle)


def load_labels(path: str | Path) -> np.ndarray:
    """Load a label file: one nonnegative integer per line."""
    labels: list[int] = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                value = int(text)
            except ValueError:
                raise ValueError(f"{path}: cannot parse label {text!r} at line {lineno}") from None
            if value < 0:
                raise ValueError(f"{path}: negative label {value} at line {lineno}")
            labels.append(value)
    if not labels:
        raise ValueError(f"{path}: empty label file")
    return np.asarray(labels, dtype=np.int64)


def save_labels(path: str | Path, labels: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for value in np.asarray(labels).ravel():
            handle.write(f"{int(value)}\n")


def minmax_scale(data: np.ndarray) -> np.ndarray:
    """Map each column linearly onto [-1, 1]; constant columns map to 0."""
    data = np.asarray(data, dtype=np.float64)
    mins = data.min(axis=0)
    spans = data.max(axis=0) - mins
    out = np.zeros_like(data)
    varying = spans > 0
    if varying.any():
        scaled = (data[:, varying] - mins[varying]) / spans[varying]
        out[:, varying] = 2.0 * scaled - 1.0
    return out


def partition_rows(
    n_rows: int, subsets: int, rng: np.random.Generator
) -> SubsetPartition:
    """Cut a random permutation of rows into `subsets` near-equal blocks.

    Block sizes differ by at most one; indices inside each block are kept in
    ascending order so downstream accumulation order is canonical.
    """
    if subsets < 1:
        raise ValueError(f"subsets must be >= 1, got {subsets}")
    if n_rows < subsets:
        raise ValueError(f"cannot split {n_rows} rows into {subsets} nonempty subsets")
    perm = rng.permutation(n_rows)
    blocks = tuple(np.sort(block) for block in np.array_split(perm, subsets))
    return SubsetPartition(row_index_lists=blocks)
