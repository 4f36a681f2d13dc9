"""External cluster evaluation: entropy, contingency counts, and NMI."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Contingency:
    """Joint label counts with row/column marginals."""

    table: np.ndarray
    row_sums: np.ndarray
    col_sums: np.ndarray
    total: int


def contingency(labels_a: np.ndarray, labels_b: np.ndarray) -> Contingency:
    labels_a = np.asarray(labels_a).ravel()
    labels_b = np.asarray(labels_b).ravel()
    if labels_a.size == 0:
        raise ValueError("label vectors must be nonempty")
    if labels_a.size != labels_b.size:
        raise ValueError(
            f"label vectors differ in length: {labels_a.size} vs {labels_b.size}"
        )
    _, ia = np.unique(labels_a, return_inverse=True)
    _, ib = np.unique(labels_b, return_inverse=True)
    table = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(table, (ia, ib), 1)
    return Contingency(
        table=table,
        row_sums=table.sum(axis=1),
        col_sums=table.sum(axis=0),
        total=int(labels_a.size),
    )


def _entropy_from_counts(counts: np.ndarray, total: int) -> float:
    probs = counts[counts > 0] / total
    return float(-(probs * np.log(probs)).sum())


def entropy(labels: np.ndarray) -> float:
    """Shannon entropy of the class frequencies, natural log."""
    labels = np.asarray(labels).ravel()
    if labels.size == 0:
        raise ValueError("cannot compute entropy of an empty labeling")
    _, counts = np.unique(labels, return_counts=True)
    return _entropy_from_counts(counts, labels.size)


def nmi(labels_a: np.ndarray, labels_b: np.ndarray) -> float:
    """Normalized mutual information with geometric-mean normalization.

    Returns I(A;B) / sqrt(H(A) * H(B)). When either entropy is zero, the
    result is 1.0 if the labelings are identical up to renaming classes,
    else 0.0.
    """
    cont = contingency(labels_a, labels_b)
    h_a = _entropy_from_counts(cont.row_sums, cont.total)
    h_b = _entropy_from_counts(cont.col_sums, cont.total)
    if h_a == 0.0 or h_b == 0.0:
        # Identical up to renaming <=> the joint table is a permutation
        # pattern (one nonzero cell per row and per column).
        one_to_one = (
            np.count_nonzero(cont.table) == cont.table.shape[0] == cont.table.shape[1]
        )
        return 1.0 if one_to_one else 0.0
    n = cont.total
    r, c = np.nonzero(cont.table)
    joint = cont.table[r, c] / n
    info = float(
        (joint * np.log(n * cont.table[r, c] / (cont.row_sums[r] * cont.col_sums[c]))).sum()
    )
    info = max(info, 0.0)
    return min(info / np.sqrt(h_a * h_b), 1.0)
