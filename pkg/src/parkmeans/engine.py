"""Nearest-prototype assignment, SSE, prototype updates, and the search loop.

All operations are pure over read-only inputs. Passing a ShardPlan makes
assignment, SSE, and updates run data-parallel over row shards with
reductions applied in ascending worker order; a single-shard plan is
bit-identical to the serial path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .runtime import ShardPlan, map_reduce_sum, map_shards


@dataclass(frozen=True)
class Assignment:
    """Per-row nearest prototype index and squared distance to it."""

    labels: np.ndarray
    sq_dists: np.ndarray


@dataclass
class LloydStats:
    """Per-iteration trace of one search run."""

    iterations: int
    sse_per_iter: list[float] = field(default_factory=list)
    changed_per_iter: list[int] = field(default_factory=list)


def _check_dims(data: np.ndarray, centers: np.ndarray) -> None:
    if data.ndim != 2 or centers.ndim != 2:
        raise ValueError("data and prototypes must be 2-D matrices")
    if data.shape[1] != centers.shape[1]:
        raise ValueError(
            f"dimension mismatch: data has {data.shape[1]} columns, "
            f"prototypes have {centers.shape[1]}"
        )


def _nearest(data: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # ||x - c||^2 = ||x||^2 - 2 x.c + ||c||^2, clamped at zero.
    # Ties resolve to the lowest prototype index via argmin.
    x_sq = np.einsum("ij,ij->i", data, data)
    c_sq = np.einsum("ij,ij->i", centers, centers)
    d2 = x_sq[:, None] - 2.0 * (data @ centers.T) + c_sq[None, :]
    np.maximum(d2, 0.0, out=d2)
    labels = np.argmin(d2, axis=1)
    return labels.astype(np.int64), d2[np.arange(d2.shape[0]), labels]


def assign_points(
    data: np.ndarray, protos: np.ndarray, plan: ShardPlan | None = None
) -> Assignment:
    """Label each row with its nearest prototype under squared Euclidean distance."""
    _check_dims(data, protos)
    if plan is None or plan.worker_count == 1:
        labels, sq = _nearest(data, protos)
        return Assignment(labels=labels, sq_dists=sq)
    labels = np.empty(data.shape[0], dtype=np.int64)
    sq = np.empty(data.shape[0], dtype=np.float64)
    parts = map_shards(plan, lambda rows: (rows, *_nearest(data[rows], protos)))
    for rows, shard_labels, shard_sq in parts:
        labels[rows] = shard_labels
        sq[rows] = shard_sq
    return Assignment(labels=labels, sq_dists=sq)


def sum_sq_dists(sq_dists: np.ndarray, plan: ShardPlan | None = None) -> float:
    """Total of per-row squared distances, partials added in worker order."""
    if plan is None or plan.worker_count == 1:
        return float(np.sum(sq_dists))
    total = 0.0
    for rows in plan.shard_index_lists:
        total += float(np.sum(sq_dists[rows]))
    return total


def compute_sse(
    data: np.ndarray, protos: np.ndarray, plan: ShardPlan | None = None
) -> float:
    """Sum of squared distances from every row to its nearest prototype."""
    _check_dims(data, protos)
    if plan is None or plan.worker_count == 1:
        return float(np.sum(_nearest(data, protos)[1]))
    partial = map_reduce_sum(
        plan, lambda rows: np.array([np.sum(_nearest(data[rows], protos)[1])])
    )
    return float(partial[0])


def _cluster_sums(data: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    """Per-cluster row sums and member counts, flattened to one vector.

    Rows are accumulated in ascending row order within each cluster
    (stable sort), so the result is reproducible for a fixed row set.
    """
    counts = np.bincount(labels, minlength=k).astype(np.float64)
    sums = np.zeros((k, data.shape[1]))
    order = np.argsort(labels, kind="stable")
    sorted_labels = labels[order]
    present, starts = np.unique(sorted_labels, return_index=True)
    if present.size:
        sums[present] = np.add.reduceat(data[order], starts, axis=0)
    return np.concatenate([sums.ravel(), counts])


def update_prototypes(
    data: np.ndarray,
    assign: Assignment,
    k: int,
    previous: np.ndarray,
    plan: ShardPlan | None = None,
) -> np.ndarray:
    """Move each prototype to the mean of its members; empty clusters keep
    their previous prototype."""
    labels = assign.labels
    m = data.shape[1]
    if plan is None or plan.worker_count == 1:
        flat = _cluster_sums(data, labels, k)
    else:
        flat = map_reduce_sum(plan, lambda rows: _cluster_sums(data[rows], labels[rows], k))
    sums = flat[: k * m].reshape(k, m)
    counts = flat[k * m :]
    out = np.array(previous, dtype=np.float64, copy=True)
    occupied = counts > 0
    out[occupied] = sums[occupied] / counts[occupied, None]
    return out


def run_lloyd(
    data: np.ndarray,
    init: np.ndarray,
    max_iters: int,
    conv_threshold: int,
    plan: ShardPlan | None = None,
) -> tuple[np.ndarray, Assignment, LloydStats]:
    """Alternate assignment and prototype updates until few assignments change.

    Stops when the number of rows whose label changed since the previous
    assignment is <= `conv_threshold`, or after `max_iters` iterations.
    The first iteration's change count is measured against the assignment
    under `init`. With ``max_iters == 0`` the initial prototypes are
    returned untouched.
    """
    _check_dims(data, init)
    if max_iters < 0:
        raise ValueError(f"max_iters must be >= 0, got {max_iters}")
    protos = np.array(init, dtype=np.float64, copy=True)
    k = protos.shape[0]
    assign = assign_points(data, protos, plan)
    sse_per_iter: list[float] = []
    changed_per_iter: list[int] = []
    for _ in range(max_iters):
        protos = update_prototypes(data, assign, k, protos, plan)
        new_assign = assign_points(data, protos, plan)
        changed = int(np.count_nonzero(new_assign.labels != assign.labels))
        sse_per_iter.append(sum_sq_dists(new_assign.sq_dists, plan))
        changed_per_iter.append(changed)
        assign = new_assign
        if changed <= conv_threshold:
            break
    stats = LloydStats(
        iterations=len(changed_per_iter),
        sse_per_iter=sse_per_iter,
        changed_per_iter=changed_per_iter,
    )
    return protos, assign, stats


def _pick_by_mass(mass: np.ndarray, total: float, rng: np.random.Generator) -> int:
    cdf = np.cumsum(mass)
    idx = int(np.searchsorted(cdf, rng.random() * total, side="right"))
    return min(idx, mass.size - 1)


def _weighted_means(
    points: np.ndarray, weights: np.ndarray, labels: np.ndarray, k: int, previous: np.ndarray
) -> np.ndarray:
    out = previous.copy()
    for j in range(k):
        members = labels == j
        mass = float(weights[members].sum())
        if mass > 0:
            out[j] = (points[members] * weights[members, None]).sum(axis=0) / mass
    return out


def weighted_cluster(
    points: np.ndarray,
    weights: np.ndarray,
    k: int,
    rng: np.random.Generator,
    max_rounds: int = 1000,
) -> np.ndarray:
    """Cluster weighted candidate points into k centers.

    Seeding samples the first center with probability proportional to its
    weight and every later center proportional to weight times squared
    distance to the chosen set; if all remaining scores are zero the next
    center is drawn uniformly among unchosen candidates. The seeds are then
    refined with weighted relocation iterations until no assignment changes.
    """
    points = np.asarray(points, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] < 1:
        raise ValueError("candidate set must be a nonempty 2-D matrix")
    if weights.shape != (points.shape[0],):
        raise ValueError("one weight per candidate point required")
    if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
        raise ValueError("weights must be positive and finite")
    n = points.shape[0]
    if n < k:
        raise ValueError(f"cannot pick {k} centers from {n} candidates")

    chosen = np.empty(k, dtype=np.int64)
    chosen[0] = _pick_by_mass(weights, float(weights.sum()), rng)
    d2 = _nearest(points, points[chosen[0]][None, :])[1]
    for j in range(1, k):
        scores = weights * d2
        total = float(scores.sum())
        if total > 0:
            idx = _pick_by_mass(scores, total, rng)
        else:
            remaining = np.setdiff1d(np.arange(n), chosen[:j])
            idx = int(rng.choice(remaining))
        chosen[j] = idx
        d2 = np.minimum(d2, _nearest(points, points[idx][None, :])[1])

    protos = points[chosen].copy()
    labels = _nearest(points, protos)[0]
    for _ in range(max_rounds):
        protos = _weighted_means(points, weights, labels, k, protos)
        new_labels = _nearest(points, protos)[0]
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return protos
