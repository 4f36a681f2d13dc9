"""SPMD-style execution substrate: row shards, ordered reductions, gathers.

Data-parallel work is expressed as a pure task applied to each worker's
row shard. Results are combined in ascending worker-index order, which
makes every pipeline built on these primitives bit-identical across runs
and thread schedules for a fixed shard plan.

Workers are threads in the current process; heavy numeric work inside a
task releases the GIL, so shards genuinely run concurrently.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class ShardPlan:
    """Balanced disjoint row shards, one per worker."""

    shard_index_lists: tuple[np.ndarray, ...]

    @property
    def worker_count(self) -> int:
        return len(self.shard_index_lists)


@dataclass(frozen=True)
class WorkerGroup:
    """Contiguous block of worker ids serving one data subset."""

    group_id: int
    worker_ids: tuple[int, ...]


def shard(n_rows: int, workers: int, rng: np.random.Generator) -> ShardPlan:
    """Randomly split rows into `workers` balanced disjoint shards.

    Indices within each shard are sorted ascending so per-shard accumulation
    has a canonical order.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if n_rows < workers:
        raise ValueError(f"cannot shard {n_rows} rows across {workers} workers")
    perm = rng.permutation(n_rows)
    shards = tuple(np.sort(block) for block in np.array_split(perm, workers))
    return ShardPlan(shard_index_lists=shards)


def group_workers(workers: int, subsets: int) -> list[WorkerGroup]:
    """Partition workers into `subsets` contiguous groups of equal size."""
    if subsets < 1:
        raise ValueError(f"subsets must be >= 1, got {subsets}")
    if workers % subsets != 0:
        raise ValueError(f"{workers} workers cannot be split evenly into {subsets} groups")
    per_group = workers // subsets
    return [
        WorkerGroup(group_id=g, worker_ids=tuple(range(g * per_group, (g + 1) * per_group)))
        for g in range(subsets)
    ]


def map_shards(plan: ShardPlan, task: Callable[[np.ndarray], Any]) -> list[Any]:
    """Run `task` on every shard; return results in worker-index order.

    `task` must be pure over read-only shared state. With a single worker
    the task runs inline on the calling thread.
    """
    lists = plan.shard_index_lists
    if len(lists) == 1:
        return [task(lists[0])]
    with ThreadPoolExecutor(max_workers=len(lists)) as pool:
        return list(pool.map(task, lists))


def map_reduce_sum(plan: ShardPlan, task: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Sum per-shard result vectors in ascending worker-index order."""
    parts = [np.asarray(part, dtype=np.float64) for part in map_shards(plan, task)]
    length = parts[0].shape
    for w, part in enumerate(parts):
        if part.shape != length:
            raise ValueError(
                f"shard result shape mismatch: worker 0 returned {length}, worker {w} {part.shape}"
            )
    total = parts[0].copy()
    for part in parts[1:]:
        total += part
    return total


def map_gather(plan: ShardPlan, task: Callable[[np.ndarray], Sequence[Any]]) -> list[Any]:
    """Concatenate per-shard result lists in ascending worker-index order."""
    gathered: list[Any] = []
    for part in map_shards(plan, task):
        gathered.extend(part)
    return gathered
