"""Seeding strategies that produce the K initial prototypes.

Five methods are provided:

* ``init_random`` picks K distinct data rows uniformly.
* ``init_kmeanspp`` grows the set one prototype at a time, sampling each new
  one with probability proportional to its squared distance from the set.
* ``init_kmeans_parallel`` replaces the sequential passes with a fixed
  number of oversampled Bernoulli rounds followed by weighted clustering of
  the gathered candidates.
* ``init_sk_parallel`` runs the oversampled seeding independently on data
  subsets, refines each result with a few relocation iterations, and keeps
  the subset result with the smallest subset-local SSE.
* ``init_srpk_parallel`` additionally projects every subset to a low
  dimension with an independent random sign matrix, clusters there, and
  rebuilds the prototypes in the original space before selection.

Bernoulli sampling decisions are keyed by (stream key, round, row index),
so the candidate sets are identical for every worker count; sequential
draws (first seed, padding, weighted clustering) come from the caller's
generator and are likewise independent of the shard layout.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .data import ClusterConfig, SubsetPartition
from .engine import (
    assign_points,
    compute_sse,
    run_lloyd,
    sum_sq_dists,
    update_prototypes,
    weighted_cluster,
    _nearest,
)
from .projection import project, sample_rp_matrix
from .rng import point_uniforms, stream_key
from .runtime import ShardPlan, map_gather, map_reduce_sum, map_shards, shard

MAX_RESTARTS = 100


@dataclass
class InitReport:
    """Diagnostics from one initialization run.

    ``initial_sse`` is always the SSE of the returned prototypes on the full
    data. ``per_subset_local_sse`` / ``chosen_subset`` describe subset
    selection (None entries mark subsets discarded for empty clusters);
    ``psi`` is the SSE of the first sampled singleton prototype set;
    ``round_candidates`` / ``candidate_indices`` record the oversampling
    rounds when the method runs on the full data.
    """

    method: str
    initial_sse: float
    wall_time: float
    per_subset_local_sse: list[float | None] | None = None
    chosen_subset: int | None = None
    restarts: int = 0
    psi: float | None = None
    round_candidates: list[int] | None = None
    candidate_indices: list[list[int]] | None = field(default=None, repr=False)


def init_random(data: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """K distinct rows sampled uniformly without replacement."""
    n = data.shape[0]
    if n < k:
        raise ValueError(f"cannot draw {k} prototypes from {n} rows")
    idx = rng.choice(n, size=k, replace=False)
    return data[idx].copy()


def init_kmeanspp(data: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Squared-distance-proportional sequential seeding.

    If every remaining squared distance is zero before k prototypes are
    chosen (fewer than k distinct rows), the rest are drawn uniformly among
    unchosen rows.
    """
    n = data.shape[0]
    if n < k:
        raise ValueError(f"cannot draw {k} prototypes from {n} rows")
    chosen = np.empty(k, dtype=np.int64)
    chosen[0] = int(rng.integers(0, n))
    d2 = _nearest(data, data[chosen[0]][None, :])[1]
    for j in range(1, k):
        total = float(d2.sum())
        if total > 0:
            cdf = np.cumsum(d2)
            idx = min(int(np.searchsorted(cdf, rng.random() * total, side="right")), n - 1)
        else:
            remaining = np.setdiff1d(np.arange(n), chosen[:j])
            idx = int(rng.choice(remaining))
        chosen[j] = idx
        d2 = np.minimum(d2, _nearest(data, data[idx][None, :])[1])
    return data[chosen].copy()


def _min_d2_to(data: np.ndarray, centers: np.ndarray, plan: ShardPlan | None) -> np.ndarray:
    """Per-row squared distance to the nearest of `centers`."""
    if plan is None or plan.worker_count == 1:
        return _nearest(data, centers)[1]
    out = np.empty(data.shape[0])
    for rows, shard_d2 in map_shards(plan, lambda r: (r, _nearest(data[r], centers)[1])):
        out[rows] = shard_d2
    return out


def init_kmeans_parallel(
    data: np.ndarray,
    k: int,
    oversampling: float,
    rounds: int,
    rng: np.random.Generator,
    plan: ShardPlan | None = None,
) -> tuple[np.ndarray, InitReport]:
    """Oversampled parallel seeding with weighted candidate clustering.

    Runs `rounds` rounds in which every row joins the candidate set
    independently with probability ``min(1, oversampling * d2 / sse)``; the
    candidate set is then weighted by how many rows each candidate is
    nearest to and reduced to k prototypes with ``weighted_cluster``. If
    fewer than k candidates were sampled, the set is padded with uniformly
    chosen unsampled rows first.
    """
    start = time.perf_counter()
    n = data.shape[0]
    if n < k:
        raise ValueError(f"cannot draw {k} prototypes from {n} rows")
    if oversampling <= 0:
        raise ValueError(f"oversampling must be > 0, got {oversampling}")
    if rounds < 1:
        raise ValueError(f"rounds must be >= 1, got {rounds}")

    key = stream_key(rng)
    seed_idx = int(rng.integers(0, n))
    cand_idx: list[int] = [seed_idx]
    d2 = _min_d2_to(data, data[[seed_idx]], plan)
    sse = sum_sq_dists(d2, plan)
    psi = sse

    round_counts: list[int] = []
    round_sets: list[list[int]] = []
    for rnd in range(1, rounds + 1):
        if sse > 0:
            scale = oversampling / sse

            def sample_task(rows: np.ndarray) -> list[int]:
                probs = np.minimum(d2[rows] * scale, 1.0)
                hits = point_uniforms(key, rnd, rows) < probs
                return [int(i) for i in rows[hits]]

            if plan is None:
                picked = sample_task(np.arange(n))
            else:
                picked = sorted(map_gather(plan, sample_task))
        else:
            picked = []
        round_counts.append(len(picked))
        round_sets.append(picked)
        if picked:
            d2 = np.minimum(d2, _min_d2_to(data, data[picked], plan))
            cand_idx.extend(picked)
            sse = sum_sq_dists(d2, plan)

    if len(cand_idx) < k:
        unchosen = np.setdiff1d(np.arange(n), np.asarray(cand_idx, dtype=np.int64))
        pad = rng.choice(unchosen, size=k - len(cand_idx), replace=False)
        cand_idx.extend(int(i) for i in pad)

    candidates = data[cand_idx]
    labels = assign_points(data, candidates, plan).labels
    if plan is None or plan.worker_count == 1:
        weights = np.bincount(labels, minlength=len(cand_idx)).astype(np.float64)
    else:
        weights = map_reduce_sum(
            plan,
            lambda rows: np.bincount(labels[rows], minlength=len(cand_idx)).astype(np.float64),
        )
    # A zero count happens only when a candidate is an exact duplicate of a
    # lower-indexed one; count the candidate itself so weights stay positive.
    weights[weights == 0] = 1.0

    protos = weighted_cluster(candidates, weights, k, rng)
    report = InitReport(
        method="kmpar",
        initial_sse=compute_sse(data, protos, plan),
        wall_time=time.perf_counter() - start,
        psi=psi,
        round_candidates=round_counts,
        candidate_indices=round_sets,
    )
    return protos, report


def _subset_plan(
    n_rows: int, workers_per_subset: int, plan_seed: int
) -> ShardPlan | None:
    if workers_per_subset <= 1:
        return None
    return shard(n_rows, workers_per_subset, np.random.default_rng(plan_seed))


def _refine_and_score(
    xi: np.ndarray, protos: np.ndarray, cfg: ClusterConfig, plan: ShardPlan | None
) -> tuple[np.ndarray, float]:
    """Run at most t_init relocation iterations and score on the subset."""
    if cfg.t_init > 0:
        protos, assign, stats = run_lloyd(xi, protos, cfg.t_init, 0, plan)
        return protos, stats.sse_per_iter[-1]
    return protos, compute_sse(xi, protos, plan)


def _sk_subset_job(
    xi: np.ndarray, cfg: ClusterConfig, algo_seed: int, plan_seed: int, workers: int
) -> tuple[np.ndarray, float]:
    sub_rng = np.random.default_rng(algo_seed)
    plan = _subset_plan(xi.shape[0], workers, plan_seed)
    protos, _ = init_kmeans_parallel(
        xi, cfg.k, cfg.oversampling, cfg.rounds, sub_rng, plan=plan
    )
    return _refine_and_score(xi, protos, cfg, plan)


def _srpk_subset_job(
    xi: np.ndarray, cfg: ClusterConfig, algo_seed: int, plan_seed: int, workers: int
) -> tuple[np.ndarray | None, float | None]:
    sub_rng = np.random.default_rng(algo_seed)
    plan = _subset_plan(xi.shape[0], workers, plan_seed)
    r_mat = sample_rp_matrix(xi.shape[1], cfg.rp_dim, cfg.rp_dist, sub_rng)
    projected = project(xi, r_mat)
    protos_p, _ = init_kmeans_parallel(
        projected, cfg.k, cfg.oversampling, cfg.rounds, sub_rng, plan=plan
    )
    if cfg.t_init > 0:
        protos_p, assign_p, _ = run_lloyd(projected, protos_p, cfg.t_init, 0, plan)
    else:
        assign_p = assign_points(projected, protos_p, plan)
    counts = np.bincount(assign_p.labels, minlength=cfg.k)
    if counts.min() == 0:
        return None, None
    protos = update_prototypes(xi, assign_p, cfg.k, np.zeros((cfg.k, xi.shape[1])), plan)
    return protos, compute_sse(xi, protos, plan)


def _run_subset_jobs(jobs: list) -> list:
    if len(jobs) == 1:
        return [jobs[0]()]
    with ThreadPoolExecutor(max_workers=min(len(jobs), os.cpu_count() or 1)) as pool:
        futures = [pool.submit(job) for job in jobs]
        return [f.result() for f in futures]


def _check_partition(partition: SubsetPartition, k: int) -> None:
    for i, rows in enumerate(partition.row_index_lists):
        if rows.size < k:
            raise ValueError(f"subset {i} has {rows.size} rows, fewer than k={k}")


def init_sk_parallel(
    data: np.ndarray,
    partition: SubsetPartition,
    cfg: ClusterConfig,
    rng: np.random.Generator,
    workers_per_subset: int = 1,
    global_plan: ShardPlan | None = None,
) -> tuple[np.ndarray, InitReport]:
    """Subset-selected oversampled seeding.

    Each subset is seeded independently, refined with at most t_init
    relocation iterations, and scored by its subset-local SSE; the lowest
    scorer wins (ties go to the lowest subset index).
    """
    start = time.perf_counter()
    _check_partition(partition, cfg.k)
    s = partition.subset_count
    algo_seeds = rng.integers(0, 1 << 63, size=s)
    plan_seeds = rng.integers(0, 1 << 63, size=s)
    jobs = [
        (
            lambda rows=rows, a=int(algo_seeds[i]), p=int(plan_seeds[i]): _sk_subset_job(
                data[rows], cfg, a, p, workers_per_subset
            )
        )
        for i, rows in enumerate(partition.row_index_lists)
    ]
    results = _run_subset_jobs(jobs)
    local_sses = [sse for _, sse in results]
    chosen = int(np.argmin(local_sses))
    protos = results[chosen][0]
    report = InitReport(
        method="sk",
        initial_sse=compute_sse(data, protos, global_plan),
        wall_time=time.perf_counter() - start,
        per_subset_local_sse=list(local_sses),
        chosen_subset=chosen,
    )
    return protos, report


def init_srpk_parallel(
    data: np.ndarray,
    partition: SubsetPartition,
    cfg: ClusterConfig,
    rng: np.random.Generator,
    workers_per_subset: int = 1,
    global_plan: ShardPlan | None = None,
) -> tuple[np.ndarray, InitReport]:
    """Subset seeding through per-subset random projections.

    Projected subsets are seeded and refined in the low-dimensional space;
    the resulting partition rebuilds prototypes as original-space cluster
    means, which are scored by subset-local SSE. Subsets whose projected
    clustering leaves an empty cluster are discarded; if every subset is
    discarded, the whole initialization restarts with fresh randomness
    (at most ``MAX_RESTARTS`` times).
    """
    start = time.perf_counter()
    _check_partition(partition, cfg.k)
    s = partition.subset_count
    restarts = 0
    while True:
        algo_seeds = rng.integers(0, 1 << 63, size=s)
        plan_seeds = rng.integers(0, 1 << 63, size=s)
        jobs = [
            (
                lambda rows=rows, a=int(algo_seeds[i]), p=int(plan_seeds[i]): _srpk_subset_job(
                    data[rows], cfg, a, p, workers_per_subset
                )
            )
            for i, rows in enumerate(partition.row_index_lists)
        ]
        results = _run_subset_jobs(jobs)
        local_sses = [sse for _, sse in results]
        if any(sse is not None for sse in local_sses):
            break
        restarts += 1
        if restarts >= MAX_RESTARTS:
            raise RuntimeError(
                f"initialization restarted {MAX_RESTARTS} times and every subset kept "
                "producing an empty cluster; the configuration cannot seed this data"
            )
    scores = np.array([np.inf if sse is None else sse for sse in local_sses])
    chosen = int(np.argmin(scores))
    protos = results[chosen][0]
    report = InitReport(
        method="srpk",
        initial_sse=compute_sse(data, protos, global_plan),
        wall_time=time.perf_counter() - start,
        per_subset_local_sse=list(local_sses),
        chosen_subset=chosen,
        restarts=restarts,
    )
    return protos, report
