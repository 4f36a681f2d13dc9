"""Batch front-end: dataset generation, clustering runs, evaluation, sweeps.

Subcommands::

    parkmeans generate  --k 10 --m 1000 --nk 100 --dc 0.1 --dr 1.0 --seed 7 --out d/
    parkmeans cluster   --method srpk --k 10 --p 40 --s 8 --seed 1 data.bin
    parkmeans eval      predicted.txt truth.txt
    parkmeans bench     suite.json --csv results.csv

`cluster` emits one JSON run record; `bench` emits a CSV (and optionally
JSON) table with one row per run plus one summary row per suite entry.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .data import (
    ClusterConfig,
    load_labels,
    load_matrix,
    minmax_scale,
    partition_rows,
)
from .engine import compute_sse, run_lloyd, sum_sq_dists
from .initializers import (
    InitReport,
    init_kmeans_parallel,
    init_kmeanspp,
    init_random,
    init_sk_parallel,
    init_srpk_parallel,
)
from .metrics import nmi
from .msphere import SphereSpec, generate_dataset, write_dataset
from .projection import RpDistribution
from .runtime import group_workers, shard

METHODS = ("random", "kmpp", "kmpar", "sk", "srpk")

_RECORD_FIELDS = [
    "method",
    "dataset",
    "k",
    "oversampling",
    "rounds",
    "t_init",
    "subsets",
    "rp_dim",
    "rp_dist",
    "seed",
    "conv_threshold",
    "max_lloyd_iters",
    "scaled",
    "workers",
    "initial_sse",
    "final_sse",
    "lloyd_iterations",
    "nmi",
    "psi",
    "per_subset_local_sse",
    "chosen_subset",
    "restarts",
    "init_seconds",
    "search_seconds",
]


@dataclass
class RunRecord:
    """Everything one clustering run reports."""

    method: str
    dataset: str
    k: int
    oversampling: float
    rounds: int
    t_init: int
    subsets: int
    rp_dim: int
    rp_dist: str
    seed: int
    conv_threshold: int
    max_lloyd_iters: int
    scaled: bool
    workers: int
    initial_sse: float
    final_sse: float
    lloyd_iterations: int
    nmi: float | None
    psi: float | None
    per_subset_local_sse: list[float | None] | None
    chosen_subset: int | None
    restarts: int
    init_seconds: float
    search_seconds: float

    def to_json(self) -> str:
        record = asdict(self)
        return json.dumps({name: record[name] for name in _RECORD_FIELDS})


def default_workers() -> int:
    env = os.environ.get("PARKMEANS_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def resolve_threshold(spec: str, n_rows: int) -> int:
    """'pct1' means 1 percent of N rounded down; otherwise an absolute count."""
    if spec == "pct1":
        return int(0.01 * n_rows)
    value = int(spec)
    if value < 0:
        raise ValueError(f"threshold must be nonnegative, got {value}")
    return value


def run_clustering(
    dataset_path: str,
    method: str,
    cfg: ClusterConfig,
    *,
    workers: int = 1,
    scale: bool = True,
    threshold_spec: str = "0",
    labels_path: str | None = None,
    fmt: str | None = None,
) -> RunRecord:
    """Load, scale, initialize, and search one dataset; return the record."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    data = load_matrix(dataset_path, fmt)
    if scale:
        data = minmax_scale(data)
    n = data.shape[0]
    if cfg.k > n:
        raise ValueError(f"k={cfg.k} exceeds the {n} data rows")
    threshold = resolve_threshold(threshold_spec, n)
    truth = load_labels(labels_path) if labels_path else None
    if truth is not None and truth.size != n:
        raise ValueError(f"label file has {truth.size} entries, data has {n} rows")

    workers = max(1, workers)
    part_ss, plan_ss, init_ss = np.random.SeedSequence(cfg.seed).spawn(3)
    plan = (
        shard(n, workers, np.random.default_rng(plan_ss))
        if workers > 1 and n >= workers
        else None
    )
    init_rng = np.random.default_rng(init_ss)

    start = time.perf_counter()
    if method in ("random", "kmpp"):
        picker = init_random if method == "random" else init_kmeanspp
        protos = picker(data, cfg.k, init_rng)
        report = InitReport(
            method=method,
            initial_sse=compute_sse(data, protos, plan),
            wall_time=time.perf_counter() - start,
        )
    elif method == "kmpar":
        protos, report = init_kmeans_parallel(
            data, cfg.k, cfg.oversampling, cfg.rounds, init_rng, plan=plan
        )
    else:
        partition = partition_rows(n, cfg.subsets, np.random.default_rng(part_ss))
        per_subset = max(1, workers // cfg.subsets)
        group_workers(per_subset * cfg.subsets, cfg.subsets)
        init_fn = init_sk_parallel if method == "sk" else init_srpk_parallel
        protos, report = init_fn(
            data,
            partition,
            cfg,
            init_rng,
            workers_per_subset=per_subset,
            global_plan=plan,
        )
    init_seconds = time.perf_counter() - start

    start = time.perf_counter()
    final_protos, assign, stats = run_lloyd(
        data, protos, cfg.max_lloyd_iters, threshold, plan
    )
    search_seconds = time.perf_counter() - start
    final_sse = (
        stats.sse_per_iter[-1] if stats.sse_per_iter else sum_sq_dists(assign.sq_dists, plan)
    )
    nmi_value = float(nmi(assign.labels, truth)) if truth is not None else None

    return RunRecord(
        method=method,
        dataset=str(dataset_path),
        k=cfg.k,
        oversampling=float(cfg.oversampling),
        rounds=cfg.rounds,
        t_init=cfg.t_init,
        subsets=cfg.subsets,
        rp_dim=cfg.rp_dim,
        rp_dist=cfg.rp_dist.value,
        seed=cfg.seed,
        conv_threshold=threshold,
        max_lloyd_iters=cfg.max_lloyd_iters,
        scaled=scale,
        workers=workers,
        initial_sse=float(report.initial_sse),
        final_sse=float(final_sse),
        lloyd_iterations=stats.iterations,
        nmi=nmi_value,
        psi=report.psi,
        per_subset_local_sse=report.per_subset_local_sse,
        chosen_subset=report.chosen_subset,
        restarts=report.restarts,
        init_seconds=init_seconds,
        search_seconds=search_seconds,
    )


def median(values: list[float]) -> float:
    return float(np.median(values))


def mad(values: list[float]) -> float:
    """Median absolute deviation about the median."""
    arr = np.asarray(values, dtype=np.float64)
    return float(np.median(np.abs(arr - np.median(arr))))


def _cmd_generate(args: argparse.Namespace) -> int:
    spec = SphereSpec(
        k=args.k,
        m=args.m,
        n_per_cluster=args.nk,
        center_dist=args.dc,
        radius=args.dr,
        seed=args.seed,
    )
    dataset = generate_dataset(spec, np.random.default_rng(spec.seed))
    paths = write_dataset(args.out, dataset, spec, fmt=args.format)
    for name in ("data", "labels", "meta"):
        print(paths[name])
    return 0


def _build_config(args: argparse.Namespace) -> ClusterConfig:
    return ClusterConfig(
        k=args.k,
        oversampling=args.oversampling,
        rounds=args.rounds,
        t_init=args.t_init,
        subsets=args.subsets,
        rp_dim=args.rp_dim,
        rp_dist=RpDistribution(args.rp_dist),
        seed=args.seed,
        max_lloyd_iters=args.max_iters,
    )


def _cmd_cluster(args: argparse.Namespace) -> int:
    record = run_clustering(
        args.dataset,
        args.method,
        _build_config(args),
        workers=args.workers,
        scale=not args.no_scale,
        threshold_spec=args.threshold,
        labels_path=args.labels,
        fmt=args.format,
    )
    text = record.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    predicted = load_labels(args.predicted)
    truth = load_labels(args.truth)
    print(f"{nmi(predicted, truth):.6f}")
    return 0


_SUITE_OVERRIDES = {
    "oversampling": "oversampling",
    "l": "oversampling",
    "rounds": "rounds",
    "r": "rounds",
    "t_init": "t_init",
    "subsets": "subsets",
    "s": "subsets",
    "rp_dim": "rp_dim",
    "p": "rp_dim",
    "rp_dist": "rp_dist",
    "max_iters": "max_lloyd_iters",
    "max_lloyd_iters": "max_lloyd_iters",
}

_BENCH_COLUMNS = [
    "kind",
    "dataset",
    "method",
    "k",
    "seed",
    "status",
    "error",
    "initial_sse",
    "final_sse",
    "lloyd_iterations",
    "nmi",
    "init_seconds",
    "search_seconds",
    "n_runs",
    "initial_sse_median",
    "initial_sse_mad",
    "initial_sse_max",
    "initial_sse_min",
    "final_sse_median",
    "final_sse_mad",
    "final_sse_max",
    "final_sse_min",
    "lloyd_iterations_median",
    "nmi_median",
]


def _summary_row(entry: dict, records: list[RunRecord]) -> dict:
    row = {
        "kind": "summary",
        "dataset": entry["dataset"],
        "method": entry["method"],
        "k": entry["k"],
        "n_runs": len(records),
    }
    if records:
        initial = [r.initial_sse for r in records]
        final = [r.final_sse for r in records]
        row.update(
            initial_sse_median=median(initial),
            initial_sse_mad=mad(initial),
            initial_sse_max=max(initial),
            initial_sse_min=min(initial),
            final_sse_median=median(final),
            final_sse_mad=mad(final),
            final_sse_max=max(final),
            final_sse_min=min(final),
            lloyd_iterations_median=median([r.lloyd_iterations for r in records]),
        )
        nmis = [r.nmi for r in records if r.nmi is not None]
        if nmis:
            row["nmi_median"] = median(nmis)
    return row


def _cmd_bench(args: argparse.Namespace) -> int:
    suite = json.loads(Path(args.suite).read_text(encoding="utf-8"))
    if not isinstance(suite, list):
        raise ValueError("suite file must hold a JSON list of run descriptions")
    rows: list[dict] = []
    records_json: list[dict] = []
    failures = 0
    for entry in suite:
        overrides = entry.get("overrides", {})
        kwargs = {}
        for key, value in overrides.items():
            if key in ("threshold", "no_scale", "labels", "format", "workers"):
                continue
            if key not in _SUITE_OVERRIDES:
                raise ValueError(f"unknown override {key!r} in suite entry")
            kwargs[_SUITE_OVERRIDES[key]] = (
                RpDistribution(value) if _SUITE_OVERRIDES[key] == "rp_dist" else value
            )
        entry_records: list[RunRecord] = []
        for seed in entry["seeds"]:
            base = {
                "kind": "run",
                "dataset": entry["dataset"],
                "method": entry["method"],
                "k": entry["k"],
                "seed": seed,
            }
            try:
                cfg = ClusterConfig(k=entry["k"], seed=seed, **kwargs)
                record = run_clustering(
                    entry["dataset"],
                    entry["method"],
                    cfg,
                    workers=overrides.get("workers", args.workers),
                    scale=not overrides.get("no_scale", False),
                    threshold_spec=str(overrides.get("threshold", "0")),
                    labels_path=overrides.get("labels"),
                    fmt=overrides.get("format"),
                )
            except Exception as exc:  # noqa: BLE001 - suite keeps going per row
                failures += 1
                rows.append({**base, "status": "error", "error": str(exc)})
                continue
            entry_records.append(record)
            records_json.append(json.loads(record.to_json()))
            rows.append(
                {
                    **base,
                    "status": "ok",
                    "initial_sse": record.initial_sse,
                    "final_sse": record.final_sse,
                    "lloyd_iterations": record.lloyd_iterations,
                    "nmi": record.nmi,
                    "init_seconds": record.init_seconds,
                    "search_seconds": record.search_seconds,
                }
            )
        rows.append(_summary_row(entry, entry_records))

    out = open(args.csv, "w", newline="", encoding="utf-8") if args.csv else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=_BENCH_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()
    if args.json:
        Path(args.json).write_text(json.dumps(records_json), encoding="utf-8")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parkmeans",
        description="K-means toolkit: synthetic sphere datasets, parallel-friendly "
        "seeding methods, clustering runs, and benchmark sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a sphere-cluster dataset")
    gen.add_argument("--k", type=int, required=True, help="number of clusters")
    gen.add_argument("--m", type=int, required=True, help="data dimension")
    gen.add_argument("--nk", type=int, required=True, help="points per cluster")
    gen.add_argument("--dc", type=float, required=True, help="nearest-center distance")
    gen.add_argument("--dr", type=float, required=True, help="cluster radius")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output directory")
    gen.add_argument("--format", choices=("f64bin", "csv"), default="f64bin")
    gen.set_defaults(func=_cmd_generate)

    clu = sub.add_parser("cluster", help="run one clustering job")
    clu.add_argument("dataset", help="data file (csv or f64bin)")
    clu.add_argument("--method", choices=METHODS, required=True)
    clu.add_argument("--k", type=int, required=True)
    clu.add_argument("--l", "--oversampling", dest="oversampling", type=float, default=None,
                     help="oversampling factor (default 2k)")
    clu.add_argument("--r", "--rounds", dest="rounds", type=int, default=5)
    clu.add_argument("--t-init", dest="t_init", type=int, default=5)
    clu.add_argument("--s", "--subsets", dest="subsets", type=int, default=8)
    clu.add_argument("--p", "--rp-dim", dest="rp_dim", type=int, default=40)
    clu.add_argument("--rp-dist", choices=("pm1", "sparse"), default="pm1")
    clu.add_argument("--seed", type=int, default=0)
    clu.add_argument("--threshold", default="0",
                     help="convergence threshold: absolute count or 'pct1'")
    clu.add_argument("--max-iters", dest="max_iters", type=int, default=300)
    clu.add_argument("--no-scale", action="store_true",
                     help="skip min-max scaling to [-1, 1]")
    clu.add_argument("--labels", default=None, help="true labels for NMI")
    clu.add_argument("--format", choices=("csv", "f64bin"), default=None)
    clu.add_argument("--workers", type=int, default=default_workers())
    clu.add_argument("--out", default=None, help="write the JSON record here")
    clu.set_defaults(func=_cmd_cluster)

    ev = sub.add_parser("eval", help="NMI between two label files")
    ev.add_argument("predicted")
    ev.add_argument("truth")
    ev.set_defaults(func=_cmd_eval)

    ben = sub.add_parser("bench", help="run a suite of clustering jobs")
    ben.add_argument("suite", help="JSON list of {dataset, method, k, seeds, overrides}")
    ben.add_argument("--csv", default=None, help="result table path (default stdout)")
    ben.add_argument("--json", default=None, help="also dump all run records as JSON")
    ben.add_argument("--workers", type=int, default=default_workers())
    ben.set_defaults(func=_cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
