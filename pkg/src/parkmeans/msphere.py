"""Synthetic sphere-cluster dataset generator for high-dimensional benchmarks.

Builds K spherical clusters in R^M: cluster centers are placed so that each
new center sits at exactly `center_dist` from its nearest existing center,
then every cluster is filled with points drawn on spheres of uniformly
random radius in (0, radius] around its center. Point density therefore
falls off linearly: about 100*a/radius percent of a cluster's points lie
within distance `a` of the center.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import save_labels, save_matrix

MAX_CENTER_REJECTIONS = 1_000_000


@dataclass(frozen=True)
class SphereSpec:
    """Generator parameters: K clusters of n_per_cluster points in R^m."""

    k: int
    m: int
    n_per_cluster: int
    center_dist: float
    radius: float
    seed: int

    def __post_init__(self) -> None:
        if self.k < 1 or self.m < 1 or self.n_per_cluster < 1:
            raise ValueError("k, m, and n_per_cluster must all be >= 1")
        if self.center_dist <= 0 or self.radius <= 0:
            raise ValueError("center_dist and radius must be positive")


@dataclass(frozen=True)
class LabeledDataset:
    """Generated points with their true cluster ids and generating centers."""

    data: np.ndarray
    labels: np.ndarray
    centers: np.ndarray


def randsurfpoint(center: np.ndarray, d: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform point on the radius-d sphere around `center`.

    Draws independent standard normals and rescales them to length d; the
    direction is uniform by the rotational symmetry of the normal vector.
    A zero draw (possible only through underflow) is redrawn.
    """
    center = np.asarray(center, dtype=np.float64)
    while True:
        x = rng.standard_normal(center.shape[0])
        s = float(np.dot(x, x))
        if s > 0.0:
            return center + (d / np.sqrt(s)) * x


def generate_centers(spec: SphereSpec, rng: np.random.Generator) -> np.ndarray:
    """Place K centers, each exactly center_dist from its nearest neighbor.

    The first center is the origin. Every later center is proposed on the
    center_dist sphere around a uniformly chosen existing center and is
    accepted only if that parent is its unique nearest center; the parent
    is redrawn on every attempt.
    """
    centers = np.zeros((spec.k, spec.m))
    if spec.k == 1:
        return centers
    centers[1] = randsurfpoint(centers[0], spec.center_dist, rng)
    placed = 2
    rejections = 0
    while placed < spec.k:
        parent = int(rng.integers(0, placed))
        candidate = randsurfpoint(centers[parent], spec.center_dist, rng)
        dists = np.linalg.norm(centers[:placed] - candidate, axis=1)
        nearest = int(np.argmin(dists))
        unique_min = np.count_nonzero(dists == dists[nearest]) == 1
        if nearest == parent and unique_min:
            centers[placed] = candidate
            placed += 1
            rejections = 0
        else:
            rejections += 1
            if rejections >= MAX_CENTER_REJECTIONS:
                raise RuntimeError(
                    f"gave up placing center {placed + 1} of {spec.k} after "
                    f"{MAX_CENTER_REJECTIONS} consecutive rejections; the requested "
                    f"geometry is implausible (k={spec.k}, m={spec.m})"
                )
    return centers


def generate_dataset(spec: SphereSpec, rng: np.random.Generator) -> LabeledDataset:
    """Generate the full labeled dataset, cluster-major row order."""
    centers = generate_centers(spec, rng)
    n_total = spec.k * spec.n_per_cluster
    data = np.empty((n_total, spec.m))
    labels = np.empty(n_total, dtype=np.int64)
    row = 0
    for cluster in range(spec.k):
        for _ in range(spec.n_per_cluster):
            # 1 - U[0, 1) realizes the half-open radius interval (0, radius].
            r = spec.radius * (1.0 - rng.random())
            data[row] = randsurfpoint(centers[cluster], r, rng)
            labels[row] = cluster
            row += 1
    return LabeledDataset(data=data, labels=labels, centers=centers)


def write_dataset(
    out_dir: str | Path,
    dataset: LabeledDataset,
    spec: SphereSpec,
    fmt: str = "f64bin",
) -> dict[str, Path]:
    """Write data + labels + JSON sidecar into `out_dir`; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    data_path = out / ("data.csv" if fmt == "csv" else "data.bin")
    labels_path = out / "labels.txt"
    meta_path = out / "meta.json"
    save_matrix(data_path, dataset.data, fmt)
    save_labels(labels_path, dataset.labels)
    meta = {
        "k": spec.k,
        "m": spec.m,
        "n_per_cluster": spec.n_per_cluster,
        "center_dist": spec.center_dist,
        "radius": spec.radius,
        "seed": spec.seed,
        "format": fmt,
        "centers": dataset.centers.tolist(),
    }
    meta_path.write_text(json.dumps(meta), encoding="utf-8")
    return {"data": data_path, "labels": labels_path, "meta": meta_path}
