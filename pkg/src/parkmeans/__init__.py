"""Data-parallel K-means toolkit.

Seeding strategies (uniform, distance-proportional, oversampled parallel,
subset-selected, and random-projection subset-selected), the relocation
search loop, a high-dimensional sphere-cluster dataset generator, NMI
evaluation, and an SPMD-style threaded runtime, exposed as a library and
the ``parkmeans`` CLI.
"""

from .data import (
    ClusterConfig,
    SubsetPartition,
    load_labels,
    load_matrix,
    minmax_scale,
    partition_rows,
    save_labels,
    save_matrix,
)
from .engine import (
    Assignment,
    LloydStats,
    assign_points,
    compute_sse,
    run_lloyd,
    update_prototypes,
    weighted_cluster,
)
from .initializers import (
    InitReport,
    init_kmeans_parallel,
    init_kmeanspp,
    init_random,
    init_sk_parallel,
    init_srpk_parallel,
)
from .metrics import Contingency, contingency, entropy, nmi
from .msphere import (
    LabeledDataset,
    SphereSpec,
    generate_centers,
    generate_dataset,
    randsurfpoint,
    write_dataset,
)
from .projection import RpDistribution, RpMatrix, project, sample_rp_matrix
from .runtime import ShardPlan, WorkerGroup, group_workers, map_gather, map_reduce_sum, shard

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "ClusterConfig",
    "Contingency",
    "InitReport",
    "LabeledDataset",
    "LloydStats",
    "RpDistribution",
    "RpMatrix",
    "ShardPlan",
    "SphereSpec",
    "SubsetPartition",
    "WorkerGroup",
    "assign_points",
    "compute_sse",
    "contingency",
    "entropy",
    "generate_centers",
    "generate_dataset",
    "group_workers",
    "init_kmeans_parallel",
    "init_kmeanspp",
    "init_random",
    "init_sk_parallel",
    "init_srpk_parallel",
    "load_labels",
    "load_matrix",
    "map_gather",
    "map_reduce_sum",
    "minmax_scale",
    "nmi",
    "partition_rows",
    "project",
    "randsurfpoint",
    "run_lloyd",
    "sample_rp_matrix",
    "save_labels",
    "save_matrix",
    "shard",
    "update_prototypes",
    "weighted_cluster",
    "write_dataset",
]
