"""Active pairwise-constrained subspace clustering.

Cluster data lying near a union of low-dimensional subspaces, then spend a
small budget of human (or simulated) pairwise same-cluster queries where they
matter most: on minimum-margin points near the decision boundary between
estimated subspaces.
"""
from .active import (
    CertainSets,
    LoopOptions,
    QueryLog,
    ReplayOracle,
    RunTrace,
    SimulatedOracle,
    active_clustering,
    assign_to_certain_set,
    ksubspaces_cost,
    random_baseline,
    smoothing_accept,
    uos_explore,
)
from .affinity import (
    Affinity,
    build_tsc,
    default_tsc_q,
    impute,
    load_affinity,
    normalize_max2,
    save_affinity,
)
from .datasets import (
    DataMatrix,
    SyntheticSpec,
    generate_uos,
    load_csv,
    load_labels,
    load_manifest,
    preset,
)
from .evaluation import EvalReport, misclassification_rate, oracle_pca_labels
from .geometry import (
    PrincipalAngleProfile,
    Subspace,
    fit_pca,
    principal_angles,
    residual,
)
from .margin import MarginTable, margin_of, margin_table, max_margin_point, min_margin_point
from .spectral import Labeling, kmeans, spectral_clustering
from .theory import (
    gap_condition,
    margin_bounds,
    run_intersection_ordering,
    run_margin_coverage,
    unclipped_margin,
)

__all__ = [
    "Affinity",
    "CertainSets",
    "DataMatrix",
    "EvalReport",
    "Labeling",
    "LoopOptions",
    "MarginTable",
    "PrincipalAngleProfile",
    "QueryLog",
    "ReplayOracle",
    "RunTrace",
    "SimulatedOracle",
    "Subspace",
    "SyntheticSpec",
    "active_clustering",
    "assign_to_certain_set",
    "build_tsc",
    "default_tsc_q",
    "fit_pca",
    "gap_condition",
    "generate_uos",
    "impute",
    "kmeans",
    "ksubspaces_cost",
    "load_affinity",
    "load_csv",
    "load_labels",
    "load_manifest",
    "margin_bounds",
    "margin_of",
    "margin_table",
    "max_margin_point",
    "min_margin_point",
    "misclassification_rate",
    "normalize_max2",
    "oracle_pca_labels",
    "preset",
    "principal_angles",
    "random_baseline",
    "residual",
    "run_intersection_ordering",
    "run_margin_coverage",
    "save_affinity",
    "smoothing_accept",
    "spectral_clustering",
    "unclipped_margin",
    "uos_explore",
]

__version__ = "0.1.0"
