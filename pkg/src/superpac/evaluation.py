"""Clustering evaluation: best-matching misclassification rate and the
nearest-subspace classifier fit on ground-truth clusters (the error floor an
unsupervised union-of-subspaces method could at best achieve)."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .geometry import fit_pca, residuals_to_subspaces
from .spectral import Labeling


@dataclass(frozen=True)
class EvalReport:
    misclassification_rate: float
    matching: dict  # estimated label -> matched true label
    per_cluster_errors: dict  # estimated label -> mismatched point count

    def to_json(self) -> str:
        return json.dumps(
            {
                "misclassification_rate": self.misclassification_rate,
                "matching": {str(k): int(v) for k, v in self.matching.items()},
                "per_cluster_errors": {
                    str(k): int(v) for k, v in self.per_cluster_errors.items()
                },
            }
        )


def _as_labels(labeling) -> np.ndarray:
    if isinstance(labeling, Labeling):
        return labeling.labels
    return np.asarray(labeling, dtype=int)


def misclassification_rate(est, truth) -> EvalReport:
    """Fraction of points misassigned under the best one-to-one matching of
    estimated clusters to true clusters (rectangular assignment; estimated
    clusters left unmatched count all their points as errors)."""
    e = _as_labels(est)
    t = _as_labels(truth)
    if e.shape != t.shape:
        raise ValueError(f"label length mismatch: {e.size} vs {t.size}")
    N = e.size
    e_ids = np.unique(e)
    t_ids = np.unique(t)
    confusion = np.zeros((e_ids.size, t_ids.size), dtype=int)
    e_pos = {v: i for i, v in enumerate(e_ids)}
    t_pos = {v: i for i, v in enumerate(t_ids)}
    for a, b in zip(e, t):
        confusion[e_pos[a], t_pos[b]] += 1
    rows, cols = linear_sum_assignment(confusion, maximize=True)
    agreement = int(confusion[rows, cols].sum())
    matching = {int(e_ids[r]): int(t_ids[c]) for r, c in zip(rows, cols)}
    per_cluster = {}
    for i, v in enumerate(e_ids):
        size = int(confusion[i].sum())
        matched = int(confusion[i, t_pos[matching[int(v)]]]) if int(v) in matching else 0
        per_cluster[int(v)] = size - matched
    return EvalReport(
        misclassification_rate=1.0 - agreement / N,
        matching=matching,
        per_cluster_errors=per_cluster,
    )


def oracle_pca_labels(X, d: int) -> Labeling:
    """Fit one subspace per ground-truth cluster and assign every point to its
    minimum-residual subspace (ties to the lowest cluster index)."""
    truth = getattr(X, "truth", None)
    if truth is None:
        raise ValueError("oracle PCA labels require ground-truth labels")
    pts = X.points
    K = int(truth.max()) + 1
    subspaces = []
    for k in range(K):
        members = np.where(truth == k)[0]
        if members.size == 0:
            raise ValueError(f"true cluster {k} is empty")
        subspaces.append(fit_pca(pts[:, members], d))
    R = residuals_to_subspaces(pts, subspaces)
    return Labeling(np.argmin(R, axis=1), K)
