"""Normalized spectral clustering with a deterministic, seeded k-means.

The Laplacian variant is the symmetric normalized one, L = I - D^-1/2 A D^-1/2.
k-means uses greedy furthest-point initialization with multiple restarts; all
randomness flows from the caller's seed, so identical inputs give identical
labels.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

KMEANS_RESTARTS = 50
KMEANS_MAX_ITER = 300


@dataclass(frozen=True)
class Labeling:
    """Hard assignment of N points to clusters 0..K-1."""

    labels: np.ndarray
    K: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=int)
        if labels.ndim != 1:
            raise ValueError("labels must be a 1-D integer array")
        if labels.size and (labels.min() < 0 or labels.max() >= self.K):
            raise ValueError("labels must lie in [0, K)")
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.labels.size

    def members(self, k: int) -> np.ndarray:
        return np.where(self.labels == k)[0]


def kmeans(rows: np.ndarray, K: int, seed) -> Labeling:
    """Seeded k-means on the rows of an (N, f) array.

    Each restart picks a random first center, then greedily adds the point
    furthest from the chosen centers (ties to the lowest index); Lloyd
    iterations follow. The best-inertia assignment over all restarts wins.
    """
    rows = np.asarray(rows, dtype=float)
    N = rows.shape[0]
    if K < 1 or K > N:
        raise ValueError(f"K={K} out of range for {N} rows")
    if np.unique(rows, axis=0).shape[0] < K:
        raise ValueError(f"fewer than K={K} distinct rows")
    rng = np.random.default_rng(seed)
    best_labels = None
    best_inertia = np.inf
    for _ in range(KMEANS_RESTARTS):
        centers = _furthest_point_init(rows, K, int(rng.integers(N)))
        labels, inertia = _lloyd(rows, centers)
        if inertia < best_inertia:
            best_inertia = inertia
            best_labels = labels
    return Labeling(best_labels, K)


def _furthest_point_init(rows: np.ndarray, K: int, first: int) -> np.ndarray:
    centers = [rows[first]]
    d2 = np.sum((rows - centers[0]) ** 2, axis=1)
    for _ in range(K - 1):
        nxt = int(np.argmax(d2))  # argmax takes the lowest index on ties
        centers.append(rows[nxt])
        d2 = np.minimum(d2, np.sum((rows - centers[-1]) ** 2, axis=1))
    return np.array(centers)


def _lloyd(rows: np.ndarray, centers: np.ndarray):
    N, K = rows.shape[0], centers.shape[0]
    labels = np.full(N, -1, dtype=int)
    for _ in range(KMEANS_MAX_ITER):
        d2 = np.sum((rows[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        new_labels = np.argmin(d2, axis=1)
        # Repopulate empty clusters with the point furthest from its center.
        for k in range(K):
            if not np.any(new_labels == k):
                worst = int(np.argmax(d2[np.arange(N), new_labels]))
                new_labels[worst] = k
                centers[k] = rows[worst]
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for k in range(K):
            centers[k] = rows[labels == k].mean(axis=0)
    d2 = np.sum((rows - centers[labels]) ** 2, axis=1)
    return labels, float(d2.sum())


def spectral_embedding(A, K: int) -> np.ndarray:
    """Rows of the (N, K) spectral embedding: eigenvectors of the K smallest
    eigenvalues of the symmetric normalized Laplacian, row-normalized."""
    V = np.asarray(getattr(A, "values", A), dtype=float)
    N = V.shape[0]
    if K > N:
        raise ValueError(f"K={K} exceeds N={N}")
    W = V.copy()
    np.fill_diagonal(W, 0.0)  # no self-affinity in the graph
    if not np.any(W > 0):
        raise ValueError("affinity has no positive off-diagonal entries")
    deg = W.sum(axis=1)
    inv_sqrt = np.zeros(N)
    nz = deg > 0
    inv_sqrt[nz] = 1.0 / np.sqrt(deg[nz])  # isolated vertices stay at 0
    L = np.eye(N) - (inv_sqrt[:, None] * W) * inv_sqrt[None, :]
    L = (L + L.T) / 2.0
    _, vecs = eigh(L, subset_by_index=[0, K - 1])
    norms = np.linalg.norm(vecs, axis=1)
    nz = norms > 0
    vecs[nz] = vecs[nz] / norms[nz, None]
    return vecs


def spectral_clustering(A, K: int, seed) -> Labeling:
    """Cluster an affinity matrix into K groups.

    Deterministic for fixed (A, K, seed); internally runs kmeans on the
    normalized spectral embedding.
    """
    if K < 2:
        raise ValueError("K must be >= 2")
    return kmeans(spectral_embedding(A, K), K, seed)
