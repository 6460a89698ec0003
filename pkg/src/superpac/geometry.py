"""Subspace primitives: PCA fitting, residual distances, principal angles.

Everything downstream (margins, oracles, the theory harness) is built on the
three operations in this module, so the conventions are pinned here once:
bases are column-orthonormal ``D x d`` matrices, subspaces pass through the
origin, and PCA is an uncentered SVD of the points-as-columns matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Relative singular-value cutoff for deciding the numerical rank of a cluster.
_RANK_RTOL = 1e-12


@dataclass(frozen=True)
class Subspace:
    """A d-dimensional linear subspace of R^D with an orthonormal basis.

    Attributes
    ----------
    basis : (D, d) ndarray
        Column-orthonormal basis.
    """

    basis: np.ndarray

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=float)
        if basis.ndim == 1:
            basis = basis[:, None]
        object.__setattr__(self, "basis", basis)
        D, d = basis.shape
        if d > D:
            raise ValueError(f"subspace dim {d} exceeds ambient dim {D}")
        gram = basis.T @ basis
        if np.max(np.abs(gram - np.eye(d))) > 1e-10:
            raise ValueError("basis columns are not orthonormal")

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def project(self, x: np.ndarray) -> np.ndarray:
        """Orthogonal projection of x onto the subspace."""
        return self.basis @ (self.basis.T @ x)


@dataclass(frozen=True)
class PrincipalAngleProfile:
    """Principal angles between two equal-dimension subspaces.

    ``angles`` is nondecreasing in [0, pi/2]; ``avg_sin2`` is the normalized
    squared chordal distance (mean of sin^2 over the angles), 0 for identical
    subspaces and 1 for orthogonal ones.
    """

    angles: np.ndarray
    avg_sin2: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=float)
        if np.any(np.diff(angles) < 0):
            raise ValueError("angles must be nondecreasing")
        if np.any(angles < 0) or np.any(angles > np.pi / 2 + 1e-12):
            raise ValueError("angles must lie in [0, pi/2]")
        object.__setattr__(self, "angles", angles)
        avg = float(np.mean(np.sin(angles) ** 2))
        if self.avg_sin2 is None:
            object.__setattr__(self, "avg_sin2", avg)
        elif abs(self.avg_sin2 - avg) > 1e-10:
            raise ValueError("avg_sin2 inconsistent with angles")


def _fix_signs(U: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry of each column positive (reproducible
    SVD output regardless of LAPACK sign choices)."""
    U = U.copy()
    for j in range(U.shape[1]):
        k = int(np.argmax(np.abs(U[:, j])))
        if U[k, j] < 0:
            U[:, j] = -U[:, j]
    return U


def fit_pca(points, d: int) -> Subspace:
    """Fit the best d-dimensional subspace through the origin to a cluster.

    Parameters
    ----------
    points : sequence of D-vectors or (D, n) ndarray
        Points as columns (a list of vectors is stacked column-wise).
    d : int
        Requested subspace dimension.

    Returns the span of the top ``min(d, numerical rank)`` left singular
    vectors. Rank-deficient clusters come back with a reduced dimension
    rather than erroring, so tiny clusters produced mid-run stay usable.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    if isinstance(points, np.ndarray):
        M = np.asarray(points, dtype=float)
        if M.ndim == 1:
            M = M[:, None]
    else:
        seq = list(points)
        if not seq:
            raise ValueError("cannot fit a subspace to an empty cluster")
        # list of vectors -> columns
        M = np.column_stack([np.asarray(p, dtype=float) for p in seq])
    if M.size == 0 or M.shape[1] == 0:
        raise ValueError("cannot fit a subspace to an empty cluster")
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    rank = int(np.sum(s > (s[0] * _RANK_RTOL if s[0] > 0 else np.inf)))
    if rank == 0:
        raise ValueError("cannot fit a subspace to all-zero points")
    keep = min(d, rank)
    return Subspace(_fix_signs(U[:, :keep]))


def residual(x: np.ndarray, S: Subspace) -> float:
    """Distance from x to the subspace: ``||x - U U^T x||_2``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (S.ambient_dim,):
        raise ValueError(
            f"point has dimension {x.shape}, subspace ambient dim is {S.ambient_dim}"
        )
    return float(np.linalg.norm(x - S.project(x)))


def residuals_to_subspaces(X: np.ndarray, subspaces) -> np.ndarray:
    """Residual of every column of X to every subspace, as an (N, K) array."""
    X = np.asarray(X, dtype=float)
    out = np.empty((X.shape[1], len(subspaces)))
    for k, S in enumerate(subspaces):
        proj = S.basis @ (S.basis.T @ X)
        out[:, k] = np.linalg.norm(X - proj, axis=0)
    return out


def principal_angles(S1: Subspace, S2: Subspace) -> PrincipalAngleProfile:
    """Principal angles between two subspaces of equal dimension.

    The angles are ``arccos`` of the singular values of ``U1^T U2`` (clamped
    into [0, 1] against floating-point overshoot); ``avg_sin2`` then equals
    ``1 - ||U1^T U2||_F^2 / d``.
    """
    if S1.ambient_dim != S2.ambient_dim:
        raise ValueError("subspaces live in different ambient dimensions")
    if S1.dim != S2.dim:
        raise ValueError("avg_sin2 requires equal subspace dimensions")
    svals = np.linalg.svd(S1.basis.T @ S2.basis, compute_uv=False)
    svals = np.clip(svals, 0.0, 1.0)
    angles = np.sort(np.arccos(svals))
    return PrincipalAngleProfile(angles=angles)
