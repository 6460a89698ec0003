"""Subspace margin: confidence of a point's nearest-subspace assignment.

The margin of a point is 1 - r1/r2, where r1 and r2 are its distances to the
closest and second-closest subspaces. A margin of 0 means the point sits on
the decision boundary between two subspaces; a margin of 1 means it lies
exactly on its nearest subspace. Query selection asks about minimum-margin
points; certain-set representatives are maximum-margin points.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Subspace, residuals_to_subspaces


@dataclass(frozen=True)
class MarginTable:
    """Per-point margins plus the indices of the two nearest subspaces."""

    margins: np.ndarray
    nearest: np.ndarray
    second: np.ndarray

    @property
    def n(self) -> int:
        return self.margins.size


def _margin_from_residuals(r: np.ndarray):
    """(margin, k*, j*) from a vector of residuals to >= 2 subspaces."""
    k_star = int(np.argmin(r))  # ties -> lowest index
    r1 = r[k_star]
    rest = r.copy()
    rest[k_star] = np.inf
    j_star = int(np.argmin(rest))
    r2 = rest[j_star]
    if r1 == 0.0:
        # On two subspaces at once: maximally ambiguous. On one only: certain.
        mu = 0.0 if r2 == 0.0 else 1.0
    else:
        mu = 1.0 - r1 / r2
    return float(mu), k_star, j_star


def margin_of(x: np.ndarray, subspaces: list[Subspace]):
    """Margin of a single point; returns (value in [0,1], k*, j*)."""
    if len(subspaces) < 2:
        raise ValueError("margin requires at least 2 subspaces")
    r = np.array([float(np.linalg.norm(x - S.project(np.asarray(x, dtype=float))))
                  for S in subspaces])
    return _margin_from_residuals(r)


def margin_table(X, subspaces: list[Subspace]) -> MarginTable:
    """Margins of every point (columns of X) against a list of subspaces."""
    if len(subspaces) < 2:
        raise ValueError("margin requires at least 2 subspaces")
    pts = np.asarray(getattr(X, "points", X), dtype=float)
    R = residuals_to_subspaces(pts, subspaces)
    margins = np.empty(R.shape[0])
    nearest = np.empty(R.shape[0], dtype=int)
    second = np.empty(R.shape[0], dtype=int)
    for i in range(R.shape[0]):
        margins[i], nearest[i], second[i] = _margin_from_residuals(R[i])
    return MarginTable(margins, nearest, second)


def min_margin_point(X, subspaces: list[Subspace], excluded=()) -> int:
    """Index of the non-excluded point with the smallest margin (ties ->
    lowest index); this is the next query target."""
    table = margin_table(X, subspaces)
    return min_margin_from_table(table, excluded)


def min_margin_from_table(table: MarginTable, excluded=()) -> int:
    mask = np.ones(table.n, dtype=bool)
    for i in excluded:
        mask[i] = False
    if not mask.any():
        raise ValueError("all points are excluded from margin selection")
    masked = np.where(mask, table.margins, np.inf)
    return int(np.argmin(masked))


def max_margin_point(indices, table: MarginTable) -> int:
    """Member of ``indices`` with the largest margin (ties -> lowest index)."""
    idx = sorted(int(i) for i in indices)
    if not idx:
        raise ValueError("cannot pick a representative from an empty set")
    vals = table.margins[idx]
    return idx[int(np.argmax(vals))]
