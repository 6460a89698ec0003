"""Affinity matrix construction, normalization, I/O, and constraint imputation.

The affinity matrix is the single data structure the active loop edits: it is
normalized once on input so its maximum entry is exactly 2, after which
must-link pairs are overwritten with 1 and cannot-link pairs with 0 (imputing
the maximum value instead is known to destabilize spectral clustering).
"""
from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass, field

import numpy as np

_SPAF_MAGIC = b"SPAF"


@dataclass
class Affinity:
    """Symmetric nonnegative N x N similarity matrix with imputation bookkeeping.

    ``imputed_one`` / ``imputed_zero`` hold the unordered index pairs that have
    been overwritten with must-link (1) / cannot-link (0) values.
    """

    values: np.ndarray
    imputed_one: set = field(default_factory=set)
    imputed_zero: set = field(default_factory=set)

    def __post_init__(self):
        V = np.asarray(self.values, dtype=float)
        if V.ndim != 2 or V.shape[0] != V.shape[1]:
            raise ValueError(f"affinity must be square, got shape {V.shape}")
        if not np.array_equal(V, V.T):
            raise ValueError("affinity must be exactly symmetric")
        if np.any(V < 0):
            raise ValueError("affinity entries must be nonnegative")
        self.values = V
        if self.imputed_one & self.imputed_zero:
            raise ValueError("imputed_one and imputed_zero must be disjoint")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def copy(self) -> "Affinity":
        return Affinity(self.values.copy(), set(self.imputed_one), set(self.imputed_zero))


def build_tsc(X, q: int) -> Affinity:
    """Thresholded spherical-distance affinity.

    For each point, keep the q largest values of |<x_i/|x_i|, x_j/|x_j|>| over
    j != i and weight them by exp(-2 * arccos(|cos|)); everything else is 0.
    The result is symmetrized by averaging with its transpose.
    """
    pts = np.asarray(getattr(X, "points", X), dtype=float)
    N = pts.shape[1]
    if q >= N:
        raise ValueError(f"q={q} must be smaller than the number of points N={N}")
    if q < 1:
        raise ValueError("q must be >= 1")
    norms = np.linalg.norm(pts, axis=0)
    zero = np.where(norms == 0)[0]
    if zero.size:
        raise ValueError(f"point {int(zero[0])} has zero norm")
    Xn = pts / norms
    C = np.abs(Xn.T @ Xn)
    np.fill_diagonal(C, -1.0)  # exclude self from the top-q selection
    A = np.zeros((N, N))
    for i in range(N):
        keep = np.argpartition(C[i], N - q)[N - q:]
        A[i, keep] = np.exp(-2.0 * np.arccos(np.clip(C[i, keep], 0.0, 1.0)))
    return Affinity((A + A.T) / 2.0)


def default_tsc_q(n_points: int, n_clusters: int) -> int:
    """Default neighborhood size for build_tsc."""
    return max(3, int(np.ceil(n_points / (5.0 * n_clusters))))


def normalize_max2(A: Affinity) -> Affinity:
    """Scale the matrix so its maximum entry is exactly 2."""
    m = float(A.values.max())
    if m <= 0:
        raise ValueError("cannot normalize an all-zero affinity matrix")
    return Affinity(A.values * (2.0 / m), set(A.imputed_one), set(A.imputed_zero))


def impute(A: Affinity, Z) -> Affinity:
    """Overwrite affinity entries from the certain sets.

    Pairs within one certain set get value 1, pairs across two different
    certain sets get 0; entries touching a point absent from every set are
    left untouched. Returns a new Affinity; idempotent for fixed Z.
    """
    sets = [list(s) for s in getattr(Z, "sets", Z)]
    seen: set[int] = set()
    for s in sets:
        if not s:
            raise ValueError("certain sets must be nonempty")
        ss = set(s)
        if ss & seen:
            raise ValueError("certain sets must be disjoint")
        seen |= ss
    if seen and (min(seen) < 0 or max(seen) >= A.n):
        raise ValueError("certain-set index out of range")
    out = A.copy()
    V = out.values
    for a, sa in enumerate(sets):
        for i_pos, i in enumerate(sa):
            for j in sa[i_pos + 1:]:
                V[i, j] = V[j, i] = 1.0
                out.imputed_one.add((min(i, j), max(i, j)))
        for sb in sets[a + 1:]:
            for i in sa:
                for j in sb:
                    V[i, j] = V[j, i] = 0.0
                    out.imputed_zero.add((min(i, j), max(i, j)))
    return out


def _validate_loaded(M: np.ndarray, path) -> Affinity:
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{path}: affinity must be square, got shape {M.shape}")
    bad = np.argwhere(np.isnan(M))
    if bad.size:
        r, c = bad[0]
        raise ValueError(f"{path}: NaN entry at row {r}, col {c}")
    bad = np.argwhere(M < 0)
    if bad.size:
        r, c = bad[0]
        raise ValueError(f"{path}: negative entry at row {r}, col {c}")
    if not np.array_equal(M, M.T):
        warnings.warn(f"{path}: affinity not symmetric; symmetrizing by (A + A^T)/2")
        M = (M + M.T) / 2.0
    return Affinity(M)


def save_affinity(A: Affinity, path) -> None:
    """Write an affinity matrix; '.spaf' selects the binary format, anything
    else gets CSV (full float64 precision)."""
    path = str(path)
    if path.endswith(".spaf"):
        with open(path, "wb") as f:
            f.write(_SPAF_MAGIC)
            f.write(struct.pack("<Q", A.n))
            f.write(np.ascontiguousarray(A.values, dtype="<f8").tobytes())
    else:
        np.savetxt(path, A.values, delimiter=",", fmt="%.17g")


def load_affinity(path) -> Affinity:
    """Read an affinity matrix (CSV or SPAF binary, sniffed by magic bytes)."""
    path = str(path)
    with open(path, "rb") as f:
        head = f.read(4)
        if head == _SPAF_MAGIC:
            (n,) = struct.unpack("<Q", f.read(8))
            raw = np.frombuffer(f.read(), dtype="<f8")
            if raw.size != n * n:
                raise ValueError(
                    f"{path}: expected {n * n} values for N={n}, found {raw.size}"
                )
            return _validate_loaded(raw.reshape(n, n).astype(float), path)
    try:
        M = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as e:
        raise ValueError(f"{path}: could not parse as CSV matrix: {e}") from e
    return _validate_loaded(M, path)
