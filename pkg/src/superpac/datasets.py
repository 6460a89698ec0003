"""Dataset containers, synthetic union-of-subspaces generation, CSV ingestion,
and the named benchmark presets."""
from __future__ import annotations

import csv as _csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import Subspace, _fix_signs


@dataclass
class DataMatrix:
    """N points in R^D, stored as columns, with optional ground truth.

    ``image_meta`` is (width, height, channels) when the points are flattened
    images the labeling UI should render.
    """

    points: np.ndarray
    truth: np.ndarray | None = None
    image_meta: tuple | None = None
    name: str = ""

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise ValueError("points must be a D x N matrix")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        self.points = pts
        if self.truth is not None:
            t = np.asarray(self.truth, dtype=int)
            if t.shape != (pts.shape[1],):
                raise ValueError("truth labels must have one entry per point")
            self.truth = t
        if self.image_meta is not None:
            w, h, c = self.image_meta
            if w * h * c != pts.shape[0]:
                raise ValueError("image_meta does not multiply out to D")
            self.image_meta = (int(w), int(h), int(c))

    @property
    def n(self) -> int:
        return self.points.shape[1]

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters for a synthetic union-of-subspaces draw."""

    K: int
    d: int
    D: int
    points_per_cluster: int
    sigma: float = 0.0
    seed: int = 0
    # (phi_1 target in radians, avg_sin2 target); None -> independent random bases
    min_angle_control: tuple | None = None

    def __post_init__(self):
        if self.d >= self.D:
            raise ValueError("d must be < D")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")


def _random_basis(D: int, d: int, rng) -> np.ndarray:
    Q, _ = np.linalg.qr(rng.standard_normal((D, d)))
    return _fix_signs(Q)


def controlled_pair(D: int, d: int, phi1: float, avg_sin2: float, rng):
    """Two d-dim subspaces of R^D with smallest principal angle ``phi1`` and
    mean squared angle sine ``avg_sin2``.

    The second basis shares direction structure with the first: its first
    vector is tilted by phi1, the remaining d-1 by a common angle chosen so
    the sin^2 average hits the target.
    """
    if D < 2 * d:
        raise ValueError("controlled construction needs D >= 2d")
    Q = _random_basis(D, 2 * d, rng)
    U1 = Q[:, :d]
    U2 = _tilt_basis(U1, Q[:, d:], phi1, avg_sin2)
    return Subspace(U1), Subspace(U2)


def _tilt_sines(d: int, phi1: float, avg_sin2: float) -> np.ndarray:
    """Per-direction angle sines realizing (phi1, avg_sin2); first angle is
    phi1, the remaining d-1 share a common larger angle."""
    s1 = np.sin(phi1) ** 2
    if avg_sin2 < s1 - 1e-12:
        raise ValueError("target avg_sin2 smaller than target sin^2(phi1): infeasible")
    if d == 1:
        if abs(avg_sin2 - s1) > 1e-9:
            raise ValueError("with d=1 avg_sin2 must equal sin^2(phi1)")
        return np.array([np.sin(phi1)])
    s_rest = (d * avg_sin2 - s1) / (d - 1)
    if s_rest > 1.0 + 1e-12:
        raise ValueError("target avg_sin2 too large for the given phi1")
    if s_rest < s1 - 1e-12:
        raise ValueError("required common angle below phi1: infeasible ordering")
    rest = np.full(d - 1, np.sqrt(np.clip(s_rest, 0.0, 1.0)))
    return np.concatenate(([np.sin(phi1)], rest))


def _tilt_basis(U1: np.ndarray, W: np.ndarray, phi1: float, avg_sin2: float) -> np.ndarray:
    """Rotate each column of U1 toward the matching column of the orthonormal
    complement W by the angles from _tilt_sines."""
    d = U1.shape[1]
    sines = _tilt_sines(d, phi1, avg_sin2)
    cosines = np.sqrt(np.clip(1.0 - sines ** 2, 0.0, 1.0))
    return U1 * cosines[None, :] + W * sines[None, :]


def _complement_basis(U1: np.ndarray, d: int, rng) -> np.ndarray:
    """Random orthonormal d-frame in the orthogonal complement of span(U1)."""
    D = U1.shape[0]
    G = rng.standard_normal((D, d))
    G = G - U1 @ (U1.T @ G)
    Q, _ = np.linalg.qr(G)
    return Q


def generate_uos(spec: SyntheticSpec):
    """Sample a synthetic union-of-subspaces dataset.

    Returns (DataMatrix with truth labels, list of generating Subspaces).
    Points are U_k w with w ~ N(0, I_d / d), plus N(0, sigma^2 I_D) noise.
    """
    rng = np.random.default_rng(spec.seed)
    if spec.min_angle_control is None:
        bases = [Subspace(_random_basis(spec.D, spec.d, rng)) for _ in range(spec.K)]
    else:
        phi1, target = spec.min_angle_control
        S1, S2 = controlled_pair(spec.D, spec.d, float(phi1), float(target), rng)
        bases = [S1, S2]
        while len(bases) < spec.K:
            # further clusters carry the same angular relation to the first
            W = _complement_basis(S1.basis, spec.d, rng)
            bases.append(Subspace(_tilt_basis(S1.basis, W, float(phi1), float(target))))
        bases = bases[: spec.K]
    cols = []
    labels = []
    for k, S in enumerate(bases):
        W = rng.standard_normal((spec.d, spec.points_per_cluster)) / np.sqrt(spec.d)
        Xk = S.basis @ W
        if spec.sigma > 0:
            Xk = Xk + spec.sigma * rng.standard_normal(Xk.shape)
        cols.append(Xk)
        labels.extend([k] * spec.points_per_cluster)
    X = np.concatenate(cols, axis=1)
    return (
        DataMatrix(X, truth=np.array(labels, dtype=int), name=f"synthetic-K{spec.K}"),
        bases,
    )


def load_csv(path, normalize: bool = False, image_meta=None, name: str = "") -> DataMatrix:
    """Load a rectangular numeric CSV (rows = samples) as a DataMatrix."""
    rows = []
    width = None
    with open(path, newline="") as f:
        for lineno, row in enumerate(_csv.reader(f), start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            try:
                vals = [float(c) for c in row]
            except ValueError:
                raise ValueError(f"{path}: non-numeric cell on line {lineno}")
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise ValueError(
                    f"{path}: ragged row on line {lineno} "
                    f"({len(vals)} cells, expected {width})"
                )
            rows.append(vals)
    if not rows:
        raise ValueError(f"{path}: empty data file")
    pts = np.array(rows, dtype=float).T  # columns are points
    if normalize:
        norms = np.linalg.norm(pts, axis=0)
        zero = np.where(norms == 0)[0]
        if zero.size:
            raise ValueError(f"{path}: cannot normalize zero point {int(zero[0])}")
        pts = pts / norms
    return DataMatrix(pts, image_meta=image_meta, name=name or str(path))


def load_labels(path) -> np.ndarray:
    """Load one nonnegative integer label per line."""
    labels = []
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                v = int(line)
            except ValueError:
                raise ValueError(f"{path}: non-integer label on line {lineno}")
            if v < 0:
                raise ValueError(f"{path}: negative label on line {lineno}")
            labels.append(v)
    return np.array(labels, dtype=int)


def load_manifest(path) -> DataMatrix:
    """Load a dataset described by a manifest JSON:
    {name, data_path, labels_path?, image_meta?, normalize}."""
    path = Path(path)
    with open(path) as f:
        m = json.load(f)
    base = path.parent
    meta = tuple(m["image_meta"]) if m.get("image_meta") else None
    X = load_csv(
        base / m["data_path"],
        normalize=bool(m.get("normalize", False)),
        image_meta=meta,
        name=m.get("name", path.stem),
    )
    if m.get("labels_path"):
        truth = load_labels(base / m["labels_path"])
        if truth.shape != (X.n,):
            raise ValueError(f"{path}: labels length {truth.size} != N={X.n}")
        X.truth = truth
    return X


@dataclass(frozen=True)
class Preset:
    """Benchmark parameterization: cluster count(s), subspace dimension,
    ambient dimension, and sample count (or range)."""

    name: str
    K: tuple
    d: int
    D: int
    N: tuple
    # known alternative subspace dimension used in parts of the literature
    d_alternate: int | None = None


_PRESETS = {
    "yale": Preset("yale", K=(5, 10, 38), d=9, D=2016, N=(320, 2432)),
    "mnist": Preset("mnist", K=(5, 10), d=3, D=784, N=(500, 1000)),
    "coil20": Preset("coil20", K=(20,), d=9, D=1024, N=(1440,)),
    "coil100": Preset("coil100", K=(100,), d=9, D=1024, N=(7200,)),
    "usps": Preset("usps", K=(10,), d=15, D=256, N=(9298,), d_alternate=9),
    "synthetic-small": Preset("synthetic-small", K=(3,), d=2, D=30, N=(150,)),
}


def preset(name: str) -> Preset:
    """Named dataset configuration; raises with the valid names on a typo."""
    try:
        return _PRESETS[name]
    except KeyError:
        raise ValueError(
            f"unknown preset {name!r}; valid presets: {', '.join(sorted(_PRESETS))}"
        )
