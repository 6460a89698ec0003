"""Monte Carlo verification of the margin concentration bounds.

For a noisy point y = x + n with x on subspace S1, the unclipped margin
mu(y) = 1 - dist(y,S1)/dist(y,S2) concentrates inside a closed-form interval
determined by sigma, the codimension D-d, and gamma = dist(x,S2). The
harnesses here measure empirical coverage of that interval, the ordering
probability for a point near the intersection of two subspaces versus a
generic point, and the noise-dependent distance-gap condition implied by the
bounds.
"""
from __future__ import annotations

import csv as _csv
import json
from dataclasses import dataclass

import numpy as np

from .datasets import _complement_basis, _random_basis, _tilt_basis, _tilt_sines
from .geometry import Subspace, residual


def unclipped_margin(y: np.ndarray, S1: Subspace, S2: Subspace) -> float:
    """1 - dist(y,S1)/dist(y,S2); may be negative when y is closer to S2
    (unlike the clipped operational margin used for query selection)."""
    return 1.0 - residual(y, S1) / residual(y, S2)


def margin_bounds(sigma: float, D: int, d: int, gamma: float, epsilon: float):
    """Closed-form concentration interval for the unclipped margin.

    Returns (lower, upper) with
        lower = 1 - (1+eps) sqrt(s2) / ((1-eps) sqrt(s2 + gamma^2))
        upper = 1 - (1-eps) sqrt(s2) / ((1+eps) sqrt(s2 + gamma^2))
    where s2 = sigma^2 (D - d).
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if D <= d:
        raise ValueError("D must exceed d")
    s2 = sigma ** 2 * (D - d)
    den = np.sqrt(s2 + gamma ** 2)
    ratio = 1.0 if den == 0 else np.sqrt(s2) / den
    lower = 1.0 - (1.0 + epsilon) / (1.0 - epsilon) * ratio
    upper = 1.0 - (1.0 - epsilon) / (1.0 + epsilon) * ratio
    return float(lower), float(upper)


def gap_condition(dist1_sq: float, dist2_sq: float, sigma: float,
                  D: int, d: int, epsilon: float) -> bool:
    """Whether the squared-distance gap is large enough, relative to the noise
    level, to order the two margins with high probability:
    beta * dist2^2 - dist1^2 > (1 - beta) sigma^2 (D - d), with
    beta = ((1-eps)/(1+eps))^4."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    beta = ((1.0 - epsilon) / (1.0 + epsilon)) ** 4
    return bool(beta * dist2_sq - dist1_sq > (1.0 - beta) * sigma ** 2 * (D - d))


def _trial_rng(seed, setting: int, trial: int):
    return np.random.default_rng(
        np.random.SeedSequence(entropy=int(seed), spawn_key=(setting, trial))
    )


@dataclass(frozen=True)
class CoverageSetting:
    D: int
    d: int
    sigma: float
    epsilon: float
    trials: int
    coverage: float
    violation_rate: float


def run_margin_coverage(D_values, d: int, sigma: float, epsilon: float,
                        trials: int, seed: int) -> dict:
    """Empirical coverage of the margin concentration interval over a sweep
    of ambient dimensions.

    Each trial draws two independent random subspaces, a point x = U1 w with
    w ~ N(0, I/d) (its distance to S2 recorded as gamma), and a noisy
    observation y = x + n; the trial passes when mu(y) lands inside the
    closed-form interval for that gamma. Also emits a log-linear fit of
    log(violation rate) against eps^2 (D - d), whose negated slope estimates
    the absolute constant in the exponential tail.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    settings = []
    for si, D in enumerate(D_values):
        hits = 0
        for t in range(trials):
            rng = _trial_rng(seed, si, t)
            S1 = Subspace(_random_basis(D, d, rng))
            S2 = Subspace(_random_basis(D, d, rng))
            w = rng.standard_normal(d) / np.sqrt(d)
            x = S1.basis @ w
            gamma = residual(x, S2)
            y = x + sigma * rng.standard_normal(D)
            mu = unclipped_margin(y, S1, S2)
            lo, hi = margin_bounds(sigma, D, d, gamma, epsilon)
            if lo <= mu <= hi:
                hits += 1
        cov = hits / trials
        settings.append(
            CoverageSetting(D=int(D), d=d, sigma=sigma, epsilon=epsilon,
                            trials=trials, coverage=cov,
                            violation_rate=1.0 - cov)
        )
    # tail-constant fit over settings with a nonzero violation rate
    xs = [epsilon ** 2 * (s.D - s.d) for s in settings if s.violation_rate > 0]
    ys = [np.log(s.violation_rate) for s in settings if s.violation_rate > 0]
    fit_c = None
    if len(xs) >= 2:
        slope, _ = np.polyfit(xs, ys, 1)
        fit_c = float(-slope)
    return {
        "kind": "margin-coverage",
        "d": d,
        "sigma": sigma,
        "epsilon": epsilon,
        "trials": trials,
        "seed": int(seed),
        "settings": [s.__dict__ for s in settings],
        "tail_constant_estimate": fit_c,
    }


def run_intersection_ordering(delta: float, tau: float, phi1: float,
                              avg_sin2: float, sigma: float, D: int, d: int,
                              trials: int, seed: int) -> dict:
    """Empirical frequency of mu(y1) < mu(y2) for a point near the
    intersection of two subspaces (y1) versus a generic point (y2).

    Subspace pairs are constructed with smallest principal angle ``phi1`` and
    mean squared angle sine ``avg_sin2``; x1 is placed at squared distance
    sin^2(phi1) + delta * avg_sin2 from S2, x2 = U1 w with isotropic Gaussian
    weights. The precondition (delta < 5/7 - 1/tau and
    tau (sin^2 phi1 + sigma^2 (D-d)/6) < avg_sin2) is reported, not enforced.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    s = avg_sin2
    s1 = np.sin(phi1) ** 2
    precondition_ok = (
        tau > 1.0
        and delta < 5.0 / 7.0 - 1.0 / tau
        and tau * (s1 + sigma ** 2 * (D - d) / 6.0) < s
    )
    target = s1 + delta * s
    sines2 = _tilt_sines(d, phi1, s) ** 2
    if d >= 2 and target > sines2[1] + 1e-12:
        raise ValueError(
            "requested intersection distance exceeds the second angle; "
            "infeasible placement for x1"
        )
    ordered = 0
    for t in range(trials):
        rng = _trial_rng(seed, 0, t)
        U1 = _random_basis(D, d, rng)
        W = _complement_basis(U1, d, rng)
        U2 = _tilt_basis(U1, W, phi1, s)
        S1, S2 = Subspace(U1), Subspace(U2)
        # unit x1 mixing the phi1 direction with the next to hit the target
        if d == 1 or target <= s1 + 1e-15:
            x1 = U1[:, 0]
        else:
            b2 = (target - s1) / (sines2[1] - s1)
            x1 = np.sqrt(1.0 - b2) * U1[:, 0] + np.sqrt(b2) * U1[:, 1]
        w = rng.standard_normal(d) / np.sqrt(d)
        x2 = U1 @ w
        y1 = x1 + sigma * rng.standard_normal(D)
        y2 = x2 + sigma * rng.standard_normal(D)
        if unclipped_margin(y1, S1, S2) < unclipped_margin(y2, S1, S2):
            ordered += 1
    return {
        "kind": "intersection-ordering",
        "delta": delta,
        "tau": tau,
        "phi1": phi1,
        "avg_sin2": s,
        "sigma": sigma,
        "D": D,
        "d": d,
        "trials": trials,
        "seed": int(seed),
        "frequency": ordered / trials,
        "precondition_failed": not precondition_ok,
    }


def summary_to_csv(summary: dict, path) -> None:
    """Flatten a harness summary into a CSV table for plotting."""
    with open(path, "w", newline="") as f:
        writer = _csv.writer(f)
        if summary["kind"] == "margin-coverage":
            writer.writerow(["D", "d", "sigma", "epsilon", "trials",
                            "coverage", "violation_rate"])
            for s in summary["settings"]:
                writer.writerow([s["D"], s["d"], s["sigma"], s["epsilon"],
                                 s["trials"], s["coverage"], s["violation_rate"]])
        else:
            keys = ["delta", "tau", "phi1", "avg_sin2", "sigma", "D", "d",
                    "trials", "frequency", "precondition_failed"]
            writer.writerow(keys)
            writer.writerow([summary[k] for k in keys])


def save_summary(summary: dict, json_path, csv_path=None) -> None:
    with open(json_path, "w") as f:
        json.dump(summary, f, indent=2)
    if csv_path is not None:
        summary_to_csv(summary, csv_path)
