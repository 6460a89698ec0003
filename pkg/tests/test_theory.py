import json

import numpy as np
import pytest

from superpac import (
    Subspace,
    gap_condition,
    margin_bounds,
    run_intersection_ordering,
    run_margin_coverage,
    unclipped_margin,
)
from superpac.theory import save_summary


def reference_bounds(sigma, D, d, gamma, epsilon):
    """Independent re-derivation of the concentration interval."""
    s2 = sigma * sigma * (D - d)
    denom = (s2 + gamma * gamma) ** 0.5
    ratio = 1.0 if denom == 0 else (s2 ** 0.5) / denom
    lo = 1.0 - ((1 + epsilon) / (1 - epsilon)) * ratio
    hi = 1.0 - ((1 - epsilon) / (1 + epsilon)) * ratio
    return lo, hi


def test_bounds_match_reference_formula():
    # [DERIVED] second implementation of the same expressions
    for sigma, D, d, gamma, eps in [(0.1, 100, 5, 1.0, 0.1),
                                    (0.05, 200, 5, 0.3, 0.2),
                                    (0.5, 50, 10, 2.0, 0.05)]:
        lo, hi = margin_bounds(sigma, D, d, gamma, eps)
        rlo, rhi = reference_bounds(sigma, D, d, gamma, eps)
        assert lo == pytest.approx(rlo, abs=1e-15)
        assert hi == pytest.approx(rhi, abs=1e-15)
        assert lo <= hi


def test_bounds_epsilon_limit():
    # eps -> 0: both ends converge to 1 - sqrt(s2)/sqrt(s2 + gamma^2)
    lo, hi = margin_bounds(0.1, 100, 5, 1.0, 1e-9)
    center = 1.0 - np.sqrt(0.01 * 95) / np.sqrt(0.01 * 95 + 1.0)
    assert lo == pytest.approx(center, abs=1e-6)
    assert hi == pytest.approx(center, abs=1e-6)


def test_bounds_validation():
    with pytest.raises(ValueError):
        margin_bounds(0.1, 100, 5, 1.0, 0.0)
    with pytest.raises(ValueError):
        margin_bounds(0.1, 100, 5, 1.0, 1.0)
    with pytest.raises(ValueError):
        margin_bounds(0.1, 5, 5, 1.0, 0.1)


def test_unclipped_margin_can_go_negative():
    S1 = Subspace(np.array([1.0, 0.0]))
    S2 = Subspace(np.array([0.0, 1.0]))
    y = np.array([0.1, 2.0])  # much closer to S2
    assert unclipped_margin(y, S1, S2) < 0


def test_gap_condition_hand_values():
    # [DERIVED] beta = ((1-eps)/(1+eps))^4; eps=0.2 -> beta=(2/3)^4=16/81
    beta = (2.0 / 3.0) ** 4
    sigma, D, d = 0.1, 105, 5
    noise = (1 - beta) * sigma ** 2 * (D - d)  # 0.802...
    # gap just above the threshold passes, just below fails
    d1 = 0.0
    d2_pass = (noise + 1e-6) / beta
    d2_fail = (noise - 1e-6) / beta
    assert gap_condition(d1, d2_pass, sigma, D, d, 0.2)
    assert not gap_condition(d1, d2_fail, sigma, D, d, 0.2)
    with pytest.raises(ValueError):
        gap_condition(0.0, 1.0, 0.1, 100, 5, 2.0)


def test_coverage_harness_structure_and_determinism():
    s1 = run_margin_coverage([25, 55], d=5, sigma=0.05, epsilon=0.2,
                             trials=50, seed=1)
    s2 = run_margin_coverage([25, 55], d=5, sigma=0.05, epsilon=0.2,
                             trials=50, seed=1)
    assert s1 == s2
    assert [s["D"] for s in s1["settings"]] == [25, 55]
    for s in s1["settings"]:
        assert 0.0 <= s["coverage"] <= 1.0
        assert s["coverage"] + s["violation_rate"] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        run_margin_coverage([25], 5, 0.05, 0.2, trials=0, seed=0)


def test_ordering_harness_noiseless_reduction():
    # sigma=0, delta=0: x1 sits on the intersection, x2 is generic, so the
    # ordering holds in every trial
    s = run_intersection_ordering(delta=0.0, tau=2.0, phi1=0.0, avg_sin2=0.5,
                                  sigma=0.0, D=40, d=3, trials=100, seed=0)
    assert s["frequency"] == 1.0
    assert s["precondition_failed"] is False


def test_ordering_harness_precondition_flag():
    # delta = 0.7 violates delta < 5/7 - 1/tau for tau = 1.5
    s = run_intersection_ordering(delta=0.7, tau=1.5, phi1=0.0, avg_sin2=0.5,
                                  sigma=0.0, D=40, d=3, trials=10, seed=0)
    assert s["precondition_failed"] is True


def test_ordering_harness_infeasible_placement():
    # requested intersection distance beyond the second principal angle
    with pytest.raises(ValueError, match="infeasible"):
        run_intersection_ordering(delta=3.0, tau=2.0, phi1=0.0, avg_sin2=0.3,
                                  sigma=0.0, D=40, d=3, trials=10, seed=0)


def test_save_summary_files(tmp_path):
    s = run_margin_coverage([25], d=5, sigma=0.05, epsilon=0.2, trials=20, seed=3)
    jp, cp = tmp_path / "s.json", tmp_path / "s.csv"
    save_summary(s, jp, cp)
    assert json.loads(jp.read_text())["kind"] == "margin-coverage"
    lines = cp.read_text().splitlines()
    assert lines[0].startswith("D,d,sigma")
    assert len(lines) == 2

    s = run_intersection_ordering(delta=0.0, tau=2.0, phi1=0.0, avg_sin2=0.5,
                                  sigma=0.0, D=40, d=3, trials=10, seed=0)
    save_summary(s, jp, cp)
    assert json.loads(jp.read_text())["kind"] == "intersection-ordering"
    assert cp.read_text().splitlines()[0].startswith("delta,tau")
