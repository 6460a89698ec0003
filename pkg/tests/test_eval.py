import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superpac import SyntheticSpec, generate_uos, misclassification_rate, oracle_pca_labels


def brute_force_rate(est, truth):
    """Exhaustive-permutation misclassification rate (reference oracle)."""
    est = np.asarray(est)
    truth = np.asarray(truth)
    e_ids = sorted(set(est.tolist()))
    t_ids = sorted(set(truth.tolist()))
    best = 0
    if len(e_ids) <= len(t_ids):
        for perm in itertools.permutations(t_ids, len(e_ids)):
            m = dict(zip(e_ids, perm))
            best = max(best, sum(m[a] == b for a, b in zip(est, truth)))
    else:
        for perm in itertools.permutations(e_ids, len(t_ids)):
            m = dict(zip(perm, t_ids))
            best = max(best, sum(m.get(a) == b for a, b in zip(est, truth)))
    return 1.0 - best / est.size


def test_perfect_and_permuted_labelings():
    truth = [0, 0, 1, 1, 2, 2]
    assert misclassification_rate(truth, truth).misclassification_rate == 0.0
    permuted = [2, 2, 0, 0, 1, 1]
    assert misclassification_rate(permuted, truth).misclassification_rate == 0.0


def test_hand_computed_rate():
    # [DERIVED] best matching fixes clusters 0 and 1; one point is off
    est = [0, 0, 0, 1, 1, 1]
    truth = [0, 0, 1, 1, 1, 1]
    rep = misclassification_rate(est, truth)
    assert rep.misclassification_rate == pytest.approx(1 / 6)
    assert rep.matching == {0: 0, 1: 1}
    assert rep.per_cluster_errors == {0: 1, 1: 0}


def test_rectangular_more_estimated_clusters():
    # 3 estimated clusters vs 2 true: one estimated cluster stays unmatched
    est = [0, 0, 1, 1, 2, 2]
    truth = [0, 0, 1, 1, 1, 1]
    rep = misclassification_rate(est, truth)
    assert rep.misclassification_rate == pytest.approx(brute_force_rate(est, truth))


def test_length_mismatch():
    with pytest.raises(ValueError):
        misclassification_rate([0, 1], [0, 1, 1])


def test_matches_exhaustive_permutations():
    rng = np.random.default_rng(123)
    for _ in range(200):
        n = int(rng.integers(4, 30))
        ke = int(rng.integers(1, 5))
        kt = int(rng.integers(1, 5))
        est = rng.integers(0, ke, size=n)
        truth = rng.integers(0, kt, size=n)
        got = misclassification_rate(est, truth).misclassification_rate
        want = brute_force_rate(est, truth)
        assert got == pytest.approx(want, abs=1e-12), (est.tolist(), truth.tolist())


def test_oracle_pca_is_exact_on_clean_data():
    spec = SyntheticSpec(K=4, d=2, D=25, points_per_cluster=30, sigma=0.0, seed=3)
    X, _ = generate_uos(spec)
    lab = oracle_pca_labels(X, 2)
    assert misclassification_rate(lab, X.truth).misclassification_rate == 0.0


def test_oracle_pca_requires_truth(tiny_matrix):
    with pytest.raises(ValueError):
        oracle_pca_labels(tiny_matrix, 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_rate_invariant_under_label_permutation(seed):
    rng = np.random.default_rng(seed)
    n = 20
    est = rng.integers(0, 4, size=n)
    truth = rng.integers(0, 4, size=n)
    base = misclassification_rate(est, truth).misclassification_rate
    perm = rng.permutation(4)
    assert misclassification_rate(perm[est], truth).misclassification_rate == base
