import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superpac import Subspace, fit_pca, principal_angles, residual
from superpac.geometry import PrincipalAngleProfile, residuals_to_subspaces


def test_subspace_rejects_non_orthonormal():
    with pytest.raises(ValueError):
        Subspace(np.array([[1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]))


def test_subspace_rejects_dim_exceeding_ambient():
    with pytest.raises(ValueError):
        Subspace(np.ones((2, 3)))


def test_subspace_accepts_vector_as_line():
    S = Subspace(np.array([1.0, 0.0, 0.0]))
    assert S.dim == 1 and S.ambient_dim == 3


def test_projection_is_idempotent():
    rng = np.random.default_rng(3)
    Q, _ = np.linalg.qr(rng.standard_normal((8, 3)))
    S = Subspace(Q)
    x = rng.standard_normal(8)
    p = S.project(x)
    assert np.allclose(S.project(p), p, atol=1e-12)


def test_fit_pca_recovers_exact_subspace():
    # noiseless points on a known plane -> recovered span matches exactly
    rng = np.random.default_rng(1)
    Q, _ = np.linalg.qr(rng.standard_normal((10, 2)))
    pts = Q @ rng.standard_normal((2, 40))
    S = fit_pca(pts, 2)
    # span equality: projecting the true basis onto the fit leaves nothing
    res = Q - S.basis @ (S.basis.T @ Q)
    assert np.max(np.abs(res)) < 1e-10


def test_fit_pca_accepts_list_of_vectors():
    vecs = [np.array([1.0, 0.0, 0.0]), np.array([2.0, 0.0, 0.0])]
    S = fit_pca(vecs, 1)
    assert np.allclose(np.abs(S.basis.ravel()), [1.0, 0.0, 0.0])


def test_fit_pca_reduces_dimension_on_rank_deficiency():
    # 30 copies of one direction cannot span a plane
    pts = np.outer([1.0, 2.0, 2.0], np.ones(30))
    S = fit_pca(pts, 2)
    assert S.dim == 1


def test_fit_pca_rejects_empty_and_zero():
    with pytest.raises(ValueError):
        fit_pca([], 1)
    with pytest.raises(ValueError):
        fit_pca(np.zeros((4, 5)), 1)
    with pytest.raises(ValueError):
        fit_pca(np.ones((4, 5)), 0)


def test_fit_pca_sign_convention_is_deterministic():
    rng = np.random.default_rng(5)
    pts = rng.standard_normal((6, 30))
    S1 = fit_pca(pts, 3)
    S2 = fit_pca(pts.copy(), 3)
    assert np.array_equal(S1.basis, S2.basis)
    # largest-magnitude entry of each column is positive
    for j in range(S1.basis.shape[1]):
        col = S1.basis[:, j]
        assert col[np.argmax(np.abs(col))] > 0


def test_residual_hand_value():
    # [DERIVED] distance from (3, 4) to the x-axis is 4
    S = Subspace(np.array([1.0, 0.0]))
    assert residual(np.array([3.0, 4.0]), S) == pytest.approx(4.0, abs=1e-12)


def test_residual_dimension_mismatch():
    S = Subspace(np.array([1.0, 0.0, 0.0]))
    with pytest.raises(ValueError):
        residual(np.array([1.0, 0.0]), S)


def test_residuals_to_subspaces_matches_loop():
    rng = np.random.default_rng(9)
    X = rng.standard_normal((7, 11))
    subs = []
    for _ in range(3):
        Q, _ = np.linalg.qr(rng.standard_normal((7, 2)))
        subs.append(Subspace(Q))
    R = residuals_to_subspaces(X, subs)
    assert R.shape == (11, 3)
    for i in range(11):
        for k in range(3):
            assert R[i, k] == pytest.approx(residual(X[:, i], subs[k]), abs=1e-12)


def test_principal_angles_identical_and_orthogonal():
    I4 = np.eye(4)
    S1 = Subspace(I4[:, :2])
    prof = principal_angles(S1, S1)
    assert np.allclose(prof.angles, 0.0, atol=1e-7)
    assert prof.avg_sin2 == pytest.approx(0.0, abs=1e-12)
    S2 = Subspace(I4[:, 2:])
    prof = principal_angles(S1, S2)
    assert np.allclose(prof.angles, np.pi / 2, atol=1e-12)
    assert prof.avg_sin2 == pytest.approx(1.0, abs=1e-12)


def test_principal_angles_hand_value():
    # [DERIVED] lines at 30 degrees in the plane
    theta = np.pi / 6
    S1 = Subspace(np.array([1.0, 0.0]))
    S2 = Subspace(np.array([np.cos(theta), np.sin(theta)]))
    prof = principal_angles(S1, S2)
    assert prof.angles[0] == pytest.approx(theta, abs=1e-12)
    assert prof.avg_sin2 == pytest.approx(np.sin(theta) ** 2, abs=1e-12)


def test_principal_angles_requires_equal_dims():
    S1 = Subspace(np.eye(4)[:, :2])
    S2 = Subspace(np.eye(4)[:, :3])
    with pytest.raises(ValueError):
        principal_angles(S1, S2)


def test_angle_profile_validation():
    with pytest.raises(ValueError):
        PrincipalAngleProfile(angles=np.array([0.5, 0.2]))
    with pytest.raises(ValueError):
        PrincipalAngleProfile(angles=np.array([0.1, 0.2]), avg_sin2=0.9)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.floats(0.1, 100.0))
def test_residual_scales_linearly(seed, scale):
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((6, 2)))
    S = Subspace(Q)
    x = rng.standard_normal(6)
    assert residual(scale * x, S) == pytest.approx(scale * residual(x, S), rel=1e-9)
