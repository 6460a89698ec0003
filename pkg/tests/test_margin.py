import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superpac import Subspace, margin_of, margin_table, max_margin_point, min_margin_point
from superpac.margin import min_margin_from_table

X_AXIS = Subspace(np.array([1.0, 0.0]))
Y_AXIS = Subspace(np.array([0.0, 1.0]))


def test_hand_computed_margin():
    # [DERIVED] point (2, 1): distance 1 to the x-axis, 2 to the y-axis
    mu, k, j = margin_of(np.array([2.0, 1.0]), [X_AXIS, Y_AXIS])
    assert mu == pytest.approx(0.5, abs=1e-12)
    assert (k, j) == (0, 1)


def test_equidistant_point_has_zero_margin():
    mu, _, _ = margin_of(np.array([1.0, 1.0]), [X_AXIS, Y_AXIS])
    assert mu == pytest.approx(0.0, abs=1e-12)


def test_on_subspace_point_has_margin_one():
    mu, k, _ = margin_of(np.array([3.0, 0.0]), [X_AXIS, Y_AXIS])
    assert mu == 1.0 and k == 0


def test_point_on_two_subspaces_is_ambiguous():
    # the origin lies on both subspaces: maximally ambiguous by convention
    mu, _, _ = margin_of(np.zeros(2), [X_AXIS, Y_AXIS])
    assert mu == 0.0


def test_requires_two_subspaces():
    with pytest.raises(ValueError):
        margin_of(np.array([1.0, 0.0]), [X_AXIS])


def test_nearest_tie_goes_to_lowest_index():
    # distances (1, 1, 1): nearest is index 0, second-nearest is index 1
    mu, k, j = margin_of(np.array([1.0, 1.0]), [X_AXIS, Y_AXIS, X_AXIS])
    assert (k, j) == (0, 1)
    assert mu == 0.0


def test_margin_table_matches_pointwise():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((2, 25))
    subs = [X_AXIS, Y_AXIS]
    table = margin_table(X, subs)
    for i in range(25):
        mu, k, j = margin_of(X[:, i], subs)
        assert table.margins[i] == pytest.approx(mu, abs=1e-12)
        assert table.nearest[i] == k
        assert table.second[i] == j


def test_min_margin_point_and_exclusion():
    X = np.array([[2.0, 1.0, 3.0], [1.0, 1.0, 0.1]])  # margins: 0.5, 0.0, ~0.967
    subs = [X_AXIS, Y_AXIS]
    assert min_margin_point(X, subs) == 1
    assert min_margin_point(X, subs, excluded={1}) == 0
    with pytest.raises(ValueError):
        min_margin_point(X, subs, excluded={0, 1, 2})


def test_min_margin_tie_takes_lowest_index():
    X = np.array([[1.0, 2.0, 1.0], [1.0, 2.0, 1.0]])  # all margin 0
    table = margin_table(X, [X_AXIS, Y_AXIS])
    assert min_margin_from_table(table) == 0


def test_max_margin_point():
    X = np.array([[2.0, 1.0, 3.0], [1.0, 1.0, 0.1]])
    table = margin_table(X, [X_AXIS, Y_AXIS])
    assert max_margin_point([0, 1, 2], table) == 2
    assert max_margin_point([1, 0], table) == 0  # order of indices is irrelevant
    with pytest.raises(ValueError):
        max_margin_point([], table)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.floats(0.01, 1000.0))
def test_margin_in_unit_interval_and_scale_invariant(seed, scale):
    rng = np.random.default_rng(seed)
    subs = []
    for _ in range(3):
        Q, _ = np.linalg.qr(rng.standard_normal((8, 2)))
        subs.append(Subspace(Q))
    x = rng.standard_normal(8)
    mu, _, _ = margin_of(x, subs)
    assert 0.0 <= mu <= 1.0
    mu_scaled, _, _ = margin_of(scale * x, subs)
    assert mu_scaled == pytest.approx(mu, abs=1e-9)
