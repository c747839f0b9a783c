import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from eofcast.eof import (center_scale, covariance_matrix, decompose, load_model,
                         reconstruct, reconstruct_extended, save_model,
                         spatial_coefficients, svd_eof, truncate_rank, EofModel)
from eofcast.errors import NonFiniteValue, ShapeMismatch


def rel_fro(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)


def test_center_constant_field():
    z, xbar = center_scale(np.full((4, 3), 2.5))
    assert np.all(z == 0)
    assert xbar.tolist() == [2.5, 2.5, 2.5]


def test_center_hand_example():
    z, xbar = center_scale([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_allclose(xbar, [2.0, 3.0])
    r = 1 / np.sqrt(2)
    np.testing.assert_allclose(z, [[-r, -r], [r, r]], atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(1, 12)),
              elements=st.floats(-1e3, 1e3)))
def test_center_properties(x):
    z, xbar = center_scale(x)
    scale = max(np.abs(x).max(), 1.0)
    assert np.abs(z.sum(axis=0)).max() <= 1e-12 * scale * x.shape[0]
    # z.T z equals the centering-matrix covariance
    c = covariance_matrix(x)
    assert np.linalg.norm(z.T @ z - c) <= 1e-9 * max(np.linalg.norm(c), scale ** 2 * 1e-6)


def test_nonfinite_rejected():
    with pytest.raises(NonFiniteValue):
        center_scale([[1.0, np.nan]])


def test_rank_one_field():
    rng = np.random.default_rng(0)
    z = np.outer(rng.normal(size=6), rng.normal(size=9))
    m = svd_eof(z)
    assert np.sum(m.singular_values > 1e-12) == 1
    np.testing.assert_allclose(m.variance_shares, np.r_[1.0, np.zeros(5)], atol=1e-20)


def test_random_orthonormality():
    z = np.random.default_rng(1).normal(size=(5, 8))
    m = svd_eof(z)
    assert m.rank == 5
    assert np.linalg.norm(m.v.T @ m.v - np.eye(5)) < 1e-10
    assert np.linalg.norm(m.u.T @ m.u - np.eye(5)) < 1e-10


def test_shares_equal_squared_singular_values():
    m = decompose(np.random.default_rng(2).normal(size=(7, 4)))
    np.testing.assert_allclose(m.variance_shares, m.singular_values ** 2 / np.sum(m.singular_values ** 2))
    assert abs(m.variance_shares.sum() - 1) < 1e-12
    assert np.all(np.diff(m.singular_values) <= 0)


def test_eigenvectors_of_covariance():
    x = np.random.default_rng(3).normal(size=(10, 6))
    m = decompose(x)
    c = covariance_matrix(x)
    np.testing.assert_allclose(c @ m.v, m.v * m.eigenvalues, atol=1e-10)


def test_sign_convention():
    m = decompose(np.random.default_rng(4).normal(size=(8, 5)))
    idx = np.argmax(np.abs(m.v), axis=0)
    assert np.all(m.v[idx, np.arange(m.rank)] > 0)


@pytest.mark.parametrize("shares,expected", [
    ((0.5, 0.3, 0.15, 0.05), 2),
    ((0.9, 0.1), 1),
    ((0.25, 0.25, 0.25, 0.25), 4),
])
def test_truncate_rank(shares, expected):
    s = np.array(shares)
    m = EofModel(np.zeros(3), np.zeros((3, s.size)), np.sqrt(s), np.zeros((3, s.size)), 3, s)
    assert truncate_rank(m, 0.8) == expected


def test_truncate_full_threshold_stops_at_last_nonzero():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(4, 2)) @ rng.normal(size=(2, 10))   # centred rank <= 2
    m = decompose(x)
    nonzero = np.flatnonzero(m.variance_shares > 1e-20)
    assert truncate_rank(m, 1.0) <= nonzero[-1] + 1
    assert m.explained_variance(truncate_rank(m, 1.0)) >= 1 - 1e-12


def test_truncate_rejects_bad_threshold():
    m = decompose(np.eye(3))
    with pytest.raises(ValueError):
        truncate_rank(m, 0.0)


def test_pc_dual_formula():
    x = np.random.default_rng(6).normal(size=(6, 10))
    z, xbar = center_scale(x)
    m = svd_eof(z, xbar)
    for k in (1, 3, 6):
        alpha = spatial_coefficients(m, k).alpha
        np.testing.assert_allclose(alpha, z @ m.v[:, :k], atol=1e-10)


def test_pc_full_rank_gram():
    m = decompose(np.random.default_rng(7).normal(size=(6, 9)))
    a = spatial_coefficients(m, m.rank).alpha
    np.testing.assert_allclose(a.T @ a, np.diag(m.singular_values ** 2), atol=1e-9)


def test_zero_field_pcs():
    m = svd_eof(np.zeros((4, 5)))
    assert np.all(spatial_coefficients(m, 2).alpha == 0)
    assert np.all(m.variance_shares == 0)


def test_reconstruct_full_and_mean():
    x = np.random.default_rng(8).normal(size=(7, 12)) + 3
    m = decompose(x)
    assert rel_fro(reconstruct(m, m.rank), x) < 1e-9
    mean_field = reconstruct(m, 0)
    np.testing.assert_array_equal(mean_field, np.tile(m.mean_vector, (7, 1)))


def test_reconstruct_rank_one_exact():
    rng = np.random.default_rng(9)
    x = np.outer(rng.normal(size=8), rng.normal(size=15)) + rng.normal(size=15)
    m = decompose(x)
    assert rel_fro(reconstruct(m, 1), x) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 15), st.integers(2, 15), st.integers(0, 2 ** 32 - 1))
def test_error_nonincreasing_in_rank(n, p, seed):
    x = np.random.default_rng(seed).normal(size=(n, p))
    m = decompose(x)
    errors = [np.linalg.norm(reconstruct(m, k) - x) for k in range(m.rank + 1)]
    assert np.all(np.diff(errors) <= 1e-9 * np.linalg.norm(x))


def test_extended_no_horizon_matches_reconstruct():
    m = decompose(np.random.default_rng(10).normal(size=(5, 20)))
    out = reconstruct_extended(m, 3, m.v[:, :3], 0)
    np.testing.assert_array_equal(out, reconstruct(m, 3))


def test_extended_shape_and_history():
    m = decompose(np.random.default_rng(11).normal(size=(5, 20)))
    v_ext = np.vstack([m.v[:, :2], np.ones((4, 2))])
    out = reconstruct_extended(m, 2, v_ext, 4)
    assert out.shape == (5, 24)
    np.testing.assert_array_equal(out[:, :20], reconstruct(m, 2))


def test_extended_shape_errors():
    m = decompose(np.random.default_rng(12).normal(size=(5, 20)))
    with pytest.raises(ShapeMismatch):
        reconstruct_extended(m, 2, np.zeros((22, 3)), 2)
    with pytest.raises(ShapeMismatch):
        reconstruct_extended(m, 2, np.vstack([m.v[:, :2], np.zeros((2, 2))]), 3)
    with pytest.raises(ShapeMismatch):
        reconstruct_extended(m, 2, np.zeros((22, 2)), 2)


def test_extended_with_true_future_eofs():
    """Extending with the true continuation of the EOFs recovers the future field.

    The oracle is the decomposition of the full-length field: a rank-2
    periodic field whose spatial patterns are shared by the training and
    full windows, so the sign-aligned full-window EOFs (rescaled to the
    training singular values) are the exact continuation.
    """
    rng = np.random.default_rng(13)
    n, p, h = 30, 200, 50
    t = np.arange(p + h)
    temporal = np.vstack([np.sin(2 * np.pi * t / 50), np.cos(2 * np.pi * t / 20)])
    spatial = rng.normal(size=(n, 2))
    spatial -= spatial.mean(axis=0)
    full = spatial @ temporal + 5.0
    train = decompose(full[:, :p])
    k = 2
    # least-squares projection of the full-length centred field on the training PCs
    z_full = (full - full[:, :p].mean()) / np.sqrt(n)
    alpha = spatial_coefficients(train, k).alpha
    v_future = np.linalg.lstsq(alpha, z_full[:, p:], rcond=None)[0].T
    v_ext = np.vstack([train.v[:, :k], v_future])
    out = reconstruct_extended(train, k, v_ext, h)
    # the mean over locations of the planted field is the constant 5
    np.testing.assert_allclose(out[:, p:], full[:, p:], atol=1e-9)
    # truncation error bound for the in-sample part
    assert np.linalg.norm(out[:, :p] - full[:, :p]) < 1e-9 * np.linalg.norm(full)


def test_roundtrip_persistence(tmp_path):
    m = decompose(np.random.default_rng(14).normal(size=(6, 9)))
    save_model(m, tmp_path)
    back = load_model(tmp_path)
    for name in ("mean_vector", "u", "singular_values", "v", "variance_shares"):
        np.testing.assert_array_equal(getattr(back, name), getattr(m, name))
    raw = np.fromfile(tmp_path / "u.f64le", dtype="<f8")
    np.testing.assert_array_equal(raw, m.u.ravel())
