import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from dtvtomo.diffops import (DtvParams, divergence, dtv, dtv_matrix, gradient, project_ball,
                             prox_dtv_dual, tv, weighted_gradient, weighted_gradient_adjoint)
from dtvtomo.errors import ParamError


def naive_grad(x, i, j):
    m, n = x.shape
    gi = x[i + 1, j] - x[i, j] if i + 1 < m else 0.0
    gj = x[i, j + 1] - x[i, j] if j + 1 < n else 0.0
    return gi, gj


def naive_tv(x):
    total = 0.0
    for i in range(x.shape[0]):
        for j in range(x.shape[1]):
            gi, gj = naive_grad(x, i, j)
            total += math.sqrt(gi * gi + gj * gj)
    return total


def naive_dtv(x, theta_deg, a):
    c, s = math.cos(math.radians(theta_deg)), math.sin(math.radians(theta_deg))
    total = 0.0
    for i in range(x.shape[0]):
        for j in range(x.shape[1]):
            gi, gj = naive_grad(x, i, j)
            along = gi * c + gj * s
            across = -gi * s + gj * c
            total += math.sqrt(along * along + a * a * across * across)
    return total


def stripes(m, theta_deg, period=6.0):
    th = math.radians(theta_deg)
    i, j = np.mgrid[:m, :m].astype(float)
    w = -i * math.sin(th) + j * math.cos(th)
    return (np.floor(w / period) % 2).astype(float)


def test_tv_hand_example():
    assert tv(np.array([[0.0, 0.0], [1.0, 1.0]])) == 2.0


def test_constant_images_have_zero_variation():
    x = np.full((5, 5), 3.7)
    assert tv(x) == 0.0
    assert dtv(x, DtvParams(33.0, 0.2)) == 0.0


def test_tv_naive_oracle(rng):
    for _ in range(50):
        x = rng.standard_normal((6, 6))
        assert tv(x) == pytest.approx(naive_tv(x), rel=1e-12)


def test_dtv_naive_oracle(rng):
    for _ in range(50):
        x = rng.standard_normal((6, 6))
        assert dtv(x, DtvParams(20.0, 0.15)) == pytest.approx(naive_dtv(x, 20.0, 0.15), rel=1e-12)


def test_dtv_with_unit_width_is_tv(rng):
    for _ in range(50):
        x = rng.standard_normal((6, 6))
        theta = rng.uniform(0, 360)
        assert dtv(x, DtvParams(theta, 1.0)) == pytest.approx(tv(x), rel=1e-12)


def test_gradient_shape_and_boundary():
    g = gradient(np.arange(12.0).reshape(3, 4))
    assert g.shape == (2, 3, 4)
    assert not g[0, -1].any() and not g[1, :, -1].any()
    np.testing.assert_array_equal(g[0, :-1], 4.0)
    np.testing.assert_array_equal(g[1, :, :-1], 1.0)


def test_single_dual_entry_gives_two_pixels():
    p = np.zeros((2, 5, 5))
    p[0, 2, 3] = 1.0
    d = divergence(p)
    assert np.count_nonzero(d) == 2 and d.sum() == 0.0


@pytest.mark.parametrize("m", [8, 16, 32])
def test_gradient_adjoint(m, rng):
    for _ in range(100):
        x = rng.standard_normal((m, m))
        p = rng.standard_normal((2, m, m))
        gx, dp = gradient(x), divergence(p)
        scale = np.linalg.norm(gx) * np.linalg.norm(p) + np.linalg.norm(x) * np.linalg.norm(dp)
        assert abs(np.vdot(gx, p) + np.vdot(x, dp)) <= 1e-12 * scale


def test_weighted_gradient_adjoint(rng):
    params = DtvParams(20.0, 0.15)
    x = rng.standard_normal((9, 9))
    h = rng.standard_normal((2, 9, 9))
    lhs = np.vdot(weighted_gradient(x, params), h)
    rhs = np.vdot(x, weighted_gradient_adjoint(h, params))
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_dtv_matrix_rows():
    w = dtv_matrix(DtvParams(90.0, 0.5))
    np.testing.assert_allclose(w, [[0.0, 1.0], [-0.5, 0.0]], atol=1e-15)


def test_direction_lowers_dtv():
    x = stripes(32, 20.0)
    assert dtv(x, DtvParams(20.0, 0.15)) < dtv(x, DtvParams(110.0, 0.15))


def test_params_validation():
    for a in (0.0, -0.1, 1.5):
        with pytest.raises(ParamError):
            DtvParams(0.0, a)
    assert DtvParams(380.0).theta_deg == pytest.approx(20.0)
    assert DtvParams(10.0).rotated(90.0).theta_deg == pytest.approx(100.0)


def test_ball_projection_halves_norm_two_field():
    q = np.zeros((2, 3, 3))
    q[0] = 2.0 * math.cos(0.3)
    q[1] = 2.0 * math.sin(0.3)
    out = prox_dtv_dual(q, DtvParams(45.0, 1.0), 1.0)
    np.testing.assert_allclose(out, q / 2, atol=1e-15)


def test_prox_zero_field():
    out = prox_dtv_dual(np.zeros((2, 4, 4)), DtvParams(20.0), 0.7)
    assert not out.any()


def test_prox_idempotent(rng):
    params = DtvParams(20.0, 0.15)
    for _ in range(20):
        q = 3 * rng.standard_normal((2, 6, 6))
        once = prox_dtv_dual(q, params, 0.8)
        np.testing.assert_allclose(prox_dtv_dual(once, params, 0.8), once, atol=1e-12)


def test_prox_lands_in_set(rng):
    params = DtvParams(70.0, 0.3)
    q = 5 * rng.standard_normal((2, 8, 8))
    out = prox_dtv_dual(q, params, 0.5)
    z = np.einsum("kl,l...->k...", np.linalg.inv(dtv_matrix(params)).T, out)
    assert np.sqrt(z[0] ** 2 + z[1] ** 2).max() <= 0.5 * (1 + 1e-12)


def test_prox_rejects_nonpositive_weight():
    with pytest.raises(ParamError):
        prox_dtv_dual(np.zeros((2, 2, 2)), DtvParams(0.0), 0.0)


def test_project_ball_leaves_interior():
    q = np.full((2, 2, 2), 0.1)
    np.testing.assert_array_equal(project_ball(q, 1.0), q)


images = arrays(np.float64, (5, 5), elements=st.floats(-10, 10, allow_nan=False))


@settings(max_examples=60, deadline=None)
@given(x=images, theta=st.floats(0, 360), a=st.floats(0.01, 1.0))
def test_dtv_half_turn_invariance(x, theta, a):
    assert dtv(x, DtvParams(theta, a)) == pytest.approx(dtv(x, DtvParams(theta + 180.0, a)),
                                                         rel=1e-12, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(x=images, theta=st.floats(0, 180), a=st.floats(0.01, 1.0), b=st.floats(0.01, 1.0))
def test_dtv_monotone_in_width(x, theta, a, b):
    lo, hi = sorted((a, b))
    assert dtv(x, DtvParams(theta, lo)) <= dtv(x, DtvParams(theta, hi)) + 1e-12


@settings(max_examples=60, deadline=None)
@given(x=images, theta=st.floats(0, 180), a=st.floats(0.01, 1.0))
def test_dtv_bounds(x, theta, a):
    # a * TV <= DTV <= TV pixelwise
    d = dtv(x, DtvParams(theta, a))
    t = tv(x)
    assert a * t - 1e-9 <= d <= t + 1e-9


@settings(max_examples=40, deadline=None)
@given(x=images, c=st.floats(-5, 5), s=st.floats(-3, 3))
def test_tv_shift_and_scale(x, c, s):
    assert tv(s * x + c) == pytest.approx(abs(s) * tv(x), rel=1e-9, abs=1e-9)
