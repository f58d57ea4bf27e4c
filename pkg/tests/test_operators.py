import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fields import TWO_PI, grid2, observed_orders, smooth_pi, smooth_u
from tigre import operators as ops
from tigre.eos import DomainError
from tigre.grid import make_grid

LEVELS = (32, 64, 128, 256)


def test_ddx_constant_and_rate():
    g = make_grid(1, 64)
    assert np.all(ops.ddx(np.full(g.shape, 3.0), g) == 0.0)
    errs = []
    for n in (256, 512):
        g = make_grid(1, n)
        x, _ = g.coords()
        errs.append(np.abs(ops.ddx(np.sin(TWO_PI * x), g) - TWO_PI * np.cos(TWO_PI * x)).max())
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.01)


def test_ddx_exact_on_interior_linear():
    g = make_grid(1, 16)
    x, _ = g.coords()
    d = ops.ddx(3.0 * x, g)
    np.testing.assert_allclose(d[0, 1:-1], 3.0, rtol=1e-12)
    # wrap cells see the periodic image of the sawtooth
    assert d[0, 0] == pytest.approx(3.0 * (x[0, 1] - (x[0, -1] - 1.0)) / (2 * g.dx) - 3.0 / (2 * g.dx))


def test_ddy_zero_in_1d():
    g = make_grid(1, 8)
    assert np.all(ops.ddy(np.arange(8.0)[None, :], g) == 0.0)


def test_ddy_rate():
    errs = []
    for n in LEVELS:
        g = grid2(n)
        x, y = g.coords()
        errs.append(np.abs(ops.ddy(np.cos(TWO_PI * y) * np.sin(TWO_PI * x), g)
                           + TWO_PI * np.sin(TWO_PI * y) * np.sin(TWO_PI * x)).max())
    assert np.all((observed_orders(errs) > 1.8) & (observed_orders(errs) < 2.2))


def test_div_sq_cases():
    g = grid2(16)
    x, y = g.coords()
    assert np.all(ops.div_sq(np.ones((2, 16, 16)), g) == 0.0)
    u = np.stack([2.0 * x, np.zeros_like(x)])
    np.testing.assert_allclose(ops.div_sq(u, g)[:, 1:-1], 4.0, rtol=1e-12)


def test_div_sq_divergence_free():
    # u = perp grad psi is discretely divergence free up to O(dx^2) per derivative
    res = []
    for n in (64, 128):
        g = grid2(n)
        x, y = g.coords()
        u = np.stack([TWO_PI * np.sin(TWO_PI * x) * np.sin(TWO_PI * y),
                      TWO_PI * np.cos(TWO_PI * x) * np.cos(TWO_PI * y)])
        res.append(ops.div_sq(u, g).max())
    assert res[1] < 1e-20 or res[0] / res[1] == pytest.approx(16.0, rel=0.05)


def test_tr_grad_u_sq():
    g = grid2(32)
    assert np.all(ops.tr_grad_u_sq(np.full((2, 32, 32), 0.7), g) == 0.0)
    g1 = make_grid(1, 64)
    x, _ = g1.coords()
    u = np.sin(TWO_PI * x)[None]
    assert np.array_equal(ops.tr_grad_u_sq(u, g1), ops.ddx(u[0], g1) ** 2)


def test_tr_grad_u_sq_rotation_sign():
    g = grid2(64)
    x, y = g.coords()
    # smooth periodic rotation about the centre
    u = np.stack([-np.sin(TWO_PI * (y - 0.5)), np.sin(TWO_PI * (x - 0.5))]) / TWO_PI
    tr = ops.tr_grad_u_sq(u, g)
    exact = 2.0 * np.cos(TWO_PI * (x - 0.5)) * -np.cos(TWO_PI * (y - 0.5))
    assert tr[32, 32] < 0
    np.testing.assert_allclose(tr, exact, atol=1e-2)


def test_div_pi_reduces_to_centered_divergence():
    g = grid2(16)
    x, y = g.coords()
    u = smooth_u(x, y)
    plain = ops.ddx(u[0], g) + ops.ddy(u[1], g)
    np.testing.assert_allclose(ops.div_pi(u, np.full(g.shape, 0.2), g), plain, atol=1e-12)
    assert np.all(ops.div_pi(np.zeros((2, 16, 16)), smooth_pi(x, y), g) == 0.0)


def _div_pi_exact(x, y):
    # pi^-1 div(pi u) = div u + u . grad log pi
    ux = np.sin(TWO_PI * x) * np.cos(TWO_PI * y)
    uy = 0.5 * np.cos(TWO_PI * (x + y))
    div = TWO_PI * np.cos(TWO_PI * x) * np.cos(TWO_PI * y) - 0.5 * TWO_PI * np.sin(TWO_PI * (x + y))
    lx = 0.4 * TWO_PI * np.cos(TWO_PI * x)
    ly = -0.3 * TWO_PI * np.sin(TWO_PI * y)
    return div + ux * lx + uy * ly


def div_pi_errors():
    errs = []
    for n in LEVELS:
        g = grid2(n)
        x, y = g.coords()
        errs.append(np.abs(ops.div_pi(smooth_u(x, y), smooth_pi(x, y), g) - _div_pi_exact(x, y)).max())
    return errs


def test_div_pi_order():
    orders = observed_orders(div_pi_errors())
    assert np.all((orders > 1.8) & (orders < 2.2)), orders


def test_div_pi_verbatim_is_inconsistent():
    g = make_grid(1, 256)
    x, _ = g.coords()
    u = np.sin(TWO_PI * x)[None]
    pi = np.full(g.shape, 0.5)
    # verbatim stencil with constant pi is twice the centered divergence
    np.testing.assert_allclose(ops.div_pi(u, pi, g, verbatim=True), 2 * ops.ddx(u[0], g), atol=1e-12)


def test_div_pi_domain():
    g = grid2(8)
    with pytest.raises(DomainError):
        ops.div_pi(np.zeros((2, 8, 8)), np.zeros(g.shape), g)


def hessian_errors():
    errs = []
    for n in LEVELS:
        g = grid2(n)
        x, y = g.coords()
        u = smooth_u(x, y)
        # log pi = 0.4 sin(2 pi x) + 0.3 cos(2 pi y) + 0.2 sin(2 pi (x + y))
        lp = 0.4 * np.sin(TWO_PI * x) + 0.3 * np.cos(TWO_PI * y) + 0.2 * np.sin(TWO_PI * (x + y))
        k2 = TWO_PI**2
        hxx = -k2 * (0.4 * np.sin(TWO_PI * x) + 0.2 * np.sin(TWO_PI * (x + y)))
        hyy = -k2 * (0.3 * np.cos(TWO_PI * y) + 0.2 * np.sin(TWO_PI * (x + y)))
        hxy = -k2 * 0.2 * np.sin(TWO_PI * (x + y))
        exact = u[0] ** 2 * hxx + 2 * u[0] * u[1] * hxy + u[1] ** 2 * hyy
        errs.append(np.abs(ops.hessian_log_pi_uu(np.exp(lp), u, g) - exact).max())
    return errs


def test_hessian_order():
    orders = observed_orders(hessian_errors())
    assert np.all((orders > 1.8) & (orders < 2.2)), orders


def test_hessian_trivial_cases():
    g = grid2(16)
    x, y = g.coords()
    assert np.all(ops.hessian_log_pi_uu(np.full(g.shape, 0.3), smooth_u(x, y), g) == 0.0)
    assert np.all(ops.hessian_log_pi_uu(smooth_pi(x, y), np.zeros((2, 16, 16)), g) == 0.0)


def test_hessian_1d_exponent():
    errs = []
    for n in (64, 128, 256):
        g = make_grid(1, n)
        x, _ = g.coords()
        a = 0.7
        pi = np.exp(a * np.sin(TWO_PI * x))
        h = ops.hessian_log_pi_uu(pi, np.ones((1,) + g.shape), g)
        errs.append(np.abs(h + a * TWO_PI**2 * np.sin(TWO_PI * x)).max())
    orders = observed_orders(errs)
    assert np.all((orders > 1.8) & (orders < 2.2))


def weighted_div_errors():
    errs = []
    for n in LEVELS:
        g = grid2(n)
        x, y = g.coords()
        gw = 1.0 + 0.5 * np.sin(TWO_PI * x) * np.sin(TWO_PI * y)
        f = np.cos(TWO_PI * x) + np.sin(TWO_PI * y)
        fx = -TWO_PI * np.sin(TWO_PI * x)
        fy = TWO_PI * np.cos(TWO_PI * y)
        gx = 0.5 * TWO_PI * np.cos(TWO_PI * x) * np.sin(TWO_PI * y)
        gy = 0.5 * TWO_PI * np.sin(TWO_PI * x) * np.cos(TWO_PI * y)
        lap = -(TWO_PI**2) * f
        exact = gx * fx + gy * fy + gw * lap
        errs.append(np.abs(ops.weighted_div(gw, f, g) - exact).max())
    return errs


def test_weighted_div_order():
    orders = observed_orders(weighted_div_errors())
    assert np.all((orders > 1.8) & (orders < 2.2)), orders


def test_weighted_div_unit_weight_is_five_point_laplacian(rng):
    g = make_grid(2, 8, 16)
    w = ops.FaceWeights(np.ones(g.shape), g)
    c = w.coefficients()
    assert np.all(c[:2] == 1.0 / g.dx**2) and np.all(c[2:] == 1.0 / g.dy**2)
    assert np.all(w.diagonal() == 2.0 / g.dx**2 + 2.0 / g.dy**2)
    f = rng.standard_normal(g.shape)
    five = (np.roll(f, -1, 1) - 2 * f + np.roll(f, 1, 1)) / g.dx**2 + (
        np.roll(f, -1, 0) - 2 * f + np.roll(f, 1, 0)
    ) / g.dy**2
    np.testing.assert_allclose(ops.weighted_div(np.ones(g.shape), f, g), five, rtol=1e-12, atol=1e-9)
    assert np.all(ops.weighted_div(np.ones(g.shape), np.full(g.shape, 2.0), g) == 0.0)


def test_weighted_div_sine_laplacian():
    errs = []
    for n in (64, 128):
        g = make_grid(1, n)
        x, _ = g.coords()
        f = np.sin(TWO_PI * x)
        errs.append(np.abs(ops.weighted_div(np.ones(g.shape), f, g) + TWO_PI**2 * f).max())
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.02)


positive = arrays(float, (6, 8), elements=st.floats(0.1, 10.0))
values = arrays(float, (6, 8), elements=st.floats(-5.0, 5.0))


@given(positive, values)
def test_weighted_div_telescopes(gw, f):
    g = make_grid(2, 8, 6)
    out = ops.weighted_div(gw, f, g)
    scale = np.abs(out).sum() + 1.0
    if np.all(f == f.flat[0]):
        assert np.all(out == 0.0)
    assert abs(out.sum()) <= 1e-13 * scale


@given(positive, values, values)
def test_weighted_div_symmetric_negative(gw, f, h):
    # <h, L f> = <L h, f> and <f, L f> <= 0
    g = make_grid(2, 8, 6)
    lf = ops.weighted_div(gw, f, g)
    lh = ops.weighted_div(gw, h, g)
    scale = (np.abs(h) * np.abs(lf)).sum() + 1.0
    assert abs((h * lf).sum() - (lh * f).sum()) <= 1e-12 * scale
    assert (f * lf).sum() <= 1e-12 * scale


def test_weighted_div_verbatim_differs():
    g = make_grid(1, 32)
    x, _ = g.coords()
    f = np.sin(TWO_PI * x)
    a = ops.weighted_div(np.ones(g.shape), f, g)
    b = ops.weighted_div(np.ones(g.shape), f, g, verbatim=True)
    assert not np.allclose(a, b)


def test_face_weights_need_positive_weight():
    with pytest.raises(DomainError):
        ops.FaceWeights(-np.ones((1, 8)), make_grid(1, 8))
