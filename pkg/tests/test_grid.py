import numpy as np
import pytest

from hjs_lab import ConfigurationError, derivative, integrate, make_grid
from hjs_lab.errors import ShapeError
from hjs_lab.grid import detrended_derivative


def test_make_grid_basic():
    g = make_grid(1.0, 8)
    assert g.dx == 0.25
    np.testing.assert_allclose(g.q, -1.0 + 0.25 * np.arange(8))
    assert g.q[0] == -1.0 and g.q[-1] == 0.75


def test_make_grid_spacing():
    g = make_grid(20.0, 1024)
    assert g.dx == 0.0390625
    assert g.k[0] == 0.0
    # wavenumbers symmetric apart from the Nyquist mode
    assert np.allclose(np.sort(g.k[1 : g.n_points // 2]),
                       np.sort(-g.k[g.n_points // 2 + 1 :]))


@pytest.mark.parametrize("L,N", [(1.0, 7), (1.0, 12), (-1.0, 8), (0.0, 16), (1.0, 4)])
def test_make_grid_rejects_bad_params(L, N):
    with pytest.raises(ConfigurationError):
        make_grid(L, N)


def test_shape_mismatch():
    g = make_grid(1.0, 8)
    with pytest.raises(ShapeError):
        derivative(np.ones(9), g)
    with pytest.raises(ShapeError):
        integrate(np.ones(4), g)


def test_derivative_sine():
    g = make_grid(3.0, 64)
    f = np.sin(np.pi * g.q / g.half_width)
    expect = (np.pi / g.half_width) * np.cos(np.pi * g.q / g.half_width)
    got = derivative(f, g, order=1, method="spectral")
    np.testing.assert_allclose(got, expect, atol=1e-12)


def test_derivative_constant_zero():
    g = make_grid(5.0, 32)
    for order in (1, 2):
        assert np.abs(derivative(np.full(32, 2.5), g, order)).max() < 1e-13


def test_derivative_gaussian_second():
    # analytic-differentiation oracle: (e^{-q^2})'' = (4q^2 - 2) e^{-q^2}
    g = make_grid(10.0, 512)
    f = np.exp(-g.q**2)
    expect = (4.0 * g.q**2 - 2.0) * f
    got = derivative(f, g, order=2, method="spectral")
    assert np.abs(got - expect).max() < 1e-10


def test_central_matches_spectral_to_stencil_order():
    g = make_grid(10.0, 1024)
    f = np.exp(-g.q**2 / 2)
    d_s = derivative(f, g, 1, "spectral")
    d_c = derivative(f, g, 1, "central")
    assert np.abs(d_s - d_c).max() < g.dx**2


def test_band_limited_exactness():
    g = make_grid(np.pi, 64)
    # modes below N/4 differentiate to near machine precision
    f = np.cos(5 * g.q) + 0.3 * np.sin(11 * g.q)
    expect = -5 * np.sin(5 * g.q) + 3.3 * np.cos(11 * g.q)
    rel = np.abs(derivative(f, g, 1) - expect).max() / np.abs(expect).max()
    assert rel < 1e-10


def test_second_derivative_composition():
    g = make_grid(8.0, 128)
    f = np.exp(-g.q**2 / 3) * np.cos(3 * g.q)
    twice = derivative(derivative(f, g, 1), g, 1)
    once = derivative(f, g, 2)
    assert np.abs(twice - once).max() / np.abs(once).max() < 1e-9


def test_integrate_examples():
    g = make_grid(1.0, 8)
    assert integrate(np.ones(8), g) == pytest.approx(2.0)
    g2 = make_grid(3.0, 64)
    assert abs(integrate(np.sin(np.pi * g2.q / 3.0), g2)) < 1e-14
    g3 = make_grid(10.0, 512)
    assert integrate(np.exp(-g3.q**2), g3) == pytest.approx(np.sqrt(np.pi), abs=1e-12)


def test_integrate_linear_and_positive():
    rng = np.random.default_rng(7)
    g = make_grid(2.0, 16)
    f1, f2 = rng.normal(size=16), rng.normal(size=16)
    lhs = integrate(2.0 * f1 - 3.0 * f2, g)
    rhs = 2.0 * integrate(f1, g) - 3.0 * integrate(f2, g)
    assert lhs == pytest.approx(rhs, rel=1e-13)
    assert integrate(np.abs(f1), g) > 0


def test_detrended_derivative_quadratic_tails():
    # linear-plus-quadratic field differentiates exactly despite the wrap
    g = make_grid(10.0, 256)
    f = 1.7 * g.q - 0.4 * g.q**2 + 3.0
    assert np.abs(detrended_derivative(f, g, 1) - (1.7 - 0.8 * g.q)).max() < 1e-10
    assert np.abs(detrended_derivative(f, g, 2) - (-0.8)).max() < 1e-10
    # localized bump on top of the quadratic survives intact
    bump = np.exp(-g.q**2)
    got = detrended_derivative(f + bump, g, 1)
    expect = 1.7 - 0.8 * g.q - 2 * g.q * bump
    assert np.abs(got - expect).max() < 1e-9
