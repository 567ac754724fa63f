import numpy as np
import pytest

from eplab.errors import ConfigurationError, NumericError
from eplab.grid import (
    dealias, interpolate_periodic, make_grid, quadrature, spectral_derivative,
)


def test_default_spacing(grid):
    assert grid.dx == 10.0 / 1024
    assert grid.nodes[0] == -5.0
    np.testing.assert_allclose(np.diff(grid.nodes), grid.dx, rtol=0, atol=1e-14)


def test_small_grid_nodes():
    g = make_grid(8, 2 * np.pi)
    np.testing.assert_allclose(g.nodes, -np.pi + np.arange(8) * np.pi / 4)
    assert len(g.wavenumbers) == 8
    assert len(g.rfft_wavenumbers) == 5


@pytest.mark.parametrize("n,length", [(7, 10.0), (4, 1.0), (1000, 10.0), (64, 0.0), (64, -1.0)])
def test_bad_grid(n, length):
    with pytest.raises(ConfigurationError):
        make_grid(n, length)


def test_derivative_of_sine(grid):
    L = grid.length
    f = np.sin(2 * np.pi * grid.nodes / L)
    d = spectral_derivative(f, grid, 1)
    np.testing.assert_allclose(d, 2 * np.pi / L * np.cos(2 * np.pi * grid.nodes / L), atol=1e-12)
    d2 = spectral_derivative(f, grid, 2)
    np.testing.assert_allclose(d2, -(2 * np.pi / L) ** 2 * f, atol=1e-11)


def test_derivative_of_constant(grid):
    assert np.max(np.abs(spectral_derivative(np.full(grid.n, 3.0), grid, 1))) < 1e-13


def test_derivative_matches_eighth_order_fd(grid):
    f = 1.0 - 0.7 / np.cosh(3 * grid.nodes)
    h = grid.dx
    c = [4 / 5, -1 / 5, 4 / 105, -1 / 280]
    fd = sum(ck * (np.roll(f, -k - 1) - np.roll(f, k + 1)) for k, ck in enumerate(c)) / h
    d = spectral_derivative(f, grid, 1)
    inner = slice(16, -16)
    scale = np.max(np.abs(d))
    assert np.max(np.abs(d[inner] - fd[inner])) / scale < 1e-6


def test_nonfinite_rejected(grid):
    f = np.zeros(grid.n)
    f[3] = np.nan
    with pytest.raises(NumericError):
        spectral_derivative(f, grid, 1)


def test_wrong_order(grid):
    with pytest.raises(ValueError):
        spectral_derivative(np.zeros(grid.n), grid, 3)


def test_interpolation_exact_at_nodes(grid):
    f = np.exp(np.sin(2 * np.pi * grid.nodes / grid.length))
    np.testing.assert_allclose(interpolate_periodic(f, grid, grid.nodes[::37]), f[::37], atol=1e-15)


def test_interpolation_of_cosine(grid):
    f = np.cos(2 * np.pi * grid.nodes / grid.length)
    val = interpolate_periodic(f, grid, [0.123])[0]
    assert abs(val - np.cos(2 * np.pi * 0.123 / grid.length)) < 1e-8


def test_interpolation_wraps(grid):
    f = np.sin(2 * np.pi * grid.nodes / grid.length) + 0.3
    pts = np.array([-4.9, 0.77, 3.3])
    np.testing.assert_allclose(interpolate_periodic(f, grid, pts + 3 * grid.length),
                               interpolate_periodic(f, grid, pts), atol=1e-12)


def test_quadrature(grid):
    assert quadrature(np.ones(grid.n), grid) == pytest.approx(grid.length, abs=1e-12)
    # sech^2 has integral 2/b; the tail at |x| = 5 is e^-30-small for b = 3
    assert quadrature(1 / np.cosh(3 * grid.nodes) ** 2, grid) == pytest.approx(2 / 3, abs=1e-12)
    assert abs(quadrature(np.sin(2 * np.pi * grid.nodes / grid.length), grid)) < 1e-13


def test_dealias_keeps_low_modes(grid):
    f = np.cos(2 * np.pi * 3 * grid.nodes / grid.length)
    np.testing.assert_allclose(dealias(f, grid), f, atol=1e-13)
    high = np.cos(2 * np.pi * 400 * grid.nodes / grid.length)
    assert np.max(np.abs(dealias(high, grid))) < 1e-12
