"""Periodic grid, pseudo-spectral differentiation, interpolation and quadrature."""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConfigurationError, NumericError


@dataclass(frozen=True)
class Grid:
    """Uniform periodic mesh on [-L/2, L/2) with ``n`` nodes.

    ``nodes[0] == -L/2`` and the spacing is ``L/n``. ``wavenumbers`` follows the
    complex FFT ordering (length ``n``); ``rfft_wavenumbers`` holds the
    non-negative half used with ``numpy.fft.rfft`` (length ``n//2 + 1``).
    """

    n: int
    length: float
    nodes: np.ndarray = field(init=False, repr=False, compare=False)
    wavenumbers: np.ndarray = field(init=False, repr=False, compare=False)
    rfft_wavenumbers: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n, length = self.n, self.length
        if not isinstance(n, (int, np.integer)) or n < 8 or n & (n - 1):
            raise ConfigurationError(f"grid.n must be a power of two >= 8, got {n!r}")
        if not np.isfinite(length) or length <= 0:
            raise ConfigurationError(f"grid.length must be positive, got {length!r}")
        nodes = -0.5 * length + np.arange(n) * (length / n)
        k = 2.0 * np.pi * np.fft.fftfreq(n, d=length / n)
        kr = 2.0 * np.pi * np.fft.rfftfreq(n, d=length / n)
        for arr in (nodes, k, kr):
            arr.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "wavenumbers", k)
        object.__setattr__(self, "rfft_wavenumbers", kr)

    @property
    def dx(self):
        return self.length / self.n

    def wrap(self, points):
        """Map arbitrary coordinates into [-L/2, L/2)."""
        half = 0.5 * self.length
        return np.mod(np.asarray(points, dtype=float) + half, self.length) - half

    def check(self, f, name="field"):
        f = np.asarray(f, dtype=float)
        if f.shape != (self.n,):
            raise ConfigurationError(f"{name} has shape {f.shape}, grid expects ({self.n},)")
        if not np.all(np.isfinite(f)):
            raise NumericError(f"{name} contains non-finite values")
        return f


def make_grid(n=1024, length=10.0):
    """Build the periodic grid; defaults give dx = 10/2**10."""
    return Grid(int(n) if isinstance(n, (int, np.integer)) else n, float(length))


def _symbol(g, order):
    k = g.rfft_wavenumbers
    if order == 1:
        sym = 1j * k
        if g.n % 2 == 0:
            sym = sym.copy()
            sym[-1] = 0.0  # Nyquist mode has no odd derivative
        return sym
    if order == 2:
        return -(k**2)
    raise ValueError(f"order must be 1 or 2, got {order!r}")


def spectral_derivative(f, g, order=1):
    """Exact derivative of the trigonometric interpolant of ``f``."""
    f = g.check(f)
    return np.fft.irfft(_symbol(g, order) * np.fft.rfft(f), n=g.n)


def dealias(f, g):
    """Zero the upper third of the spectrum (2/3 rule)."""
    fh = np.fft.rfft(f)
    kmax = g.n // 3
    fh[kmax + 1 :] = 0.0
    return np.fft.irfft(fh, n=g.n)


def periodic_spline(f, g):
    """Periodic C2 cubic spline through the grid values of ``f``."""
    f = g.check(f)
    x = np.append(g.nodes, g.nodes[0] + g.length)
    y = np.append(f, f[0])
    return CubicSpline(x, y, bc_type="periodic")


def interpolate_periodic(f, g, points, nu=0):
    """Evaluate the periodic cubic spline of ``f`` (or its ``nu``-th derivative) at ``points``.

    Points are wrapped into [-L/2, L/2) first, so values are exactly periodic and
    reproduce ``f`` at the grid nodes.
    """
    points = np.asarray(points, dtype=float)
    if not np.all(np.isfinite(points)):
        raise NumericError("interpolation points contain non-finite values")
    return periodic_spline(f, g)(g.wrap(points), nu)


def quadrature(f, g):
    """Periodic trapezoid rule L/n * sum(f)."""
    f = g.check(f)
    return g.dx * float(np.sum(f))
