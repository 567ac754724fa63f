"""Fluid state container and initial-data presets."""

from dataclasses import dataclass, replace

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConfigurationError, PreconditionError


@dataclass(frozen=True)
class FluidState:
    """Density, velocity and potential on one grid at one time level."""

    time: float
    rho: np.ndarray
    u: np.ndarray
    phi: np.ndarray

    def with_time(self, t):
        return replace(self, time=t)


def sech(x):
    # 1/cosh overflows quietly to 0 for |x| > 710, which is the right limit
    with np.errstate(over="ignore"):
        return 1.0 / np.cosh(x)


DENSITY_PRESETS = ("one_minus_a_sech_bx", "one_plus_sech", "constant", "cosine", "custom_table")
VELOCITY_PRESETS = ("zero", "sech", "sine", "custom_table")


def _table(path, column):
    try:
        data = np.genfromtxt(path, delimiter=",", names=True)
    except OSError as exc:
        raise ConfigurationError(f"cannot read table {path}: {exc}") from exc
    if column not in data.dtype.names or "x" not in data.dtype.names:
        raise ConfigurationError(f"{path}: custom table needs columns 'x' and '{column}'")
    return data["x"], data[column]


def _from_table(x, path, column, length):
    xs, ys = _table(path, column)
    order = np.argsort(xs)
    xs, ys = xs[order], ys[order]
    if xs[-1] - xs[0] >= length:
        raise ConfigurationError(f"{path}: table spans more than one period")
    xs = np.append(xs, xs[0] + length)
    ys = np.append(ys, ys[0])
    spline = CubicSpline(xs, ys, bc_type="periodic")
    shifted = xs[0] + np.mod(x - xs[0], length)
    return spline(shifted)


def density_profile(x, preset, a=0.7, b=3.0, length=10.0, table=None, mode=1):
    """Initial density on points ``x``.

    Presets: ``one_minus_a_sech_bx`` (1 - a sech(bx)), ``one_plus_sech``
    (1 + a sech(bx)), ``constant`` (1), ``cosine`` (1 + a cos(2 pi mode x / L))
    and ``custom_table`` (periodic spline through the ``rho`` column of a CSV).
    """
    x = np.asarray(x, dtype=float)
    if preset == "one_minus_a_sech_bx":
        rho = 1.0 - a * sech(b * x)
    elif preset == "one_plus_sech":
        rho = 1.0 + a * sech(b * x)
    elif preset == "constant":
        rho = np.ones_like(x)
    elif preset == "cosine":
        rho = 1.0 + a * np.cos(2.0 * np.pi * mode * x / length)
    elif preset == "custom_table":
        if table is None:
            raise ConfigurationError("custom_table density preset needs init.table")
        rho = _from_table(x, table, "rho", length)
    else:
        raise ConfigurationError(f"unknown density preset {preset!r}")
    if np.min(rho) <= 0:
        raise PreconditionError(f"preset {preset!r} gives non-positive density (min {np.min(rho):g})")
    return rho


def velocity_profile(x, preset, a=1.0, b=1.0, length=10.0, table=None, mode=1):
    """Initial velocity: ``zero``, ``sech`` (a sech(bx)), ``sine`` or ``custom_table``."""
    x = np.asarray(x, dtype=float)
    if preset == "zero":
        return np.zeros_like(x)
    if preset == "sech":
        return a * sech(b * x)
    if preset == "sine":
        return a * np.sin(2.0 * np.pi * mode * x / length)
    if preset == "custom_table":
        if table is None:
            raise ConfigurationError("custom_table velocity preset needs init.table")
        return _from_table(x, table, "u", length)
    raise ConfigurationError(f"unknown velocity preset {preset!r}")


def tail_magnitude(preset, a, b, length):
    """Size of the sech perturbation at the periodic cut |x| = L/2."""
    if preset in ("one_minus_a_sech_bx", "one_plus_sech", "sech"):
        return float(abs(a) * sech(b * 0.5 * length))
    return 0.0
