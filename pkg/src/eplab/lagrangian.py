"""Characteristic (particle) integrator for the pressureless model, K = 0.

Each particle carries its label alpha, position x, velocity u = dx/dt, the
Jacobian w = dx/dalpha and wdot = dw/dt.  Along a particle path

    x' = u,   u' = -phi_x(x, t),   w'' + e^{phi(x, t)} w = rho0(alpha),

and the density is recovered from rho(x(alpha, t), t) w(alpha, t) = rho0(alpha).
"""

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import ConfigurationError, CrossingError, FitError, PreconditionError, SolverFailure
from .grid import interpolate_periodic, make_grid, spectral_derivative
from .poisson import DEFAULT_TOL, PoissonSolver
from .eulerian import spectral_tail
from .state import density_profile, velocity_profile

log = logging.getLogger(__name__)

DEFAULT_PARTICLES = 2048
# |wdot| below this at the last sample selects the tangential (double-zero) branch
WDOT_ZERO_THRESHOLD = 1e-3
RATE_WINDOW = (2.0, 0.1)  # T* - t in [2 dt, 0.1]
W_FLOOR = 1e-3
# invariants are asserted while the grid density's spectral tail stays below this
RESOLVED_LEVEL = 1e-7
# particles copied across each periodic end so the monotone interpolant sees its neighbours
_PAD = 4


@dataclass(frozen=True)
class CharacteristicEnsemble:
    alpha: np.ndarray
    x: np.ndarray
    u: np.ndarray
    w: np.ndarray
    wdot: np.ndarray
    rho0: np.ndarray
    time: float
    length: float

    def updated(self, **changes):
        return replace(self, **changes)


def make_ensemble(rho0_fn, u0_fn, length=10.0, n_particles=DEFAULT_PARTICLES):
    """Particles uniform in alpha over one period with w = 1 and wdot = u0'(alpha).

    ``rho0_fn`` and ``u0_fn`` map an array of labels to initial density and
    velocity.  u0' is taken spectrally on the particle lattice.
    """
    lattice = make_grid(n_particles, length)
    alpha = lattice.nodes.copy()
    rho0 = np.asarray(rho0_fn(alpha), dtype=float)
    u0 = np.asarray(u0_fn(alpha), dtype=float)
    if np.min(rho0) <= 0:
        raise PreconditionError("initial density must be positive")
    return CharacteristicEnsemble(
        alpha=alpha, x=alpha.copy(), u=u0, w=np.ones_like(alpha),
        wdot=spectral_derivative(u0, lattice, 1), rho0=rho0, time=0.0, length=float(length),
    )


def ensemble_from_scenario(scenario, n_particles=DEFAULT_PARTICLES):
    sc = scenario
    return make_ensemble(
        lambda a: density_profile(a, sc.rho_preset, sc.rho_a, sc.rho_b, sc.length, sc.table, sc.rho_mode),
        lambda a: velocity_profile(a, sc.u_preset, sc.u_a, sc.u_b, sc.length, sc.table, sc.u_mode),
        sc.length, n_particles,
    )


def check_ordering(x, w, length):
    """Raise ``CrossingError`` unless positions increase strictly over one period and w > 0."""
    gaps = np.diff(x)
    closing = x[0] + length - x[-1]
    if np.min(gaps) <= 0 or closing <= 0:
        raise CrossingError("particle paths crossed")
    if np.min(w) <= 0:
        raise CrossingError(f"Jacobian w vanished (min w = {np.min(w):.3g})")


def _periodic_monotone(x, values, length, g):
    """Shape-preserving cubic through scattered periodic data, evaluated at the grid nodes."""
    half = 0.5 * length
    xw = np.mod(x + half, length) - half
    shift = int(np.argmin(xw))
    xs = np.roll(xw, -shift)
    ys = np.roll(values, -shift)
    xp = np.concatenate((xs[-_PAD:] - length, xs, xs[:_PAD] + length))
    yp = np.concatenate((ys[-_PAD:], ys, ys[:_PAD]))
    return PchipInterpolator(xp, yp)(g.nodes)


def reconstruct_density(ens, g):
    """Grid density from the pairs (x_i, rho0_i / w_i)."""
    check_ordering(ens.x, ens.w, ens.length)
    rho = _periodic_monotone(ens.x, ens.rho0 / ens.w, ens.length, g)
    if np.min(rho) <= 0:
        raise CrossingError("reconstructed density is not positive")
    return rho


class LagrangianStepper:
    """RK4 for (x, u, w, wdot); every stage rebuilds rho and solves for phi."""

    def __init__(self, g, poisson_tol=DEFAULT_TOL):
        self.grid = g
        self.poisson = PoissonSolver(g, tol=poisson_tol)
        self._phi = None

    def fields(self, x, w, rho0, length):
        """(phi at particles, phi_x at particles, grid phi) for the given particle state."""
        g = self.grid
        rho = reconstruct_density(
            CharacteristicEnsemble(None, x, None, w, None, rho0, 0.0, length), g
        )
        self._phi = self.poisson.solve(rho, initial_guess=self._phi).phi
        phix = spectral_derivative(self._phi, g, 1)
        return (interpolate_periodic(self._phi, g, x), interpolate_periodic(phix, g, x), self._phi)

    def _rates(self, ens, x, u, w, v):
        phi_p, phix_p, _ = self.fields(x, w, ens.rho0, ens.length)
        return u, -phix_p, v, ens.rho0 - np.exp(phi_p) * w

    def step(self, ens, dt):
        y0 = (ens.x, ens.u, ens.w, ens.wdot)
        k1 = self._rates(ens, *y0)
        k2 = self._rates(ens, *(a + 0.5 * dt * b for a, b in zip(y0, k1)))
        k3 = self._rates(ens, *(a + 0.5 * dt * b for a, b in zip(y0, k2)))
        k4 = self._rates(ens, *(a + dt * b for a, b in zip(y0, k3)))
        new = [a + dt * (b1 + 2 * b2 + 2 * b3 + b4) / 6.0
               for a, b1, b2, b3, b4 in zip(y0, k1, k2, k3, k4)]
        check_ordering(new[0], new[2], ens.length)
        return ens.updated(x=new[0], u=new[1], w=new[2], wdot=new[3], time=ens.time + dt)


def step_lagrangian(ens, dt, g, poisson_tol=DEFAULT_TOL, stepper=None):
    """One RK4 step of the characteristic system."""
    stepper = stepper or LagrangianStepper(g, poisson_tol)
    return stepper.step(ens, dt)


def invariant_residuals(ens, g):
    """Max |rho(x_i) w_i - rho0_i|, max |wdot_i - u_x(x_i) w_i| and the density's spectral tail.

    rho(x_i) is read back from the grid reconstruction by periodic spline, and
    u_x w = du/dalpha is differentiated spectrally over the particle lattice,
    so both residuals compare particle data with an independent field.  The
    tail (relative Fourier amplitude in the top third) says whether the grid
    still resolves the density.
    """
    rho = reconstruct_density(ens, g)
    rho_p = interpolate_periodic(rho, g, ens.x)
    rho_w = float(np.max(np.abs(rho_p * ens.w - ens.rho0)))
    lattice = make_grid(len(ens.alpha), ens.length)
    u_alpha = spectral_derivative(ens.u, lattice, 1)
    wdot = float(np.max(np.abs(ens.wdot - u_alpha)))
    return rho_w, wdot, spectral_tail(rho)


@dataclass
class LagrangianRun:
    ensemble: CharacteristicEnsemble
    termination: str
    times: list = field(default_factory=list)
    w: list = field(default_factory=list)
    wdot: list = field(default_factory=list)
    rho_w_residual: list = field(default_factory=list)
    wdot_residual: list = field(default_factory=list)
    spectral_tail: list = field(default_factory=list)
    states: list = field(default_factory=list)
    message: str = ""

    def resolved(self, level=RESOLVED_LEVEL):
        """Mask of recorded samples whose reconstructed density is resolved to ``level``."""
        return np.asarray(self.spectral_tail) <= level

    def history(self):
        """(t, W, Wdot) arrays with one row per recorded time."""
        return np.asarray(self.times), np.asarray(self.w), np.asarray(self.wdot)


def run_lagrangian(scenario, n_particles=DEFAULT_PARTICLES, w_floor=W_FLOOR, keep_every=0,
                   check_invariants=True):
    """Integrate until t_end, until min w < ``w_floor``, or until particles cross.

    Terminations are ``completed``, ``w_floor`` or ``crossing``.  With
    ``keep_every`` > 0 every such step's ensemble is stored in ``states``.
    """
    if scenario.K != 0:
        raise ConfigurationError("the characteristic solver covers the pressureless model only")
    g = scenario.grid()
    ens = ensemble_from_scenario(scenario, n_particles)
    stepper = LagrangianStepper(g, scenario.poisson_tol)
    out = LagrangianRun(ensemble=ens, termination="completed")

    def record(e):
        out.times.append(e.time)
        out.w.append(e.w.copy())
        out.wdot.append(e.wdot.copy())
        if check_invariants:
            r1, r2, tail = invariant_residuals(e, g)
            out.rho_w_residual.append(r1)
            out.wdot_residual.append(r2)
            out.spectral_tail.append(tail)

    record(ens)
    if keep_every:
        out.states.append(ens)
    n_steps = int(round(scenario.t_end / scenario.dt))
    for i in range(1, n_steps + 1):
        try:
            ens = stepper.step(ens, scenario.dt)
        except CrossingError as exc:
            out.termination, out.message = "crossing", str(exc)
            break
        except SolverFailure as exc:
            out.termination, out.message = "solver_failure", str(exc)
            break
        record(ens)
        if keep_every and i % keep_every == 0:
            out.states.append(ens)
        if np.min(ens.w) < w_floor:
            out.termination = "w_floor"
            out.message = f"min w = {np.min(ens.w):.3g} below {w_floor:g}"
            break
    out.ensemble = ens
    return out


def detect_w_vanishing(t, w, wdot, threshold=WDOT_ZERO_THRESHOLD, n_fit=5):
    """Extrapolate the first zero of w along the particle where it is smallest.

    ``w`` and ``wdot`` are either 1-D series for one particle or 2-D arrays
    (time, particle); in the latter case the particle minimising w at the last
    sample is followed.  Near a zero w ~ (T* - t)^p, so w/wdot is linear in t
    with slope 1/p.  p near 1 means wdot(T*) < 0 (sign "negative"); p near 2,
    or |wdot| below ``threshold`` at the last sample, means wdot(T*) = 0
    (sign "zero").  T* comes from a linear fit of w^(1/p) over the last
    ``n_fit`` samples with p = 1 or 2 accordingly.
    """
    t = np.asarray(t, dtype=float)
    w = np.asarray(w, dtype=float)
    wdot = np.asarray(wdot, dtype=float)
    index = None
    if w.ndim == 2:
        index = int(np.argmin(w[-1]))
        w, wdot = w[:, index], wdot[:, index]
    if len(t) < n_fit or np.any(w <= 0):
        raise FitError("need positive w samples to extrapolate")
    tail_t, tail_w, tail_v = t[-n_fit:], w[-n_fit:], wdot[-n_fit:]
    if not np.all(np.diff(tail_w) < 0) or not np.all(tail_v < 0):
        raise FitError("w is not decreasing at the end of the history")
    inv_order = np.polyfit(tail_t, tail_w / tail_v, 1)[0]
    order = 1.0 / inv_order if inv_order > 0 else math.inf
    if abs(wdot[-1]) < threshold or order >= 1.5:
        sign, root = "zero", np.sqrt(tail_w)
    else:
        sign, root = "negative", tail_w
    slope, icept = np.polyfit(tail_t, root, 1)
    if slope >= 0:
        raise FitError("no vanishing trend")
    return {"T_star": float(-icept / slope), "wdot_at_Tstar_sign": sign, "particle": index,
            "order": float(order)}


RATE_BRACKETS = {"negative": (0.5, 2.0), "zero": (1.0, 8.0)}


def check_blowup_rate(t, ux, T_star, sign, dt, window=RATE_WINDOW):
    """(t - T*) u_x on the samples with T* - t in [window[0] dt, window[1]].

    Returns the products, the open bracket for ``sign`` and whether every
    product lies strictly inside it.
    """
    t = np.asarray(t, dtype=float)
    ux = np.asarray(ux, dtype=float)
    gap = T_star - t
    sel = (gap >= window[0] * dt - 1e-12) & (gap <= window[1] + 1e-12)
    if not np.any(sel):
        raise FitError("no samples inside the rate window")
    products = (t[sel] - T_star) * ux[sel]
    lo, hi = RATE_BRACKETS[sign]
    return {"times": t[sel], "products": products, "bracket": (lo, hi),
            "pass": bool(np.all((products > lo) & (products < hi)))}
