"""Scalar functionals of a fluid state and the a-priori bounds they must obey."""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import FitError, PreconditionError
from .grid import interpolate_periodic, periodic_spline, quadrature, spectral_derivative
from .vfunctions import v_minus_inverse, v_plus_inverse

PHI_BOUND_SLACK = 1e-6
RATE_FIT_CUTOFF = -10.0
RATE_FIT_MIN_SAMPLES = 5


def relative_pressure(rho, K):
    """P(rho) = K (rho ln rho - rho + 1)."""
    return K * (rho * np.log(rho) - rho + 1.0)


def potential_well(phi):
    """(phi - 1) e^phi + 1, written to avoid cancellation near phi = 0."""
    return phi * np.exp(phi) - np.expm1(phi)


def energy_density(state, K, g):
    phix = spectral_derivative(state.phi, g, 1)
    return (
        0.5 * state.rho * state.u**2
        + relative_pressure(state.rho, K)
        + 0.5 * phix**2
        + potential_well(state.phi)
    )


def energy(state, K, g):
    """H = int 1/2 rho u^2 + P(rho) + 1/2 phi_x^2 + (phi-1)e^phi + 1 dx."""
    if np.min(state.rho) <= 0:
        raise PreconditionError("energy needs a positive density")
    return quadrature(energy_density(state, K, g), g)


@dataclass
class RiemannFields:
    r: np.ndarray
    s: np.ndarray
    W: np.ndarray
    Z: np.ndarray
    f: np.ndarray
    g_fn: np.ndarray


def riemann_fields(state, K, g):
    """Riemann functions r, s = u +- sqrt(K) ln rho, their gradients and the weighted slopes f, g."""
    if not K > 0:
        raise PreconditionError("Riemann functions are only defined for K > 0")
    if np.min(state.rho) <= 0:
        raise PreconditionError("Riemann functions need a positive density")
    sk = math.sqrt(K)
    logrho = np.log(state.rho)
    r = state.u + sk * logrho
    s = state.u - sk * logrho
    W = spectral_derivative(r, g, 1)
    Z = spectral_derivative(s, g, 1)
    inv_sqrt = state.rho ** -0.5
    return RiemannFields(r=r, s=s, W=W, Z=Z, f=-inv_sqrt * W, g_fn=-inv_sqrt * Z)


@lru_cache(maxsize=256)
def phi_bounds(H0):
    """(V-^{-1}(H0), V+^{-1}(H0)): the range the potential is confined to."""
    return v_minus_inverse(H0), v_plus_inverse(H0)


def check_phi_bounds(state, H0, slack=PHI_BOUND_SLACK):
    lower, upper = phi_bounds(float(max(H0, 0.0)))
    ok = bool(np.min(state.phi) >= lower - slack and np.max(state.phi) <= upper + slack)
    return {"lower": lower, "upper": upper, "min_phi": float(np.min(state.phi)),
            "max_phi": float(np.max(state.phi)), "pass": ok}


def phix_chain(state, g):
    """Computable form of the pointwise phi_x bound.

    max phi_x^2 / 2 <= 1/2 int |rho-1|^2 + 1/2 int |phi_x|^2 + max(e^phi - phi - 1)
    """
    phix = spectral_derivative(state.phi, g, 1)
    lhs = 0.5 * float(np.max(phix**2))
    rhs = (
        0.5 * quadrature((state.rho - 1.0) ** 2, g)
        + 0.5 * quadrature(phix**2, g)
        + float(np.max(np.expm1(state.phi) - state.phi))
    )
    return {"lhs": lhs, "rhs": rhs, "pass": bool(lhs <= rhs + 1e-12)}


@dataclass
class DiagnosticsRecord:
    time: float
    H: float
    max_rho: float
    min_rho: float
    max_u: float
    min_u: float
    max_phi: float
    min_phi: float
    max_abs_u: float
    max_abs_ux: float
    max_abs_rhox: float
    max_abs_phi: float
    max_abs_phix: float
    R: float
    S: float
    F_plus: float
    G_plus: float
    flags: dict = field(default_factory=dict)

    CSV_COLUMNS = ("t", "H", "max_rho", "min_rho", "max_abs_u", "max_abs_ux", "max_abs_rhox",
                   "max_abs_phi", "max_abs_phix", "R", "S", "F_plus", "G_plus", "flags")

    def csv_row(self):
        values = [self.time, self.H, self.max_rho, self.min_rho, self.max_abs_u, self.max_abs_ux,
                  self.max_abs_rhox, self.max_abs_phi, self.max_abs_phix, self.R, self.S,
                  self.F_plus, self.G_plus]
        flags = ";".join(f"{k}={int(v)}" for k, v in self.flags.items())
        return [f"{v:.17g}" for v in values] + [flags]


def compute_record(state, K, g, H0, poisson_slack=1e-9):
    """All per-time scalars plus pass flags for the potential bounds."""
    ux = spectral_derivative(state.u, g, 1)
    rx = spectral_derivative(state.rho, g, 1)
    phix = spectral_derivative(state.phi, g, 1)
    if K > 0:
        rf = riemann_fields(state, K, g)
        R, S = float(np.max(np.abs(rf.r))), float(np.max(np.abs(rf.s)))
        F_plus, G_plus = float(np.max(rf.f)), float(np.max(rf.g_fn))
    else:
        R = S = F_plus = G_plus = float("nan")
    e = np.exp(state.phi)
    flags = {
        "phi_bounds": check_phi_bounds(state, H0)["pass"],
        "max_principle": bool(np.min(state.rho) - poisson_slack <= np.min(e)
                              and np.max(e) <= np.max(state.rho) + poisson_slack),
        "phix_chain": phix_chain(state, g)["pass"],
    }
    return DiagnosticsRecord(
        time=float(state.time),
        H=energy(state, K, g),
        max_rho=float(np.max(state.rho)),
        min_rho=float(np.min(state.rho)),
        max_u=float(np.max(state.u)),
        min_u=float(np.min(state.u)),
        max_phi=float(np.max(state.phi)),
        min_phi=float(np.min(state.phi)),
        max_abs_u=float(np.max(np.abs(state.u))),
        max_abs_ux=float(np.max(np.abs(ux))),
        max_abs_rhox=float(np.max(np.abs(rx))),
        max_abs_phi=float(np.max(np.abs(state.phi))),
        max_abs_phix=float(np.max(np.abs(phix))),
        R=R, S=S, F_plus=F_plus, G_plus=G_plus,
        flags=flags,
    )


def fit_blowup_rate(t, min_ux, cutoff=RATE_FIT_CUTOFF, min_samples=RATE_FIT_MIN_SAMPLES):
    """Fit ``min u_x = c / (t - T*)`` to the final samples below ``cutoff``.

    The fit is linear in ``1/min u_x = (t - T*)/c``.  Only the contiguous tail
    of samples under the cutoff is used; it must be strictly decreasing.
    """
    t = np.asarray(t, dtype=float)
    m = np.asarray(min_ux, dtype=float)
    below = m < cutoff
    if len(m) == 0 or not below[-1]:
        raise FitError("series does not end below the cutoff")
    above = np.nonzero(~below)[0]
    start = above[-1] + 1 if len(above) else 0
    tt, mm = t[start:], m[start:]
    if len(mm) < min_samples:
        raise FitError(f"need {min_samples} samples with min u_x < {cutoff}, have {len(mm)}")
    if np.any(np.diff(mm) >= 0):
        raise FitError("min u_x tail is not monotonically decreasing")
    slope, intercept = np.polyfit(tt, 1.0 / mm, 1)
    if slope <= 0:
        raise FitError("non-positive slope of 1/min u_x")
    c = 1.0 / slope
    return {"T_star": float(-intercept / slope), "c": float(c), "samples": int(len(mm))}


def characteristic_transport(states, K, g, x0, family=+1):
    """Integrate a lambda+- characteristic through stored states and measure transport.

    ``states`` are equally spaced in time.  The path x' = u +- sqrt(K) is
    advanced with RK4 on spline-interpolated velocity (half steps use the
    average of neighbouring levels).  Along it the Riemann function r (or s)
    should obey d/dt r = -phi_x; the returned array holds
    |centred d/dt r + phi_x| at interior time levels.
    """
    if not K > 0:
        raise PreconditionError("characteristic transport check needs K > 0")
    sk = family * math.sqrt(K)
    dt = states[1].time - states[0].time
    splines = [periodic_spline(st.u, g) for st in states]

    def speed(i, x, half=False):
        xw = g.wrap(x)
        if half:
            return 0.5 * (splines[i](xw) + splines[i + 1](xw)) + sk
        return splines[i](xw) + sk

    xs = [float(x0)]
    for i in range(len(states) - 1):
        x = xs[-1]
        k1 = speed(i, x)
        k2 = speed(i, x + 0.5 * dt * k1, half=True)
        k3 = speed(i, x + 0.5 * dt * k2, half=True)
        k4 = speed(i + 1, x + dt * k3)
        xs.append(x + dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0)
    riem, forcing = [], []
    for st, x in zip(states, xs):
        field_ = st.u + sk * np.log(st.rho)
        riem.append(float(interpolate_periodic(field_, g, [x])[0]))
        phix = spectral_derivative(st.phi, g, 1)
        forcing.append(float(interpolate_periodic(phix, g, [x])[0]))
    riem = np.asarray(riem)
    forcing = np.asarray(forcing)
    drdt = (riem[2:] - riem[:-2]) / (2.0 * dt)
    return np.abs(drdt + forcing[1:-1])


def rs_envelope(records):
    """Check R(t) + S(t) <= R(0) + S(0) + t * 2 sup_{s<=t} max|phi_x|.

    Returns per-record (t, lhs, rhs, pass) tuples; the sup of the measured field
    gradient plays the role of the unspecified constant C1 sqrt(delta).
    """
    out = []
    base = records[0].R + records[0].S
    sup_phix = 0.0
    for rec in records:
        sup_phix = max(sup_phix, rec.max_abs_phix)
        lhs = rec.R + rec.S
        rhs = base + rec.time * 2.0 * sup_phix
        out.append((rec.time, lhs, rhs, bool(lhs <= rhs + 1e-9)))
    return out
