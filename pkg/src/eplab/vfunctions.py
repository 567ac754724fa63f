"""The potential-well functions U, V- and V+ and their inverses.

U(t) = (t - 1) e^t + 1 >= 0, and V is the antiderivative of sqrt(2U) anchored
at zero: V-(z) = int_z^0 sqrt(2U) for z <= 0, V+(z) = int_0^z sqrt(2U) for z >= 0.
Their inverses turn an energy level into the admissible range of the potential.
"""

import math

from scipy.optimize import brentq

QUAD_TOL = 1e-10
ROOT_TOL = 1e-10
# below this U(t) = 1 - (1 - t) e^t is within 3e-12 of 1, so sqrt(2U) ~ sqrt(2)
ASYMPTOTE_CUTOFF = -30.0

_SERIES_COEFFS = [(k - 1) / math.factorial(k) for k in range(2, 14)]


def well(t):
    """U(t) = (t - 1) e^t + 1, evaluated without cancellation near t = 0."""
    if abs(t) < 0.05:
        # sum_{k>=2} (k-1) t^k / k!
        total, power = 0.0, t * t
        for c in _SERIES_COEFFS:
            total += c * power
            power *= t
        return total
    return t * math.exp(t) - math.expm1(t)


def _speed(t):
    return math.sqrt(2.0 * max(well(t), 0.0))


def adaptive_simpson(f, a, b, tol=QUAD_TOL, max_depth=60):
    """Adaptive Simpson quadrature with interval bisection and Richardson correction."""
    if a == b:
        return 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) * (fa + 4.0 * flm + fm) / 6.0
        right = (b - m) * (fm + 4.0 * frm + fb) / 6.0
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
        return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + recurse(
            m, b, fm, frm, fb, right, 0.5 * tol, depth - 1
        )

    return recurse(a, b, fa, fm, fb, whole, tol, max_depth)


def v_minus(z):
    """V-(z) = int_z^0 sqrt(2U(t)) dt for z <= 0."""
    z = float(z)
    if z > 0:
        raise ValueError(f"v_minus is defined for z <= 0, got {z!r}")
    if z >= ASYMPTOTE_CUTOFF:
        return adaptive_simpson(_speed, z, 0.0)
    head = adaptive_simpson(_speed, ASYMPTOTE_CUTOFF, 0.0)
    return head + math.sqrt(2.0) * (ASYMPTOTE_CUTOFF - z)


def v_plus(z):
    """V+(z) = int_0^z sqrt(2U(t)) dt for z >= 0."""
    z = float(z)
    if z < 0:
        raise ValueError(f"v_plus is defined for z >= 0, got {z!r}")
    return adaptive_simpson(_speed, 0.0, z)


def _invert(func, h, direction):
    h = float(h)
    if h < 0 or not math.isfinite(h):
        raise ValueError(f"energy level must be finite and non-negative, got {h!r}")
    if h == 0.0:
        return 0.0
    # V grows at least like z^2/2 near 0 and linearly far out; expand until bracketed
    z = direction * min(1.0, math.sqrt(2.0 * h))
    while func(z) < h:
        z *= 2.0
    lo, hi = sorted((0.0, z))
    return brentq(lambda s: func(s) - h, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)


def v_minus_inverse(h):
    """The z <= 0 with V-(z) = h."""
    return _invert(v_minus, h, -1.0)


def v_plus_inverse(h):
    """The z >= 0 with V+(z) = h."""
    return _invert(v_plus, h, 1.0)
