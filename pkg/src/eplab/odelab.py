"""Zeros of w'' + a w = b (and of the inequality w'' + a w <= b) for the Jacobian comparison argument.

The closed form w(t) = (w0 - b/a) cos(sqrt(a) t) + (wdot0/sqrt(a)) sin(sqrt(a) t) + b/a
has a zero exactly when

    a w0^2 / 2 - w0 b + wdot0^2 / 2 >= 0,

and the comparison lemma upgrades this to the inequality when additionally a/2 > b
and w0 >= 1.  The forcing b - exp(-t) with small a shows that a/2 > b cannot be
dropped.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, NumericError

ZERO_XTOL = 1e-10
STEPS_PER_PERIOD = 1000


@dataclass(frozen=True)
class OscillatorProblem:
    a: float
    b: float
    w0: float
    wdot0: float

    def __post_init__(self):
        if not self.a > 0:
            raise ConfigurationError(f"stiffness a must be positive, got {self.a!r}")

    @property
    def period(self):
        return 2.0 * math.pi / math.sqrt(self.a)


def condition_value(p):
    """a w0^2/2 - w0 b + wdot0^2/2; w has a zero iff this is >= 0."""
    return 0.5 * p.a * p.w0**2 - p.w0 * p.b + 0.5 * p.wdot0**2


def closed_form(p, t):
    sa = math.sqrt(p.a)
    c = p.b / p.a
    t = np.asarray(t, dtype=float)
    return (p.w0 - c) * np.cos(sa * t) + (p.wdot0 / sa) * np.sin(sa * t) + c


def has_zero_closed_form(p):
    """Whether w(t) = 0 for some t > 0, and the first such t.

    With w = A cos(sqrt(a) t - theta) + c, zeros sit where the cosine equals
    -c/A; the smallest positive root is picked among the two branches.
    """
    sa = math.sqrt(p.a)
    c = p.b / p.a
    A = math.hypot(p.w0 - c, p.wdot0 / sa)
    if A == 0.0:
        return {"has_zero": c == 0.0, "first_zero": 0.0 if c == 0.0 else None,
                "condition": condition_value(p)}
    ratio = -c / A
    if abs(ratio) > 1.0:
        return {"has_zero": False, "first_zero": None, "condition": condition_value(p)}
    theta = math.atan2(p.wdot0 / sa, p.w0 - c)
    base = math.acos(min(1.0, max(-1.0, ratio)))
    tiny = 1e-12 * p.period
    best = math.inf
    for phase in (theta + base, theta - base):
        t = phase / sa
        # shift by whole periods to the first root after t = 0
        t -= math.floor((t - tiny) / p.period) * p.period
        if t <= tiny:
            t += p.period
        best = min(best, t)
    return {"has_zero": True, "first_zero": best, "condition": condition_value(p)}


def check_lemma_hypotheses(p):
    """Gates of the comparison lemma: a/2 > b, strict zero condition, and w0 >= 1."""
    half = p.a / 2.0 > p.b
    strict = condition_value(p) > 0.0
    return {"a_half_gt_b": bool(half), "condition_A2_strict": bool(strict),
            "applicable": bool(half and strict and p.w0 >= 1.0)}


def counterexample_gates(a, b=1.0 / 3.0):
    """1/(2(a+1)^2) > b - a/2 > a/(a+1): the window in which b - exp(-t) forcing never vanishes."""
    left = 1.0 / (2.0 * (a + 1.0) ** 2)
    mid = b - a / 2.0
    right = a / (a + 1.0)
    return {"left": left, "middle": mid, "right": right, "pass": bool(left > mid > right)}


def counterexample_problem(a=0.2, b=1.0 / 3.0):
    """Problem and forcing b - exp(-t) with w0 = 1, wdot0 = 1/(a+1)."""
    return OscillatorProblem(a, b, 1.0, 1.0 / (a + 1.0)), (lambda t: b - math.exp(-t))


@dataclass
class Trajectory:
    t: np.ndarray
    w: np.ndarray
    wdot: np.ndarray
    min_w: float
    first_zero: float | None


def _hermite(t0, t1, y0, y1, d0, d1, s):
    h = t1 - t0
    x = (s - t0) / h
    h00 = (1 + 2 * x) * (1 - x) ** 2
    h10 = x * (1 - x) ** 2
    h01 = x * x * (3 - 2 * x)
    h11 = x * x * (x - 1)
    return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1


def _refine_zero(t0, t1, y0, y1, d0, d1, xtol=ZERO_XTOL):
    lo, hi = t0, t1
    flo = y0
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        fm = _hermite(t0, t1, y0, y1, d0, d1, mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def integrate_inequality_trajectory(p, rhs=None, t_end=None, dt=None, stop_at_zero=False):
    """RK4 for w'' + a w = rhs(t), with the first zero located on the cubic Hermite dense output.

    ``rhs`` defaults to the constant b.  ``dt`` defaults to 1e-3 of the
    oscillation period and ``t_end`` to four periods.
    """
    rhs = rhs or (lambda t: p.b)
    dt = dt or p.period / STEPS_PER_PERIOD
    t_end = 4.0 * p.period if t_end is None else t_end
    n = int(math.ceil(t_end / dt - 1e-9))
    dt = t_end / n
    a = p.a
    ts = np.empty(n + 1)
    ws = np.empty(n + 1)
    vs = np.empty(n + 1)
    t, w, v = 0.0, float(p.w0), float(p.wdot0)
    ts[0], ws[0], vs[0] = t, w, v
    first = None
    last = n
    for i in range(1, n + 1):
        f1 = rhs(t) - a * w
        w2, v2 = w + 0.5 * dt * v, v + 0.5 * dt * f1
        f2 = rhs(t + 0.5 * dt) - a * w2
        w3, v3 = w + 0.5 * dt * v2, v + 0.5 * dt * f2
        f3 = rhs(t + 0.5 * dt) - a * w3
        w4, v4 = w + dt * v3, v + dt * f3
        f4 = rhs(t + dt) - a * w4
        wn = w + dt * (v + 2 * v2 + 2 * v3 + v4) / 6.0
        vn = v + dt * (f1 + 2 * f2 + 2 * f3 + f4) / 6.0
        tn = i * dt
        if not (math.isfinite(wn) and math.isfinite(vn)):
            raise NumericError(f"non-finite trajectory at t = {tn:g}")
        if first is None and i > 1 and wn == 0.0:
            first = tn
        elif first is None and (w > 0) != (wn > 0) and w != 0.0:
            first = _refine_zero(t, tn, w, wn, v, vn)
        t, w, v = tn, wn, vn
        ts[i], ws[i], vs[i] = t, w, v
        if stop_at_zero and first is not None:
            last = i
            break
    ts, ws, vs = ts[: last + 1], ws[: last + 1], vs[: last + 1]
    return Trajectory(t=ts, w=ws, wdot=vs, min_w=float(ws.min()), first_zero=first)


def oscillator_energy(p, w, wdot):
    """(wdot^2 + a w^2)/2 - b w, conserved for constant forcing b."""
    return 0.5 * (np.asarray(wdot) ** 2 + p.a * np.asarray(w) ** 2) - p.b * np.asarray(w)


def random_decaying_forcing(rng, b, n_terms=3):
    """b - q(t) with q a nonnegative mixture of decaying exponentials."""
    amps = rng.uniform(0.0, 1.0, n_terms)
    rates = rng.uniform(0.1, 3.0, n_terms)
    return lambda t: b - float(np.sum(amps * np.exp(-rates * t)))


def random_applicable_problem(rng):
    """An instance satisfying all comparison-lemma gates."""
    a = float(rng.uniform(0.1, 10.0))
    b = float(rng.uniform(-a, a / 2.0))
    if b >= a / 2.0:
        b = a / 4.0
    w0 = float(rng.uniform(1.0, 3.0))
    wdot0 = float(rng.uniform(-2.0, 2.0))
    return OscillatorProblem(a, b, w0, wdot0)


def lab_report(a=0.2, b=1.0 / 3.0, t_end=200.0):
    """Gates and verdicts for the lemma instance and the decaying-forcing counterexample."""
    lemma = OscillatorProblem(1.0, 1.0 / 3.0, 1.0, 0.0)
    lemma_traj = integrate_inequality_trajectory(lemma)
    cp, forcing = counterexample_problem(a, b)
    traj = integrate_inequality_trajectory(cp, forcing, t_end=t_end)
    return {
        "lemma_instance": {**check_lemma_hypotheses(lemma), "first_zero": lemma_traj.first_zero,
                           "closed_form_zero": has_zero_closed_form(lemma)["first_zero"]},
        "counterexample": {
            "a": a, "b": b, "w0": cp.w0, "wdot0": cp.wdot0,
            "gates": counterexample_gates(a, b),
            "hypotheses": check_lemma_hypotheses(cp),
            "min_w": traj.min_w, "has_zero": traj.first_zero is not None, "t_end": t_end,
        },
    }
