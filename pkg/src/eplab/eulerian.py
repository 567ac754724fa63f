"""Crank-Nicolson (implicit midpoint) pseudo-spectral solver for the Euler-Poisson system.

Unknowns are density and velocity; the momentum balance is advanced in the
velocity form  u_t + u u_x + K rho_x / rho = -phi_x.  Each step solves

    U1 = U0 + dt * N((U0 + U1) / 2)

with the potential of the averaged density, by a fixed-point iteration whose
update is preconditioned with the constant-coefficient linearisation about the
mean state (inverted exactly mode by mode).
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from . import diagnostics as diag
from .errors import ConfigurationError, FitError, NumericError, PreconditionError, SolverFailure
from .grid import dealias, make_grid
from .poisson import DEFAULT_TOL, PoissonSolver
from .state import (
    DENSITY_PRESETS, VELOCITY_PRESETS, FluidState, density_profile, tail_magnitude,
    velocity_profile,
)

log = logging.getLogger(__name__)

COMPLETED = "completed"
BLOWUP = "blowup_detected"
FAILURE = "solver_failure"

# a failed step counts as blow-up only if gradients were already this steep
FAILURE_GRADIENT_FLOOR = 1e2
# memory of the Anderson-accelerated fixed-point iteration
ANDERSON_DEPTH = 6
# blow-up fit uses samples whose spectrum is resolved to this level
RESOLVED_TAIL = 1e-3
RELAXED_CUTOFF = -3.0


@dataclass(frozen=True)
class Scenario:
    """Full run configuration (model, grid, time stepping, initial data, tolerances)."""

    K: float = 0.0
    n: int = 1024
    length: float = 10.0
    dt: float = 0.01
    t_end: float = 1.0
    output_stride: int = 10
    rho_preset: str = "one_minus_a_sech_bx"
    rho_a: float = 0.7
    rho_b: float = 3.0
    rho_mode: int = 1
    u_preset: str = "zero"
    u_a: float = 1.0
    u_b: float = 1.0
    u_mode: int = 1
    table: str | None = None
    poisson_tol: float = DEFAULT_TOL
    picard_tol: float = 1e-11
    max_picard: int = 100
    blowup_threshold: float = 1e3
    dealias: bool = False
    snapshot_times: tuple = ()

    def __post_init__(self):
        if not self.K >= 0:
            raise ConfigurationError(f"model.K must be >= 0, got {self.K!r}")
        if not self.dt > 0:
            raise ConfigurationError(f"time.dt must be > 0, got {self.dt!r}")
        if not self.t_end > 0:
            raise ConfigurationError(f"time.t_end must be > 0, got {self.t_end!r}")
        if self.output_stride < 1:
            raise ConfigurationError("time.output_stride must be >= 1")
        if self.rho_preset not in DENSITY_PRESETS:
            raise ConfigurationError(f"init.preset must be one of {DENSITY_PRESETS}, got {self.rho_preset!r}")
        if self.u_preset not in VELOCITY_PRESETS:
            raise ConfigurationError(f"init.u_preset must be one of {VELOCITY_PRESETS}, got {self.u_preset!r}")
        if self.rho_preset == "one_minus_a_sech_bx" and not self.rho_a < 1:
            raise ConfigurationError("init.a must be < 1 for one_minus_a_sech_bx")
        make_grid(self.n, self.length)

    def grid(self):
        return make_grid(self.n, self.length)

    def updated(self, **changes):
        return replace(self, **changes)


@dataclass
class RunResult:
    state: FluidState
    termination: str
    blowup_estimate: dict | None
    records: list = field(default_factory=list)
    series: dict = field(default_factory=dict)
    snapshots: list = field(default_factory=list)
    H0: float = float("nan")
    steps: int = 0
    message: str = ""
    metadata: dict = field(default_factory=dict)


def initial_fields(scenario, g=None):
    g = g or scenario.grid()
    rho = density_profile(
        g.nodes, scenario.rho_preset, scenario.rho_a, scenario.rho_b,
        scenario.length, scenario.table, scenario.rho_mode,
    )
    u = velocity_profile(
        g.nodes, scenario.u_preset, scenario.u_a, scenario.u_b,
        scenario.length, scenario.table, scenario.u_mode,
    )
    return rho, u


def initialize(scenario, solver=None):
    """Sample the initial data and solve for the consistent potential at t = 0."""
    g = scenario.grid()
    solver = solver or PoissonSolver(g, tol=scenario.poisson_tol)
    rho, u = initial_fields(scenario, g)
    phi = solver.solve(rho).phi
    return FluidState(0.0, rho, u, phi)


class CrankNicolsonStepper:
    """Owns the grid symbols, Poisson workspace and iteration counters of one run."""

    def __init__(self, scenario):
        self.scenario = scenario
        self.grid = g = scenario.grid()
        self.poisson = PoissonSolver(g, tol=scenario.poisson_tol)
        k = g.rfft_wavenumbers
        self._ik = 1j * k
        if g.n % 2 == 0:
            self._ik[-1] = 0.0
        self._k2 = k**2
        self.picard_iterations = []

    def _dx(self, f):
        return np.fft.irfft(self._ik * np.fft.rfft(f), n=self.grid.n)

    def _filter(self, f):
        return dealias(f, self.grid) if self.scenario.dealias else f

    def rhs(self, rho, u, phi):
        """Right-hand side N(rho, u) with the supplied potential."""
        K = self.scenario.K
        flux = self._filter(rho * u)
        drho = -self._dx(flux)
        ux = self._dx(u)
        du = -(self._filter(u * ux) + self._dx(phi))
        if K:
            du -= K * self._filter(self._dx(rho) / rho)
        return drho, du

    def _preconditioner(self, rho_bar, u_bar, c):
        """Per-mode inverse of I - dt/2 * A0, A0 the linearisation about a constant state."""
        K, dt = self.scenario.K, self.scenario.dt
        a = 0.5 * dt * self._ik
        speed2 = K + rho_bar / (self._k2 + c)
        d = 1.0 + a * u_bar
        det = d * d - a * a * speed2
        p11 = d / det
        p12 = -a * rho_bar / det
        p21 = -a * (K / rho_bar + 1.0 / (self._k2 + c)) / det
        return p11, p12, p21

    def step(self, state):
        sc, n = self.scenario, self.grid.n
        dt = sc.dt
        rho0, u0 = state.rho, state.u
        p11, p12, p21 = self._preconditioner(
            float(np.mean(rho0)), float(np.mean(u0)), float(np.mean(np.exp(state.phi)))
        )
        phi_half = state.phi

        def correction(x):
            # preconditioned residual -P^{-1} R(x) of the midpoint equations
            nonlocal phi_half
            rho1, u1 = x[:n], x[n:]
            rho_h = 0.5 * (rho0 + rho1)
            if not np.all(np.isfinite(rho_h)) or np.min(rho_h) <= 0:
                raise SolverFailure("density lost positivity during the implicit solve")
            phi_half = self.poisson.solve(rho_h, initial_guess=phi_half).phi
            drho, du = self.rhs(rho_h, 0.5 * (u0 + u1), phi_half)
            rh = np.fft.rfft(rho1 - rho0 - dt * drho)
            uh = np.fft.rfft(u1 - u0 - dt * du)
            return -np.concatenate((np.fft.irfft(p11 * rh + p12 * uh, n=n),
                                    np.fft.irfft(p21 * rh + p11 * uh, n=n)))

        f0 = self.rhs(rho0, u0, state.phi)
        x = np.concatenate((rho0 + dt * f0[0], u0 + dt * f0[1]))
        dxs, dfs = [], []
        x_prev = f_prev = None
        diff = np.inf
        for it in range(1, sc.max_picard + 1):
            f = correction(x)
            diff = float(np.max(np.abs(f)))
            if not np.isfinite(diff):
                raise SolverFailure("non-finite update in the implicit solve")
            if diff <= sc.picard_tol:
                x = x + f
                break
            if f_prev is not None:
                dxs.append(x - x_prev)
                dfs.append(f - f_prev)
                if len(dfs) > ANDERSON_DEPTH:
                    dxs.pop(0)
                    dfs.pop(0)
            x_prev, f_prev = x, f
            if dfs:
                dF = np.column_stack(dfs)
                gamma = np.linalg.lstsq(dF, f, rcond=None)[0]
                x = x + f - (np.column_stack(dxs) + dF) @ gamma
            else:
                x = x + f
        else:
            raise SolverFailure(
                f"fixed-point iteration did not reach {sc.picard_tol:g} in {sc.max_picard} sweeps",
                residual=diff,
            )
        self.picard_iterations.append(it)
        rho1, u1 = x[:n], x[n:]
        if np.min(rho1) <= 0:
            raise SolverFailure("density lost positivity")
        # extrapolated guess: phi(t+dt) ~ 2 phi(t+dt/2) - phi(t)
        phi1 = self.poisson.solve(rho1, initial_guess=2.0 * phi_half - state.phi).phi
        return FluidState(state.time + dt, rho1, u1, phi1)


def step(state, scenario, stepper=None):
    """Advance ``state`` by one Crank-Nicolson step of size ``scenario.dt``."""
    stepper = stepper or CrankNicolsonStepper(scenario)
    return stepper.step(state)


def spectral_tail(f):
    """Largest Fourier amplitude in the top third of the spectrum, relative to the largest overall."""
    h = np.abs(np.fft.rfft(f))
    return float(h[2 * len(h) // 3:].max() / h.max())


def _gradients(stepper, state):
    ux = stepper._dx(state.u)
    rx = stepper._dx(state.rho)
    return ux, rx


def run(scenario, record_every_step=False, keep_states=False):
    """March from t = 0 to ``t_end`` or until blow-up / solver failure.

    Records a ``DiagnosticsRecord`` every ``output_stride`` steps and a cheap
    per-step series (time, rho(0), -u_x(0), min u_x, max |u_x|, max |rho_x|,
    max rho) used for blow-up fitting and figure data.
    """
    stepper = CrankNicolsonStepper(scenario)
    g = stepper.grid
    state = initialize(scenario, stepper.poisson)
    H0 = diag.energy(state, scenario.K, g)
    origin = int(np.argmin(np.abs(g.nodes)))
    series = {k: [] for k in ("t", "rho_origin", "minus_ux_origin", "min_ux", "max_abs_ux",
                              "max_abs_rhox", "max_rho", "spectral_tail", "H")}
    records, snapshots, states = [], [], []
    # without explicit snapshot times keep the first and last state
    snap_times = sorted(scenario.snapshot_times) or [0.0, scenario.t_end]
    n_steps = int(round(scenario.t_end / scenario.dt))

    def log_series(st):
        ux, rx = _gradients(stepper, st)
        series["t"].append(st.time)
        series["rho_origin"].append(float(st.rho[origin]))
        series["minus_ux_origin"].append(float(-ux[origin]))
        series["min_ux"].append(float(np.min(ux)))
        series["max_abs_ux"].append(float(np.max(np.abs(ux))))
        series["max_abs_rhox"].append(float(np.max(np.abs(rx))))
        series["max_rho"].append(float(np.max(st.rho)))
        series["spectral_tail"].append(spectral_tail(st.rho))
        series["H"].append(diag.energy(st, scenario.K, g) if record_every_step else float("nan"))
        return max(series["max_abs_ux"][-1], series["max_abs_rhox"][-1])

    def take_snapshot(st):
        while snap_times and st.time >= snap_times[0] - 0.5 * scenario.dt:
            snapshots.append(st)
            snap_times.pop(0)

    grad = log_series(state)
    records.append(diag.compute_record(state, scenario.K, g, H0))
    take_snapshot(state)
    if keep_states:
        states.append(state)
    termination, message = COMPLETED, ""
    steps = 0
    for i in range(1, n_steps + 1):
        try:
            new = stepper.step(state)
        except (SolverFailure, NumericError, PreconditionError) as exc:
            message = str(exc)
            termination = BLOWUP if grad > FAILURE_GRADIENT_FLOOR else FAILURE
            log.info("step %d failed at t=%.4f: %s", i, state.time, exc)
            break
        state = new.with_time(i * scenario.dt)
        steps = i
        grad = log_series(state)
        if keep_states:
            states.append(state)
        take_snapshot(state)
        if i % scenario.output_stride == 0 or grad > scenario.blowup_threshold:
            records.append(diag.compute_record(state, scenario.K, g, H0))
        if grad > scenario.blowup_threshold:
            termination = BLOWUP
            message = f"max gradient {grad:.4g} exceeded threshold {scenario.blowup_threshold:g}"
            break
    if records[-1].time != state.time:
        records.append(diag.compute_record(state, scenario.K, g, H0))
    if termination != COMPLETED and (not snapshots or snapshots[-1] is not state):
        snapshots.append(state)

    estimate = None
    if termination == BLOWUP:
        estimate = blowup_estimate(series, scenario.dt)
    result = RunResult(
        state=state, termination=termination, blowup_estimate=estimate, records=records,
        series=series, snapshots=snapshots, H0=H0, steps=steps, message=message,
    )
    result.metadata = {
        "tail_rho": tail_magnitude(scenario.rho_preset, scenario.rho_a, scenario.rho_b, scenario.length),
        "tail_u": tail_magnitude(scenario.u_preset, scenario.u_a, scenario.u_b, scenario.length),
        "mean_picard_iterations": float(np.mean(stepper.picard_iterations)) if stepper.picard_iterations else 0.0,
        "max_picard_iterations": int(max(stepper.picard_iterations, default=0)),
    }
    if keep_states:
        result.metadata["states"] = states
    return result


def blowup_estimate(series, dt, resolved_tail=RESOLVED_TAIL):
    """T* and rate constant from the tail of min u_x; falls back to the last time.

    Only samples whose density spectrum is still resolved (relative amplitude
    in the top third below ``resolved_tail``) enter the fit, since past that
    point the computed gradient lags the true one and biases T* late.  The
    cutoff on min u_x is relaxed when too few resolved samples lie below it.
    """
    t = np.asarray(series["t"])
    m = np.asarray(series["min_ux"])
    tail = np.asarray(series.get("spectral_tail", np.zeros_like(t)))
    resolved = np.nonzero(tail > resolved_tail)[0]
    end = resolved[0] if len(resolved) else len(t)
    for cutoff in (diag.RATE_FIT_CUTOFF, RELAXED_CUTOFF):
        try:
            fit = diag.fit_blowup_rate(t[:end], m[:end], cutoff=cutoff)
            return {"T_star": fit["T_star"], "rate_constant": fit["c"], "method": "rate_fit",
                    "samples": fit["samples"], "cutoff": cutoff, "fit_end": float(t[end - 1])}
        except FitError as exc:
            log.info("rate fit with cutoff %g failed (%s)", cutoff, exc)
    return {"T_star": float(t[-1] + dt), "rate_constant": float("nan"),
            "method": "last_time", "samples": 0}


def dispersion_frequency(xi, K):
    """Linear frequency |xi| sqrt(K + 1/(1 + xi^2)) about the neutral state."""
    xi = np.asarray(xi, dtype=float)
    return np.abs(xi) * np.sqrt(K + 1.0 / (1.0 + xi**2))


def measure_linear_frequency(K, mode, length=10.0, n=256, amplitude=1e-5, dt=0.01, periods=4):
    """Angular frequency of a small standing wave rho = 1 + amplitude cos(2 pi mode x / L).

    The cosine coefficient of rho at ``mode`` oscillates like cos(omega t); omega
    is pi over the mean spacing of its sign changes (located by linear
    interpolation).
    """
    xi = 2.0 * np.pi * mode / length
    omega = float(dispersion_frequency(xi, K))
    t_end = periods * 2.0 * np.pi / omega
    sc = Scenario(K=K, n=n, length=length, dt=dt, t_end=t_end, rho_preset="cosine",
                  rho_a=amplitude, rho_mode=mode)
    stepper = CrankNicolsonStepper(sc)
    state = initialize(sc, stepper.poisson)
    t, c = [0.0], [np.fft.rfft(state.rho)[mode].real]
    for i in range(1, int(np.ceil(t_end / dt)) + 1):
        state = stepper.step(state)
        t.append(i * dt)
        c.append(np.fft.rfft(state.rho)[mode].real)
    t, c = np.asarray(t), np.asarray(c)
    idx = np.nonzero(np.sign(c[:-1]) != np.sign(c[1:]))[0]
    if len(idx) < 2:
        raise FitError("too few sign changes to measure a frequency")
    crossings = t[idx] - c[idx] * (t[idx + 1] - t[idx]) / (c[idx + 1] - c[idx])
    return float(np.pi / np.mean(np.diff(crossings)))
