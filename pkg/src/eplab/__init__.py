"""Numerical laboratory for the 1D Euler-Poisson system with Boltzmann electrons.

    rho_t + (rho u)_x = 0
    u_t + u u_x + K rho_x / rho = -phi_x
    -phi_xx = rho - exp(phi)

Modules: ``grid`` (periodic spectral grid), ``poisson`` (Poisson-Boltzmann
solve), ``eulerian`` (Crank-Nicolson pseudo-spectral solver), ``lagrangian``
(pressureless characteristics), ``diagnostics``, ``criteria`` (blow-up
conditions), ``odelab`` (oscillator zero lemma) and ``experiments``/``cli``.
"""

from .criteria import (
    check_liu, check_pressureless, energy_upper_bound, isothermal_report, v_minus,
    v_minus_inverse, v_plus, v_plus_inverse,
)
from .diagnostics import compute_record, energy, fit_blowup_rate, riemann_fields
from .errors import (
    ConfigurationError, CrossingError, EPLabError, FitError, MissingArtifactError, NumericError,
    PreconditionError, SolverFailure,
)
from .eulerian import CrankNicolsonStepper, RunResult, Scenario, initialize, run, step
from .grid import Grid, interpolate_periodic, make_grid, quadrature, spectral_derivative
from .lagrangian import (
    CharacteristicEnsemble, check_blowup_rate, detect_w_vanishing, reconstruct_density,
    run_lagrangian, step_lagrangian,
)
from .poisson import check_elliptic_estimates, maximum_principle_holds, solve_poisson
from .state import FluidState

__version__ = "0.1.0"
