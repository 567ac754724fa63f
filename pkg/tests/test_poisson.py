import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.sparse import csc_matrix, diags
from scipy.sparse.linalg import spsolve

from eplab.errors import PreconditionError, SolverFailure
from eplab.grid import make_grid, quadrature
from eplab.poisson import (
    DEFAULT_TOL, PoissonSolver, check_elliptic_estimates, kappa0, maximum_principle_holds,
    solve_poisson,
)


def fd_poisson(rho, h):
    """Second-order periodic finite-difference Newton solve; independent oracle."""
    n = len(rho)
    D2 = diags([-2 * np.ones(n), np.ones(n - 1), np.ones(n - 1), [1.0], [1.0]],
               [0, 1, -1, n - 1, -(n - 1)], format="csc") / h**2
    phi = np.log(rho)
    for _ in range(50):
        F = -(D2 @ phi) + np.exp(phi) - rho
        if np.max(np.abs(F)) < 1e-13:
            break
        phi -= spsolve(csc_matrix(-D2 + diags(np.exp(phi))), F)
    return phi


def smooth_density(coeffs, g, floor=0.05):
    """Positive periodic density built from a few Fourier modes."""
    x = 2 * np.pi * g.nodes / g.length
    s = sum(c * np.cos((k + 1) * x + 0.7 * k) for k, c in enumerate(coeffs))
    return np.maximum(np.exp(s), floor)


def test_neutral_state(grid):
    sol = solve_poisson(np.ones(grid.n), grid)
    assert np.max(np.abs(sol.phi)) == 0.0
    assert sol.newton_iterations == 0


def test_residual_and_mean_compatibility(grid):
    rho = 1 - 0.7 / np.cosh(3 * grid.nodes)
    sol = solve_poisson(rho, grid)
    assert sol.residual_norm <= DEFAULT_TOL
    assert abs(quadrature(rho - np.exp(sol.phi), grid)) <= 10 * DEFAULT_TOL


def test_matches_finite_difference_oracle(grid):
    rho = 1 + 0.8 / np.cosh(2 * grid.nodes) - 0.3 / np.cosh(5 * (grid.nodes - 1))
    phi = solve_poisson(rho, grid).phi
    ref = fd_poisson(rho, grid.dx)
    # O(h^2) error of the oracle at h ~ 0.01
    assert np.max(np.abs(phi - ref)) < 1e-4


def test_maximum_principle(grid, rng):
    for _ in range(5):
        rho = smooth_density(rng.normal(0, 0.6, 4), grid)
        phi = solve_poisson(rho, grid).phi
        assert maximum_principle_holds(rho, phi, slack=1e-9)


def test_nonpositive_density_rejected(grid):
    rho = np.ones(grid.n)
    rho[10] = 0.0
    with pytest.raises(PreconditionError):
        solve_poisson(rho, grid)


def test_failure_reports_residual(grid):
    rho = 1 - 0.7 / np.cosh(3 * grid.nodes)
    solver = PoissonSolver(grid, tol=1e-10, max_iter=1)
    with pytest.raises(SolverFailure) as info:
        solver.solve(rho)
    assert info.value.residual > 1e-10


def test_effective_tolerance_floor():
    fine = make_grid(8192, 10.0)
    solver = PoissonSolver(fine, tol=1e-12)
    assert solver.effective_tol(np.zeros(fine.n)) > 1e-12
    rho = 1 - 0.7 / np.cosh(3 * fine.nodes)
    sol = solver.solve(rho)
    assert sol.residual_norm <= solver.effective_tol(sol.phi)


def test_kappa0():
    assert kappa0(np.array([1.0, 2.0])) == 1.0
    assert kappa0(np.array([0.3, 1.0])) == pytest.approx(0.7 / -np.log(0.3))


def test_elliptic_estimates_constant_state(grid):
    rep = check_elliptic_estimates(np.ones(grid.n), np.zeros(grid.n), grid)
    assert rep["h1_pass"] and rep["energy_pass"]
    assert rep["rhs_h1"] == 0.0


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(-0.8, 0.8), min_size=1, max_size=5))
def test_elliptic_estimates_random_densities(coeffs):
    g = make_grid(256, 10.0)
    rho = smooth_density(coeffs, g)
    phi = solve_poisson(rho, g).phi
    rep = check_elliptic_estimates(rho, phi, g)
    assert rep["h1_pass"], rep
    assert rep["energy_pass"], rep
