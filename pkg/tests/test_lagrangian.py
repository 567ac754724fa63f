import numpy as np
import pytest

from eplab.errors import ConfigurationError, CrossingError, FitError
from eplab.eulerian import Scenario, run
from eplab.lagrangian import (
    LagrangianStepper, check_blowup_rate, check_ordering, detect_w_vanishing,
    ensemble_from_scenario, invariant_residuals, make_ensemble, reconstruct_density,
    run_lagrangian,
)


def test_initial_reconstruction(grid):
    for a, b in ((0.7, 3.0), (0.3, 2.0)):
        ens = ensemble_from_scenario(Scenario(rho_a=a, rho_b=b))
        rho = reconstruct_density(ens, grid)
        assert np.max(np.abs(rho - (1 - a / np.cosh(b * grid.nodes)))) < 1e-8


def test_initial_wdot_is_velocity_slope():
    ens = make_ensemble(lambda a: np.ones_like(a), lambda a: np.sin(2 * np.pi * a / 10), 10.0, 256)
    ref = 2 * np.pi / 10 * np.cos(2 * np.pi * ens.alpha / 10)
    assert np.max(np.abs(ens.wdot - ref)) < 1e-12
    assert np.all(ens.w == 1.0)


def test_equilibrium(grid):
    ens = make_ensemble(np.ones_like, np.zeros_like, 10.0, 512)
    stepper = LagrangianStepper(grid)
    new = stepper.step(stepper.step(ens, 0.1), 0.1)
    assert np.max(np.abs(new.x - ens.x)) == 0.0
    assert np.all(new.w == 1.0) and np.all(new.wdot == 0.0) and np.all(new.u == 0.0)
    assert np.max(np.abs(reconstruct_density(new, grid) - 1)) < 1e-14


def test_agrees_with_eulerian_at_t1(grid):
    sc = Scenario(t_end=1.0)
    lr = run_lagrangian(sc)
    assert lr.termination == "completed"
    rho_l = reconstruct_density(lr.ensemble, grid)
    rho_e = run(sc).state.rho
    assert np.max(np.abs(rho_l - rho_e)) < 1e-3
    assert max(lr.rho_w_residual) < 1e-5
    assert max(lr.wdot_residual) < 1e-4


def test_rk4_self_convergence():
    base = Scenario(n=256, t_end=0.8)
    x = {}
    for dt in (0.2, 0.1, 0.05):
        sc = base.updated(dt=dt)
        x[dt] = run_lagrangian(sc, n_particles=512, check_invariants=False).ensemble.x
    ratio = np.max(np.abs(x[0.2] - x[0.1])) / np.max(np.abs(x[0.1] - x[0.05]))
    assert 10 < ratio < 24


def test_residuals_at_start(grid):
    ens = ensemble_from_scenario(Scenario())
    rho_w, wdot, tail = invariant_residuals(ens, grid)
    assert rho_w < 1e-8 and wdot == 0.0 and tail < 1e-7


def test_crossing_detected():
    x = np.array([0.0, 1.0, 0.9, 2.0])
    with pytest.raises(CrossingError):
        check_ordering(x, np.ones(4), 10.0)
    with pytest.raises(CrossingError):
        check_ordering(np.arange(4.0), np.array([1, 1, 0, 1.0]), 10.0)
    with pytest.raises(CrossingError):
        check_ordering(np.array([-5.0, 0.0, 5.5]), np.ones(3), 10.0)
    check_ordering(np.array([-5.0, 0.0, 4.9]), np.ones(3), 10.0)


def test_pressure_rejected():
    with pytest.raises(ConfigurationError):
        run_lagrangian(Scenario(K=0.5))


def test_w_vanishing_linear():
    t = np.linspace(0, 2.9, 30)
    est = detect_w_vanishing(t, 1 - t / 3, -np.ones_like(t) / 3)
    assert est["wdot_at_Tstar_sign"] == "negative"
    assert est["T_star"] == pytest.approx(3.0, abs=1e-10)


def test_w_vanishing_tangential():
    t = np.linspace(0, 1.95, 40)
    rho0 = 0.4
    w = (t - 2) ** 2 * rho0 / 2
    est = detect_w_vanishing(t, w, (t - 2) * rho0)
    assert est["wdot_at_Tstar_sign"] == "zero"
    assert est["T_star"] == pytest.approx(2.0, abs=1e-10)


def test_w_vanishing_follows_smallest_particle():
    t = np.linspace(0, 2.5, 26)
    W = np.stack([1 - t / 3, 1 - t / 5, np.ones_like(t)], axis=1)
    Wd = np.stack([-np.ones_like(t) / 3, -np.ones_like(t) / 5, 0 * t], axis=1)
    est = detect_w_vanishing(t, W, Wd)
    assert est["particle"] == 0 and est["T_star"] == pytest.approx(3.0)


def test_w_vanishing_needs_trend():
    t = np.linspace(0, 1, 10)
    with pytest.raises(FitError):
        detect_w_vanishing(t, 1 + t, np.ones_like(t))


def test_rate_products():
    dt = 0.01
    t = np.arange(0, 3 - 2 * dt + 1e-12, dt)
    inside = check_blowup_rate(t, 1 / (t - 3), 3.0, "negative", dt)
    assert np.allclose(inside["products"], 1.0) and inside["pass"]
    assert len(inside["products"]) == 9
    edge = check_blowup_rate(t, 2 / (t - 3), 3.0, "negative", dt)
    assert np.allclose(edge["products"], 2.0) and not edge["pass"]
    assert check_blowup_rate(t, 2 / (t - 3), 3.0, "zero", dt)["pass"]
    with pytest.raises(FitError):
        check_blowup_rate(t[:10], t[:10], 3.0, "negative", dt)


def test_case_a_vanishing_and_rate():
    sc = Scenario(t_end=2.6)
    lr = run_lagrangian(sc)
    t, W, Wd = lr.history()
    j0 = int(np.argmin(np.abs(lr.ensemble.alpha)))
    assert np.all(np.diff(W[:, j0]) < 0)
    assert t[np.argmax(W.min(axis=1) < 1e-2)] < 2.6 and W.min() < 1e-2
    est = detect_w_vanishing(t, W, Wd)
    assert 2.0 <= est["T_star"] <= 2.6
    assert est["wdot_at_Tstar_sign"] == "negative"
    j = est["particle"]
    rate = check_blowup_rate(t, Wd[:, j] / W[:, j], est["T_star"], "negative", sc.dt)
    assert rate["pass"], rate["products"]
