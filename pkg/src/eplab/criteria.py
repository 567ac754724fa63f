"""Blow-up criteria for the pressureless and isothermal models and their proof constants."""

import math
from dataclasses import asdict, dataclass

import numpy as np

from .diagnostics import energy, riemann_fields
from .errors import PreconditionError
from .grid import quadrature, spectral_derivative
from .poisson import kappa0, solve_poisson
from .state import FluidState
from .vfunctions import v_minus, v_minus_inverse, v_plus, v_plus_inverse, well  # noqa: F401


def _initial_state(rho0, u0, g, tol=None):
    rho0 = g.check(rho0, "rho0")
    u0 = g.check(u0, "u0")
    if np.min(rho0) <= 0:
        raise PreconditionError("initial density must be positive")
    sol = solve_poisson(rho0, g) if tol is None else solve_poisson(rho0, g, tol=tol)
    return FluidState(0.0, rho0, u0, sol.phi)


def initial_energy(rho0, u0, g, K=0.0):
    """H(0) with the potential solved from rho0."""
    return energy(_initial_state(rho0, u0, g), K, g)


@dataclass
class PressurelessCriterionReport:
    H0: float
    v_minus_inv_H0: float
    lhs: float
    witness_alpha: float
    rhs: float
    holds: bool
    margin: float

    def as_dict(self):
        return asdict(self)


def check_pressureless(rho0, u0, g):
    """exp(V-^{-1}(H(0))) > 2 rho0(alpha), tested at the global minimiser of rho0.

    The right side is smallest there, so the condition holds for some alpha
    exactly when it holds at that witness.
    """
    H0 = initial_energy(rho0, u0, g, K=0.0)
    z = v_minus_inverse(max(H0, 0.0))
    lhs = math.exp(z)
    j = int(np.argmin(rho0))
    rhs = 2.0 * float(rho0[j])
    return PressurelessCriterionReport(
        H0=H0, v_minus_inv_H0=z, lhs=lhs, witness_alpha=float(g.nodes[j]),
        rhs=rhs, holds=bool(lhs > rhs), margin=lhs - rhs,
    )


def check_liu(rho0, u0, g):
    """Classical gradient condition u0' <= -sqrt(2 rho0) at some node."""
    rho0 = g.check(rho0, "rho0")
    if np.min(rho0) <= 0:
        raise PreconditionError("initial density must be positive")
    slack = spectral_derivative(u0, g, 1) + np.sqrt(2.0 * rho0)
    j = int(np.argmin(slack))
    return {"holds": bool(slack[j] <= 0), "witness": float(g.nodes[j]), "value": float(slack[j])}


def energy_upper_bound(rho0, u0, g, K=0.0):
    """H(0) <= (sup rho0)/2 int u0^2 + (1/kappa0) int |rho0 - 1|^2.

    For K > 0 the bound carries an extra C delta term with an unspecified
    constant; only the K-independent part above is asserted and the report
    says so.
    """
    H0 = initial_energy(rho0, u0, g, K)
    k0 = kappa0(rho0)
    bound = 0.5 * float(np.max(rho0)) * quadrature(u0**2, g) + quadrature((rho0 - 1.0) ** 2, g) / k0
    out = {"H0": H0, "kappa0": k0, "bound": bound, "pass": bool(H0 <= bound + 1e-12)}
    if K > 0:
        out["note"] = "C*delta correction not checkable (constant is not explicit)"
    return out


@dataclass
class IsothermalCriterionReport:
    delta_eff: float
    steepness: float
    T0: float
    eps: float
    delta0: float
    alpha: float
    beta: float
    C2: float
    gamma: float
    M_required: float
    satisfied: bool
    Tm_lower: float

    def as_dict(self):
        return asdict(self)


def proof_constants(T0, eps, delta0):
    """(alpha, beta, C2, gamma, M_required) from the density bracket and the Riccati comparison."""
    if not T0 > 0:
        raise PreconditionError(f"T0 must be positive, got {T0!r}")
    if not 0 < eps < 0.25:
        raise PreconditionError(f"eps must lie in (0, 1/4), got {eps!r}")
    if not 0 < delta0 < eps:
        raise PreconditionError(f"delta0 must lie in (0, eps), got {delta0!r}")
    alpha = math.sqrt(1.0 - eps) / 2.0
    beta = math.sqrt(1.0 + eps) / 2.0
    C2 = max(math.exp(v_plus_inverse(delta0)) - 1.0, 1.0 - math.exp(v_minus_inverse(delta0)))
    gamma = (C2 + 2.0 * eps) / (2.0 * beta)
    M = gamma * T0 + 1.0 / (alpha * T0)
    return alpha, beta, C2, gamma, M


def isothermal_report(rho0, u0, g, K, T0, eps, delta0):
    """Steepness of the initial Riemann gradients against the explicit proof constants."""
    if not K > 0:
        raise PreconditionError("isothermal report needs K > 0")
    alpha, beta, C2, gamma, M = proof_constants(T0, eps, delta0)
    state = _initial_state(rho0, u0, g)
    H0 = energy(state, K, g)
    rf = riemann_fields(state, K, g)
    steep = float(max(np.max(rf.f), np.max(rf.g_fn)))
    delta_eff = float(max(np.max(np.abs(state.rho - 1.0)), np.max(np.abs(state.u)), H0))
    root = math.sqrt(gamma / beta)
    Tm = min(1.0 / (beta * (float(np.max(np.abs(rf.f))) + root)),
             1.0 / (beta * (float(np.max(np.abs(rf.g_fn))) + root)))
    return IsothermalCriterionReport(
        delta_eff=delta_eff, steepness=steep, T0=T0, eps=eps, delta0=delta0,
        alpha=alpha, beta=beta, C2=C2, gamma=gamma, M_required=M,
        satisfied=bool(steep >= M and delta_eff <= delta0), Tm_lower=Tm,
    )
