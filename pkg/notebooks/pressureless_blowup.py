"""
Density blow-up of the cold-ion model, seen from both frames
=============================================================

Case (a), 1 - 0.7 sech(3x) at rest: the Eulerian spectral solver tracks rho(0,t)
and -u_x(0,t) until the gradient threshold, and the characteristic solver
follows the Jacobian w of the particle at the origin down to zero.
"""

import tempfile

import numpy as np

from eplab.config import load_config
from eplab.experiments import plotdata, run_experiment
from eplab.eulerian import run
from eplab.lagrangian import check_blowup_rate, detect_w_vanishing, run_lagrangian

cfg = load_config(preset="table1-a", environ={})
sc = cfg.scenario

res = run(sc)
est = res.blowup_estimate
print(f"Eulerian: {res.termination} at t = {res.state.time:.2f}")
print(f"  T* = {est['T_star']:.4f} from {est['samples']} samples, rate constant {est['rate_constant']:.3f}")

t = np.asarray(res.series["t"])
for tt in (0.0, 1.0, 1.5, 2.0, 2.3):
    i = int(round(tt / sc.dt))
    print(f"  t = {t[i]:4.2f}  rho(0) = {res.series['rho_origin'][i]:7.4f}"
          f"  -u_x(0) = {res.series['minus_ux_origin'][i]:8.4f}")

# characteristic picture: w = dx/dalpha vanishes where the density blows up
lr = run_lagrangian(sc.updated(t_end=2.6))
tl, W, Wd = lr.history()
vanish = detect_w_vanishing(tl, W, Wd)
j = vanish["particle"]
rate = check_blowup_rate(tl, Wd[:, j] / W[:, j], vanish["T_star"], vanish["wdot_at_Tstar_sign"], sc.dt)
print(f"\nLagrangian: {lr.termination} at t = {lr.ensemble.time:.2f}")
print(f"  w vanishes at T* = {vanish['T_star']:.4f}, order {vanish['order']:.2f}, "
      f"wdot(T*) {vanish['wdot_at_Tstar_sign']}")
print(f"  (t - T*) u_x near T*: {np.round(rate['products'], 3)} in {rate['bracket']}")

# plot-ready data for rho(0,t) and -u_x(0,t)
with tempfile.TemporaryDirectory() as tmp:
    run_experiment(cfg, f"{tmp}/run")
    for path in plotdata([f"{tmp}/run"], "fig2", tmp, svg=True):
        print("wrote", path.name)
