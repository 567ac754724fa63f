"""
Warm ions versus cold ions
==========================

The same hump 1 + sech(x) moving right with u = sech(x) persists without ion
pressure but steepens into a front when K = 0.5.  The front's gradient grows
with resolution while rho and u stay bounded, which is the signature of a
gradient (shock-like) singularity rather than a density one.
"""

import numpy as np

from eplab.config import load_config
from eplab.eulerian import run

for preset in ("table2-comparison3-k0", "table2-comparison3-k05"):
    sc = load_config(preset=preset, environ={}).scenario
    res = run(sc)
    st = res.state
    print(f"K = {sc.K}: {res.termination} at t = {st.time:.2f}, "
          f"max|rho-1| = {np.max(np.abs(st.rho - 1)):.3f}, max|u| = {np.max(np.abs(st.u)):.3f}, "
          f"max|rho_x| = {res.series['max_abs_rhox'][-1]:.1f}")

# Isothermal case (a): the largest gradient the grid can hold scales with n.
base = load_config(preset="isothermal-a", environ={}).scenario
for n in (1024, 2048, 4096):
    res = run(base.updated(n=n, dealias=True))
    st = res.state
    print(f"n = {n:5d}: {res.termination:16} t = {st.time:.3f}  "
          f"max|rho_x| = {max(res.series['max_abs_rhox']):7.1f}  "
          f"max|rho-1| = {np.max(np.abs(st.rho - 1)):.3f}")

# Small hole, both models: the perturbation spreads and stays small, no singularity.
for preset in ("decay-k0", "decay-k05"):
    res = run(load_config(preset=preset, environ={}).scenario)
    print(preset, res.termination, [f"{s.time:.0f}:{np.max(np.abs(s.rho - 1)):.3f}"
                                    for s in res.snapshots])
