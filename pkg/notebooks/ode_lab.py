"""
Zeros of w'' + a w <= b
=======================

A comparison lemma forces a zero of w when a/2 > b and the oscillator energy
condition holds.  Dropping a/2 > b, a forcing b - exp(-t) keeps w positive for
ever, so that gate cannot be removed.
"""

import math

import numpy as np

from eplab.odelab import (
    OscillatorProblem, check_lemma_hypotheses, counterexample_gates, counterexample_problem,
    has_zero_closed_form, integrate_inequality_trajectory, random_applicable_problem,
    random_decaying_forcing,
)

p = OscillatorProblem(1.0, 1 / 3, 1.0, 0.0)
tr = integrate_inequality_trajectory(p)
print("lemma instance", check_lemma_hypotheses(p))
print(f"  first zero {tr.first_zero:.10f}, 2 pi / 3 = {2 * math.pi / 3:.10f}")

gates = counterexample_gates(0.2, 1 / 3)
cp, forcing = counterexample_problem(0.2, 1 / 3)
ce = integrate_inequality_trajectory(cp, forcing, t_end=200.0)
print(f"\ncounterexample a = 0.2, b = 1/3: {gates['left']:.4f} > {gates['middle']:.4f} > "
      f"{gates['right']:.4f}")
print(f"  min w on [0, 200] = {ce.min_w:.4f}, zero: {ce.first_zero}")
print("  hypotheses", check_lemma_hypotheses(cp))

# w along the counterexample settles into oscillation about b/a
for t in (0, 10, 50, 100, 200):
    i = int(np.argmin(np.abs(ce.t - t)))
    print(f"  t = {ce.t[i]:6.1f}  w = {ce.w[i]:.4f}")

rng = np.random.default_rng(1)
late = []
for _ in range(50):
    q = random_applicable_problem(rng)
    z = integrate_inequality_trajectory(q, random_decaying_forcing(rng, q.b), stop_at_zero=True)
    late.append(z.first_zero / has_zero_closed_form(q)["first_zero"])
print(f"\n50 random applicable problems: zero always found, "
      f"at {min(late):.2f}..{max(late):.2f} times the constant-forcing zero")
