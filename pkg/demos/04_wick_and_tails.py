"""Exact L2 distances from Wick pairings, then the tail studies.

Run:  python3 demos/04_wick_and_tails.py
"""
import numpy as np

from dnls_gibbs.tails import (
    concentration_dichotomy, derivative_functional, expected_net_threshold, linear_tail_study,
    quadratic_tail_study, sobolev_tail_study, sup_tail_study,
)
from dnls_gibbs.wick import hypercontractivity_check, l2_distance_analytic, l2_distance_mc

w = l2_distance_analytic(2, 4, 8)
est, se = l2_distance_mc(2, 4, 8, 50_000, seed=1)
print(f"||f_8 - f_4||^2 = {w.total:.6f} (W1 {w.w1}, W2 {w.w2:.6f}, W3 {w.w3:.6f}); MC {est:.4f} +- {se:.4f}")
print("M * distance(M, 2M):", [round(M * l2_distance_analytic(2, M, 2 * M).total, 3) for M in (4, 8, 16, 32)])
print("L4/L2 of f_16:", round(hypercontractivity_check(2, 16, 20_000, seed=2).ratio, 3), "(bound 9)")

print()
for name, curve in [
    ("sobolev s=1", sobolev_tail_study(2, 1.0, 32, np.arange(2.0, 17.0, 2.0), 50_000, 3)),
    ("linear psi'(0)", linear_tail_study(2, 32, derivative_functional(32, 1), np.linspace(0.25, 4, 16), 50_000, 4)),
    ("quadratic x=0", quadratic_tail_study(2, 32, np.arange(4.0, 33.0, 4.0), 50_000, 5)),
    ("sup over x", sup_tail_study(2, 16, expected_net_threshold(2, 16) * np.linspace(1.2, 4, 8), 10_000, 6)),
]:
    print(f"{name:15s} flagged {curve.n_flagged} of {len(curve.lambdas)}")
    if not curve.passed:
        i = int(np.argmax(curve.flagged))
        print(f"{'':15s} first at lambda={curve.lambdas[i]:.3g}: survival {curve.survival[i]:.2e} vs bound {curve.bound[i]:.2e}")

rep = concentration_dichotomy(2, 1.25, 1.75, [16, 32, 64, 128], 10_000, 7)
print("\nmedian Hdot^1.25:", np.round(rep.medians_low, 3))
print("median Hdot^1.75:", np.round(rep.medians_high, 3))
