"""Sample gamma_2 and watch the Gibbs density settle as N grows.

Run:  python3 demos/03_gibbs_density.py
"""
import numpy as np

from dnls_gibbs.gibbs import GibbsDensity, GibbsSpec, density_convergence_study, mode_std, sample_coeffs

spec = GibbsSpec(k=2, N=64, beta=1.0, seed=2024)
print("radii R_0, R_1:", spec.radii)

# Mode variances decay like (1+|n|^2)^-2.
c = sample_coeffs(2, 8, 50_000, seed=1)
print("E|psi_n|^2  n=0..4:", np.round(np.mean(np.abs(c[:, 8:13]) ** 2, axis=0), 4))
print("expected          :", np.round(mode_std(2, 8)[8:13] ** 2, 4))

dens = GibbsDensity(spec)
g = dens(sample_coeffs(2, 16, 8, seed=3), 16)
print("\nG_{2,16} on a few draws:", np.round(g, 4))

rep = density_convergence_study(spec, [8, 16, 32, 64], 10_000)
print("\n N   E|G_N - G_2N|   stderr")
for N, d, se in rep.diffs:
    print(f"{N:3d}   {d:.5f}         {se:.5f}")
print("strictly decreasing:", rep.strictly_decreasing)
print("E[G^1.5] across N:", [round(m, 4) for N, p, m, _ in rep.moments if p == 1.5])
