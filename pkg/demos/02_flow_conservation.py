"""Integrate DNLS and watch E_0..E_3 stay put.

Run:  python3 demos/02_flow_conservation.py
"""
import numpy as np

from dnls_gibbs.hierarchy import generate, printed_integrals, to_complex
from dnls_gibbs.spectral import FourierField, NormSpec, flow_series, sobolev_norm

beta = 0.5
psi0 = FourierField.from_modes(32, {1: 0.1, -2: 0.05})
Es = [to_complex(e.h) for e in generate(6)[::2]]

field, rows = flow_series(psi0, beta, 1.0, 1e-4, Es + [printed_integrals()[2]], every=2000)
rows = np.array(rows)
print(" t      " + "  ".join(f"{name:>22s}" for name in ("E0", "E1", "E2", "E3", "printed h2")))
for r in rows:
    print(f"{r[0]:.2f}  " + "  ".join(f"{v:22.16e}" for v in r[1:]))

drift = np.abs(rows[-1, 1:] - rows[0, 1:]) / np.abs(rows[0, 1:])
print("\nrelative drift:", ", ".join(f"{d:.1e}" for d in drift))
print("the printed h2 is the only one that moves.")

print("\nHdot^1 norm before/after:",
      sobolev_norm(psi0, NormSpec(1, True)), sobolev_norm(field, NormSpec(1, True)))
