"""Walk up the Lenard-Magri ladder and look at what comes out.

Run:  python3 demos/01_integrals_of_motion.py
"""
from dnls_gibbs.diffpoly import functional_eq, normal_form
from dnls_gibbs.rational import format_coeff
from dnls_gibbs.hierarchy import (
    compare_printed, generate, involution_holds, printed_integrals, q_decomposition, to_complex,
)

entries = generate(6)

# The first rungs in real variables a, b (psi = a + ib).
for e in entries[:3]:
    print(f"h{e.n} =", e.h)
    print("   bigrading (beta^j, deg, dd):", [c[:3] for c in e.beta_parts])

# In complex variables, reduced modulo total derivatives.
print()
for n in range(5):
    print(f"h{n} in psi:", normal_form(to_complex(entries[n].h)))

# Comparing against the commonly printed list: h2 disagrees in its beta-linear term.
print()
for n, (same, diff) in compare_printed(entries).items():
    print(f"h{n}: {'same functional' if same else 'differs by ' + diff.to_text()}")

# Which one is right?  Only an actual integral of motion Poisson-commutes with the rest.
ref = to_complex(entries[2].h)
printed = printed_integrals()[2]
print("\ngenerated h2 equals printed h2:", functional_eq(ref, printed))
print("generated rungs commute pairwise (m, n <= 6):",
      all(involution_holds(entries, m, n) for m in range(7) for n in range(m, 7)))

# E_k = 1/2 |psi|^2_{H^k} + int q_k, with a fixed leading beta-linear monomial.
for k in (1, 2, 3):
    dec = q_decomposition(entries, k)
    print(f"k={k}: leading coefficient of psibar^({k}) psi^({k - 1}) psibar psi =", format_coeff(dec.leading_coeff[1]))
