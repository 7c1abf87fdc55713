"""The Fock-basis oracle.

The JC operator is diagonalised in a truncated Hermite basis and compared with
its 2x2 invariant blocks.  Zeta sums and the Weyl law follow.
"""

import math

import numpy as np

from heatzeta.fock import compute_spectrum, counting_function, hurwitz_partial_sum, \
    zeta_partial_sum
from heatzeta.models import harmonic_oscillator, jaynes_cummings

spec = compute_spectrum(jaynes_cummings(), 2000)
print("lowest JC eigenvalues:", np.round(spec.eigenvalues[:5], 6))
print("positive:", spec.positive)

# blocks {|k+1, e1>, |k, e2>} have eigenvalues (k+1) +/- sqrt(9/4 + (k+1))
k = np.arange(2100)
exact = np.sort(np.concatenate([[1.5], k + 1 + np.sqrt(2.25 + k + 1), k + 1 - np.sqrt(2.25 + k + 1)]))
n = spec.converged_count
print("max deviation from the blocks:", np.max(np.abs(spec.converged - exact[:n])))

# The default operator is not positive, so zeta sums need a shift.
value, tail = hurwitz_partial_sum(spec, 1.0, 2)
print(f"zeta_(A+1)(2) = {value:.10f} +- {tail:.1e}")

ho = compute_spectrum(harmonic_oscillator(), 5000)
value, tail = zeta_partial_sum(ho, 2)
print(f"HO zeta(2) = {value:.12f}, pi^2/2 = {math.pi ** 2 / 2:.12f}, tail {tail:.1e}")

for lam in (100, 500, 1000):
    print(f"N({lam})/{lam} = {counting_function(spec, lam) / lam:.4f}")
