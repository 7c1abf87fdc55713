"""Exact continuation coefficients and residues.

The spectral zeta function is Gamma(s)^-1 [sum coeff/(s - pole) + H(s)].  The
coefficients at half-integer poles and at s = 1 are exact; the integer-pole
constants come with the parametrix integral as a diagnostic.
"""

from heatzeta.models import harmonic_oscillator, jaynes_cummings, jaynes_cummings_xi3
from heatzeta.parametrix import parametrix_expand
from heatzeta.zeta import continuation_table, residue_at

for model in (harmonic_oscillator(), jaynes_cummings(), jaynes_cummings_xi3()):
    table = continuation_table(model, parametrix_expand(model, 9), 4)
    print(f"{model.name}  params {dict((k, str(v)) for k, v in model.params.items())}")
    for e in table.entries:
        extra = f"  (parametrix integral {e.parametrix_integral})" if e.parametrix_integral else ""
        print(f"  pole {str(e.pole):>5s}: {str(e.coeff):>6s} [{e.provenance}]{extra}")
    print("  residue at s = 1:", residue_at(table, 1)[0])
    print()
