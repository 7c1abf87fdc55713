"""Heat parametrix of the Jaynes-Cummings model.

Each term b_-j is a finite sum t^p M_p(X) exp(-t q(X)).  We print the first few
terms, then confirm the transport equations, homogeneity, small-t vanishing
orders and the alternating zero pattern of the JC terms.
"""

from heatzeta.models import jaynes_cummings
from heatzeta.parametrix import (homogeneity_check, parametrix_expand, structure_check,
                                 transport_residual, vanishing_order)

model = jaynes_cummings()
bs = parametrix_expand(model, 8)

for j in range(3):
    print(f"b_-{j}:")
    for p, M in bs[j].terms.items():
        print(f"  t^{p}:", [[str(M.entry(k, l)) for l in range(2)] for k in range(2)])

print()
print(" j  residual  homogeneous  vanishing order")
for j, b in enumerate(bs):
    res = transport_residual(model, bs, j).is_zero()
    hom = homogeneity_check(b, j, 2) and homogeneity_check(b, j, 3)
    print(f"{j:2d}  {str(res):8s}  {str(hom):11s}  {vanishing_order(b)}")

report = structure_check(model, bs)
print()
for j, pattern, ok, bad in report.rows:
    print(f"b_-{j}: {pattern:14s} {'ok' if ok else bad}")
