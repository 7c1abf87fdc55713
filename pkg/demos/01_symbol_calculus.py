"""Exact phase-space symbol calculus.

Symbols are matrices of polynomials in X = (x, xi) with Gaussian-rational
coefficients.  This walk-through shows the brackets and the first two terms of
the Moyal (Weyl composition) expansion.
"""

from fractions import Fraction

from heatzeta.symbols import (PhaseSymbol, Poly, grade_decompose, poisson_bracket,
                              poisson_bracket2, weyl_product_term)

x = Poly.var(2, 0)
xi = Poly.var(2, 1)
p2 = (x * x + xi * xi).scale(Fraction(1, 2))


def S(p):
    return PhaseSymbol.scalar(1, p)


# The harmonic oscillator symbol generates rotations of phase space.
print("{p2, x}  =", poisson_bracket(S(p2), S(x)).entry(0, 0))
print("{p2, xi} =", poisson_bracket(S(p2), S(xi)).entry(0, 0))
print("{x, xi}  =", poisson_bracket(S(x), S(xi)).entry(0, 0))

# The second bracket of two quadratics is a constant.
print("{p2, p2}_(2) =", poisson_bracket2(S(p2), S(p2)).entry(0, 0))
print("{x^2, xi^2}_(2) =", poisson_bracket2(S(x * x), S(xi * xi)).entry(0, 0))

# x # xi = x xi + i/2 is the Weyl symbol of the operator x D.
prod = S(x * xi) + weyl_product_term(S(x), S(xi), 1) + weyl_product_term(S(x), S(xi), 2)
print("x # xi =", prod.entry(0, 0))

# Grading splits a symbol into homogeneous pieces.
for part in grade_decompose(S(x * x + x + Poly.const(2, 1))):
    print(f"degree {part.degree}:", part.symbol.entry(0, 0))
