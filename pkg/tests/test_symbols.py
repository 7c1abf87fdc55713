from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from heatzeta.symbols import (QI, HomogeneousPart, PhaseSymbol, Poly, as_fraction,
                              grade_decompose, poisson_bracket, poisson_bracket2,
                              symbol_from_json, symbol_to_json, weyl_product_term)

x = Poly.var(2, 0)
xi = Poly.var(2, 1)
p2 = (x * x + xi * xi).scale(Fraction(1, 2))


def S(p: Poly) -> PhaseSymbol:
    return PhaseSymbol.scalar(1, p)


def const(v) -> PhaseSymbol:
    return S(Poly.const(2, v))


# -- exact rationals ---------------------------------------------------------------

def test_as_fraction_rejects_floats():
    assert as_fraction("3/4") == Fraction(3, 4)
    assert as_fraction(-2) == Fraction(-2)
    with pytest.raises(TypeError):
        as_fraction(0.5)
    with pytest.raises(ValueError):
        as_fraction("0.5")
    with pytest.raises(ValueError):
        as_fraction("1e3")


def test_gaussian_rationals():
    a = QI(1, 2)
    b = QI(Fraction(1, 2), -1)
    assert a * b == QI(Fraction(5, 2), 0)
    assert (a / a) == QI(1)
    assert a.conjugate() == QI(1, -2)
    assert complex(a) == 1 + 2j


# -- grading -------------------------------------------------------------------------

def test_grade_decompose_examples():
    parts = grade_decompose(S(p2))
    assert [p.degree for p in parts] == [2]
    s = S(x * x + x + Poly.const(2, 1))
    parts = grade_decompose(s)
    assert [p.degree for p in parts] == [0, 1, 2]
    assert grade_decompose(PhaseSymbol.zeros(1, 1)) == []


def test_homogeneous_part_validates():
    with pytest.raises(ValueError):
        HomogeneousPart(2, S(x * x + x))


# -- brackets ------------------------------------------------------------------------

def test_poisson_bracket_examples():
    assert poisson_bracket(S(p2), S(x)) == S(xi)
    assert poisson_bracket(S(p2), S(p2)).is_zero()
    assert poisson_bracket(S(x), S(xi)) == const(-1)


def test_poisson_bracket2_examples():
    v = poisson_bracket2(S(p2), S(p2))
    assert v.degrees() == {0} and v == const(2)
    c = PhaseSymbol.from_constant(1, [[1, 2], [3, 4]])
    a2 = PhaseSymbol.identity(1, 2, p2)
    assert poisson_bracket2(a2, c).is_zero()
    assert poisson_bracket2(S(x * x), S(xi * xi)) == const(4)


def test_weyl_product_term_examples():
    assert weyl_product_term(S(p2), S(x), 1) == S(xi.scale(QI(0, Fraction(-1, 2))))
    assert weyl_product_term(S(p2), const(3), 2).is_zero()
    c1 = PhaseSymbol.from_constant(1, [[1, 2], [3, 4]])
    assert weyl_product_term(c1, c1, 1).is_zero()
    with pytest.raises(ValueError):
        weyl_product_term(S(x), S(xi), 3)


def test_weyl_product_of_x_and_xi():
    # x # xi = x xi + i/2, the symbol of x D
    prod = S(x * xi) + weyl_product_term(S(x), S(xi), 1) + weyl_product_term(S(x), S(xi), 2)
    assert prod == S(x * xi + Poly.const(2, QI(0, Fraction(1, 2))))


def test_matrix_order_is_preserved():
    a = PhaseSymbol(1, 2, ((x, Poly(2)), (Poly(2), Poly(2))))
    b = PhaseSymbol(1, 2, ((Poly(2), xi), (Poly(2), Poly(2))))
    assert poisson_bracket(a, b).entry(0, 1) == Poly.const(2, -1)
    assert poisson_bracket(b, a).is_zero()


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        poisson_bracket(PhaseSymbol.zeros(1, 1), PhaseSymbol.zeros(1, 2))
    with pytest.raises(ValueError):
        S(x) + PhaseSymbol.zeros(2, 1)


# -- randomized properties --------------------------------------------------------------

small = st.fractions(min_value=-3, max_value=3, max_denominator=4)
monos = st.tuples(st.integers(0, 3), st.integers(0, 3))
polys = st.dictionaries(monos, small, max_size=4).map(
    lambda d: Poly(2, {m: QI(c) for m, c in d.items()}))


@settings(max_examples=40, deadline=None)
@given(polys, polys, polys)
def test_bilinearity(a, a2, b):
    for br in (poisson_bracket, poisson_bracket2):
        assert br(S(a + a2), S(b)) == br(S(a), S(b)) + br(S(a2), S(b))
        assert br(S(b), S(a + a2)) == br(S(b), S(a)) + br(S(b), S(a2))


@settings(max_examples=40, deadline=None)
@given(polys, polys, polys)
def test_leibniz_on_scalars(a, b, c):
    lhs = poisson_bracket(S(a), S(b * c))
    rhs = poisson_bracket(S(a), S(b)) @ S(c) + S(b) @ poisson_bracket(S(a), S(c))
    assert lhs == rhs


@settings(max_examples=40, deadline=None)
@given(polys)
def test_grade_partition(p):
    s = S(p)
    total = PhaseSymbol.zeros(1, 1)
    for part in grade_decompose(s):
        total = total + part.symbol
    assert total == s
    degs = [part.degree for part in grade_decompose(s)]
    assert degs == sorted(degs)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_bracket_with_function_of_q(k):
    q = (x * x + xi * xi).scale(Fraction(3, 2))
    assert poisson_bracket(S(q), S(q ** k)).is_zero()


# -- serialization -----------------------------------------------------------------------

def test_json_round_trip():
    s = PhaseSymbol(1, 2, ((p2, x.scale(QI(0, Fraction(-2, 3)))), (xi, Poly.const(2, 7))))
    data = symbol_to_json(s)
    assert symbol_from_json(data) == s
    coeffs = [c for row in data["entries"] for p in row for c in p]
    assert all("/" in c["re"] and "." not in c["re"] for c in coeffs)


def test_canonical_equality():
    a = x + xi
    b = xi + x
    assert a == b and hash(a) == hash(b)
    assert (a - b).is_zero()
