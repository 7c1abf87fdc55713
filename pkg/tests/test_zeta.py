import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from heatzeta.closedform import ClosedForm, Estimate, gamma_exact
from heatzeta.models import ModelSpec, harmonic_oscillator, jaynes_cummings, jaynes_cummings_xi3
from heatzeta.parametrix import HeatSymbol, parametrix_expand
from heatzeta.symbols import QI, PhaseSymbol, Poly
from heatzeta.zeta import (ContinuationTable, ConvergenceError, TableEntry, assemble_continuation,
                           c_coefficient, continuation_coefficients, continuation_table,
                           radial_integral, residue_at, sphere_monomial_average, sphere_rule)


@pytest.fixture(scope="module")
def jc_terms():
    return parametrix_expand(jaynes_cummings(), 9)


@pytest.fixture(scope="module")
def jc3_terms():
    return parametrix_expand(jaynes_cummings_xi3(), 9)


# -- closed field -----------------------------------------------------------------------------

def test_gamma_exact():
    assert gamma_exact(4) == ClosedForm(Fraction(6))
    assert gamma_exact(Fraction(1, 2)) == ClosedForm(Fraction(1), 1)
    assert float(gamma_exact(Fraction(-3, 2))) == pytest.approx(math.gamma(-1.5))
    with pytest.raises(ValueError):
        gamma_exact(0)


def test_closed_form_json_and_arith():
    a = ClosedForm(Fraction(3, 4), 1, Fraction(2), 1)
    assert ClosedForm.from_json(a.to_json()) == a
    assert float(a * a) == pytest.approx((0.75 * math.sqrt(math.pi) * math.sqrt(2)) ** 2)
    assert (a / a) == ClosedForm(Fraction(1))
    with pytest.raises(ValueError):
        ClosedForm(Fraction(1)) + ClosedForm(Fraction(1), 1)


# -- radial and sphere integrals -----------------------------------------------------------------

def test_radial_integral_examples():
    assert radial_integral(0, 1, Fraction(1, 2)) == ClosedForm(Fraction(1))
    assert radial_integral(0, 0, 1) == ClosedForm(Fraction(1, 2), 1)
    assert radial_integral(1, 1, Fraction(1, 2)) == ClosedForm(Fraction(2))


@pytest.mark.parametrize("tpow,rexp,q", [(1, 1, Fraction(1, 2)), (0, 0, Fraction(3)),
                                         (2, -3, Fraction(5, 2)), (1, 0, Fraction(2, 7))])
def test_radial_integral_against_quadrature(tpow, rexp, q):
    m = 2 * tpow + rexp
    ref, _ = integrate.quad(lambda r: r ** m * math.exp(-r * r * float(q)), 0, np.inf)
    assert float(radial_integral(tpow, rexp, q)) == pytest.approx(ref, rel=1e-12)
    assert radial_integral(tpow, rexp, float(q)) == pytest.approx(ref, rel=1e-12)


def test_radial_integral_divergent():
    with pytest.raises(ConvergenceError):
        radial_integral(0, -1, 1)


def test_sphere_average_examples():
    assert sphere_monomial_average((0, 0)) == ClosedForm(Fraction(2), 2)
    assert sphere_monomial_average((1, 0)).is_zero()
    assert sphere_monomial_average((2, 0)) == ClosedForm(Fraction(1), 2)


@pytest.mark.parametrize("alpha", [(2, 0), (4, 2), (2, 2, 0, 0), (0, 4, 2, 2)])
def test_sphere_average_against_quadrature(alpha):
    pts, w = sphere_rule(len(alpha), 40)
    ref = np.sum(w * np.prod(pts ** np.array(alpha), axis=1))
    assert float(sphere_monomial_average(alpha)) == pytest.approx(ref, rel=1e-12)


# -- c coefficients -------------------------------------------------------------------------------

def test_c_examples(jc_terms, jc3_terms):
    assert c_coefficient(jc_terms, 0, 0, 1) == ClosedForm(Fraction(2))
    for j in range(4):
        assert c_coefficient(jc_terms, j, 1, 1).is_zero()
        assert c_coefficient(jc3_terms, j, 1, 1).is_zero()
    assert c_coefficient(jc3_terms, 0, 0, 1) == ClosedForm(Fraction(3))
    ho = parametrix_expand(harmonic_oscillator(), 2)
    assert c_coefficient(ho, 0, 0, 1) == ClosedForm(Fraction(1))


def test_c_scales_with_alpha():
    # q = alpha p2: c_0 = 1/alpha
    bs = parametrix_expand(harmonic_oscillator(3), 0)
    assert c_coefficient(bs, 0, 0) == ClosedForm(Fraction(1, 3))


@pytest.mark.parametrize("j,h", [(0, 0), (1, 0), (2, 0), (3, 0), (1, 1)])
def test_exact_and_numeric_agree(jc_terms, j, h):
    exact = c_coefficient(jc_terms, j, h, method="exact")
    num = c_coefficient(jc_terms, j, h, method="numeric")
    assert isinstance(num, Estimate)
    assert abs(num.val - float(exact)) <= max(num.err, 1e-12) * 10


def test_anisotropic_numeric_path():
    x, xi = Poly.var(2, 0), Poly.var(2, 1)
    q = (x * x).scale(Fraction(1, 2)) + xi * xi
    z = PhaseSymbol.zeros(1, 1)
    bs = parametrix_expand(ModelSpec(1, 1, q, z, z), 0)
    c = c_coefficient(bs, 0, 0)
    assert isinstance(c, Estimate)
    # (2 pi)^-1 int dtheta / (2 (a cos^2 + b sin^2)) = 1 / (2 sqrt(a b))
    assert c.val == pytest.approx(1 / (2 * math.sqrt(0.5)), abs=1e-11)


def test_c_errors(jc_terms):
    with pytest.raises(IndexError):
        c_coefficient(jc_terms[:3], 2, 0)
    q = jaynes_cummings().q
    imag = HeatSymbol(1, 1, q, {0: PhaseSymbol.scalar(1, Poly.const(2, QI(0, 1)))})
    with pytest.raises(ArithmeticError):
        c_coefficient([imag], 0, 0)
    early = HeatSymbol(1, 1, q, {0: PhaseSymbol.scalar(1, Poly.const(2, 1))})
    with pytest.raises(ConvergenceError):
        c_coefficient([early, early, early], 1, 0)


def test_c_invariant_under_reflection(jc_terms):
    for k in range(6):
        b = jc_terms[k]
        refl = b.scale_variables(-1)
        sym = [None] * k + [(b + refl).scale(Fraction(1, 2))]
        j, h = divmod(k, 2)
        assert c_coefficient(sym, j, h) == c_coefficient(jc_terms, j, h)


# -- table -------------------------------------------------------------------------------------------

def test_jc_table_depth_one(jc_terms):
    table = continuation_table(jaynes_cummings(), jc_terms[:4], 1)
    exact = {e.pole: e.coeff for e in table.exact_entries()}
    assert exact[Fraction(1)] == ClosedForm(Fraction(2))
    assert all(v.is_zero() for p, v in exact.items() if p.denominator == 2)
    assert table.entry(0).provenance == "unknown"
    assert table.entry(0).parametrix_integral == ClosedForm(Fraction(1))
    assert table.holomorphic_bound == -1


def test_jc3_and_ho_tables(jc3_terms):
    t3 = continuation_table(jaynes_cummings_xi3(), jc3_terms[:4], 1)
    assert t3.entry(1).coeff == ClosedForm(Fraction(3))
    ho = harmonic_oscillator()
    t = continuation_table(ho, parametrix_expand(ho, 3), 1)
    assert t.entry(1).coeff == ClosedForm(Fraction(1))
    assert residue_at(t, 1)[0] == ClosedForm(Fraction(1))


def test_pole_locations(jc_terms):
    table = continuation_table(jaynes_cummings(), jc_terms, 4)
    allowed = {Fraction(1 - j) - Fraction(h, 2) for j in range(5) for h in (0, 1)}
    assert {e.pole for e in table.entries} == allowed
    assert [e.pole for e in table.entries] == sorted(allowed, reverse=True)


def test_integer_pole_estimates(jc_terms):
    m = jaynes_cummings()
    cvals = continuation_coefficients(jc_terms, 2)
    table = assemble_continuation(m, 2, cvals, {1: Estimate(1.0, 1e-6)})
    e = table.entry(0)
    assert e.provenance == "fit" and e.coeff.val == 1.0
    assert table.entry(-1).provenance == "unknown"


def test_residues(jc_terms):
    table = continuation_table(jaynes_cummings(), jc_terms, 4)
    assert residue_at(table, 1)[0] == ClosedForm(Fraction(2))
    val, note = residue_at(table, -2)
    assert val.is_zero() and "non-positive" in note
    val, _ = residue_at(table, Fraction(1, 2))
    assert val.is_zero()
    with pytest.raises(KeyError):
        residue_at(table, 5)


def test_half_integer_residue_divides_by_gamma():
    t = ContinuationTable(1, 1, 0)
    t.entries.append(TableEntry(Fraction(1, 2), 0, 1, ClosedForm(Fraction(3)), "symbolic"))
    val, _ = residue_at(t, Fraction(1, 2))
    assert float(val) == pytest.approx(3 / math.sqrt(math.pi))


def test_table_json_round_trip(jc_terms):
    table = continuation_table(jaynes_cummings(), jc_terms, 4)
    again = ContinuationTable.from_json(table.to_json())
    assert again.to_json() == table.to_json()
