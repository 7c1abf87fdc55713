import json
import math
from fractions import Fraction

import numpy as np
import pytest

from heatzeta.closedform import Estimate
from heatzeta.fock import PositivityError, compute_spectrum
from heatzeta.models import harmonic_oscillator, jaynes_cummings
from heatzeta.parametrix import parametrix_expand
from heatzeta.verify import (VerificationReport, default_t_grid, fit_integer_coefficients,
                             heat_trace_compare, residue_from_spectrum, spectrum_for_grid,
                             tail_ratio, verify_model)
from heatzeta.zeta import ConvergenceError, continuation_table


@pytest.fixture(scope="module")
def ho():
    model = harmonic_oscillator()
    table = continuation_table(model, parametrix_expand(model, 9), 4)
    return model, table, spectrum_for_grid(model, default_t_grid().min() / 2)


@pytest.fixture(scope="module")
def jc():
    model = jaynes_cummings()
    table = continuation_table(model, parametrix_expand(model, 9), 4)
    return model, table, spectrum_for_grid(model, default_t_grid().min() / 2)


def test_default_grid():
    g = default_t_grid()
    assert len(g) == 24 and g[0] == 0.5 and g[-1] == pytest.approx(0.5 * 2 ** -12)
    assert np.allclose(g[1:] / g[:-1], g[1] / g[0])


def test_auto_cutoff_meets_tail_requirement(ho):
    _, _, spec = ho
    assert spec.cutoff > 2000
    assert tail_ratio(spec, default_t_grid().min()) < 1e-10


def test_residue_ho(ho):
    res = residue_from_spectrum(ho[2])
    assert res.val == pytest.approx(1, abs=0.01)
    assert res.estimators_agree
    assert res.err >= abs(res.heat.val - res.zeta.val)


def test_residue_requires_positive(jc):
    with pytest.raises(PositivityError):
        residue_from_spectrum(jc[2])
    res = residue_from_spectrum(jc[2].shifted(1))
    assert res.val == pytest.approx(2, abs=0.05) and res.estimators_agree


def test_heat_compare_ho_closed_form(ho):
    _, table, spec = ho
    grid = np.append(default_t_grid(), 1.0)
    cmp_ = heat_trace_compare(spec, table=table, t_grid=grid)
    exact = np.exp(-grid / 2) / -np.expm1(-grid) - 1 / grid
    assert np.all(np.abs(cmp_.delta - exact) <= cmp_.tail + 1e-10 * cmp_.theta)
    assert cmp_.bounded and cmp_.exponent_ok
    # next term -t/24: the remainder decays linearly
    assert cmp_.exponent == pytest.approx(1, abs=1e-3)
    row = cmp_.rows()[-1]
    assert row["t"] == 1.0 and row["delta"] == pytest.approx(row["heat_trace"] - row["singular_part"])


def test_heat_compare_jc_bounded(jc):
    _, table, spec = jc
    cmp_ = heat_trace_compare(spec, table=table)
    assert cmp_.bounded and np.max(np.abs(cmp_.delta)) < 2
    assert cmp_.exponent >= 0 and cmp_.first_omitted == 0


def test_heat_compare_from_terms(jc):
    model, table, spec = jc
    a = heat_trace_compare(spec, table=table, t_grid=[0.1, 0.01])
    b = heat_trace_compare(spec, bs=parametrix_expand(model, 9), model=model, t_grid=[0.1, 0.01])
    assert np.allclose(a.delta, b.delta)
    with pytest.raises(ValueError):
        heat_trace_compare(spec)


def test_fit_ho(ho):
    _, table, spec = ho
    fits = dict(fit_integer_coefficients(spec, table, 4))
    assert abs(fits[1].val) < 1e-6
    assert fits[2].val == pytest.approx(-1 / 24, abs=1e-6)
    assert abs(fits[2].val + 1 / 24) <= fits[2].err


def test_fit_jc_stable_under_grid_halving(jc):
    _, table, spec = jc
    grid = default_t_grid()
    a = dict(fit_integer_coefficients(spec, table, 4, grid))
    b = dict(fit_integer_coefficients(spec, table, 4, grid / 2))
    for j in (1, 2, 3):
        assert abs(a[j].val - b[j].val) <= a[j].err
        assert abs(a[j].val - b[j].val) <= 1e-3 * abs(a[j].val)


def test_fit_matches_parametrix_integrals(jc):
    _, table, spec = jc
    for j, est in fit_integer_coefficients(spec, table, 4):
        pi = float(table.entry(1 - j).parametrix_integral)
        assert abs(est.val - pi) <= 3 * est.err


def test_fit_rejects_narrow_grid(ho):
    _, table, spec = ho
    with pytest.raises(ConvergenceError):
        fit_integer_coefficients(spec, table, 4, [0.1, 0.05, 0.02])


def test_verify_model_ho():
    report, table, spec = verify_model(harmonic_oscillator())
    assert report.passed
    names = [c.name for c in report.checks]
    assert "residue at s=1" in names and "estimator agreement" in names
    assert table.entry(0).provenance == "fit"
    data = json.loads(json.dumps(report.to_json()))
    assert data["pass"] is True and all("tolerance" in c for c in data["checks"])
    md = report.to_markdown()
    assert md.count("| pass |") == len(report.checks)


def test_verify_model_gates_positivity():
    with pytest.raises(PositivityError):
        verify_model(jaynes_cummings())


def test_report_failure_flag():
    r = VerificationReport("x")
    r.add("a", 1, 1.0, 0.1, True)
    r.add("b", 1, Estimate(2.0, 0.1), 0.1, False)
    assert not r.passed
    assert "FAIL" in r.to_markdown()
