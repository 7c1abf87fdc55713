import math

import mpmath
import numpy as np
import pytest
import scipy.sparse as sp

from heatzeta.fock import (PositivityError, SpectrumResult, build_matrix, compute_spectrum,
                           counting_function, eigenvalues, heat_trace, hurwitz_partial_sum,
                           weyl_operator, zeta_partial_sum)
from heatzeta.models import ModelSpec, harmonic_oscillator, jaynes_cummings, jaynes_cummings_xi3
from heatzeta.symbols import PhaseSymbol, Poly


def jc_blocks(alpha, beta, gamma, modes):
    g = alpha / 2 + gamma
    k = np.arange(modes, dtype=float)
    root = np.sqrt(g ** 2 + beta ** 2 * (k + 1))
    return np.sort(np.concatenate([[g], alpha * (k + 1) + root, alpha * (k + 1) - root]))


# -- matrices ----------------------------------------------------------------------------------

def test_ho_matrix():
    H = build_matrix(harmonic_oscillator(), 3).toarray()
    assert np.allclose(H, np.diag([0.5, 1.5, 2.5]), atol=1e-14)


def test_jc_decoupled():
    ev = compute_spectrum(jaynes_cummings(2, 0, 1), 2).eigenvalues
    a, g = 2, 1
    assert np.allclose(ev, sorted([a / 2 + g, a / 2 - g, 3 * a / 2 + g, 3 * a / 2 - g]))


def test_weyl_ordering_of_x_xi():
    # Weyl(x xi) = (X D + D X)/2 is Hermitian with zero diagonal in the Fock basis
    x, xi = Poly.var(2, 0), Poly.var(2, 1)
    M = weyl_operator(x * xi, 6).toarray()
    assert np.allclose(M, M.conj().T)
    assert np.allclose(np.diag(M), 0)


def test_matrix_is_real_symmetric_for_builtins():
    for m in (jaynes_cummings(), jaynes_cummings_xi3(1, 1, 2, -1, 0, 1)):
        H = build_matrix(m, 20)
        assert not np.iscomplexobj(H.data)
        assert abs(H - H.T).max() < 1e-14


def test_multimode_rejected():
    x = [Poly.var(4, k) for k in range(4)]
    q = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]
    z = PhaseSymbol.zeros(2, 1)
    with pytest.raises(ValueError):
        build_matrix(ModelSpec(2, 1, q, z, z), 4)


# -- eigensolver ---------------------------------------------------------------------------------

def test_eigenvalues_examples():
    assert np.allclose(eigenvalues(np.diag([2.5, 0.5, 1.5])), [0.5, 1.5, 2.5])
    assert np.allclose(eigenvalues(np.array([[0.0, 1.0], [1.0, 0.0]])), [-1, 1])
    with pytest.raises(ValueError):
        eigenvalues(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_eigenvalues_large_banded_block():
    rng = np.random.default_rng(1)
    n = 600
    d = rng.normal(size=n)
    e = rng.normal(size=n - 1)
    A = sp.diags([e, d, e], [-1, 0, 1], format="csr")
    ref = np.linalg.eigvalsh(A.toarray())
    assert np.allclose(eigenvalues(A), ref, atol=1e-10)


def test_jc_oracle_cutoff_200():
    spec = compute_spectrum(jaynes_cummings(), 200)
    lower = spec.eigenvalues[: len(spec.eigenvalues) // 2]
    exact = jc_blocks(1.0, 1.0, 1.0, 300)[: len(lower)]
    assert np.max(np.abs(lower - exact)) < 1e-10


def test_jc_oracle_other_parameters():
    spec = compute_spectrum(jaynes_cummings(3, 2, -1), 300)
    exact = jc_blocks(3.0, 2.0, -1.0, 400)[: spec.converged_count]
    assert np.max(np.abs(spec.converged - exact)) < 1e-9


def test_jc3_block_oracle():
    # blocks {|m+2,e1>, |m+1,e2>, |m,e3>} plus the truncated low blocks
    a, b1, b2, g = 1.0, 1.0, 2.0, (-1.0, 0.0, 1.0)
    spec = compute_spectrum(jaynes_cummings_xi3(1, 1, 2, -1, 0, 1), 400)
    # the truncated blocks m = -2 and m = -1, then full blocks m >= 0
    vals = [a * 0.5 + g[0]]
    vals += list(np.linalg.eigvalsh([[a * 1.5 + g[0], b1 / 2], [b1 / 2, a * 0.5 + g[1]]]))
    for m in range(600):
        B = np.array([[a * (m + 2.5) + g[0], b1 / 2 * math.sqrt(m + 2), 0],
                      [b1 / 2 * math.sqrt(m + 2), a * (m + 1.5) + g[1], b2 / 2 * math.sqrt(m + 1)],
                      [0, b2 / 2 * math.sqrt(m + 1), a * (m + 0.5) + g[2]]])
        vals += list(np.linalg.eigvalsh(B))
    exact = np.sort(vals)[: spec.converged_count]
    assert np.max(np.abs(spec.converged - exact)) < 1e-9


def test_cutoff_stability():
    s1 = compute_spectrum(jaynes_cummings(), 500)
    s2 = compute_spectrum(jaynes_cummings(), 1000)
    k = s1.converged_count
    assert np.max(np.abs(s1.converged - s2.eigenvalues[:k])) < 1e-10


@pytest.mark.parametrize("model,c0", [(harmonic_oscillator(), 1), (jaynes_cummings(), 2),
                                      (jaynes_cummings_xi3(), 3)])
def test_weyl_law(model, c0):
    cutoff = 4000
    spec = compute_spectrum(model, cutoff)
    lam = cutoff * float(model.params["alpha"]) / 2
    assert counting_function(spec, lam) / lam == pytest.approx(c0, rel=0.02)


def test_spectrum_result_fields():
    spec = compute_spectrum(jaynes_cummings(), 50)
    assert len(spec.eigenvalues) == 100
    assert np.all(np.diff(spec.eigenvalues) >= 0)
    assert spec.positive == (spec.eigenvalues[0] > 0)
    assert not spec.positive
    assert spec.shifted(1).positive
    again = SpectrumResult.from_json(spec.to_json())
    assert np.array_equal(again.eigenvalues, spec.eigenvalues) and again.model == "jc"


# -- heat traces and zeta sums ----------------------------------------------------------------------

def test_heat_trace_examples():
    one = SpectrumResult.from_values([1.0])
    assert heat_trace(one, 0.7) == (pytest.approx(math.exp(-0.7)), 0.0)
    spec = compute_spectrum(harmonic_oscillator(), 400)
    val, tail = heat_trace(spec, 1.0)
    assert abs(val - math.exp(-0.5) / (1 - math.exp(-1))) <= tail + 1e-14
    with pytest.raises(ValueError):
        heat_trace(spec, 0)


def test_jc_leading_heat_coefficient():
    spec = compute_spectrum(jaynes_cummings(), 4000)
    vals = [t * heat_trace(spec, t)[0] for t in (0.05, 0.02, 0.01)]
    assert abs(vals[2] - 2) < abs(vals[1] - 2) < abs(vals[0] - 2)
    assert vals[2] == pytest.approx(2, abs=0.02)


def test_zeta_examples():
    assert zeta_partial_sum(SpectrumResult.from_values([1, 2, 4]), 1) == (1.75, 0.0)
    spec = compute_spectrum(harmonic_oscillator(), 2500)
    val, tail = zeta_partial_sum(spec, 2)
    assert abs(val - math.pi ** 2 / 2) <= tail and tail < 1e-6
    with pytest.raises(ValueError):
        zeta_partial_sum(spec, 1)


def test_zeta_complex_argument():
    spec = compute_spectrum(harmonic_oscillator(), 4000)
    s = 3 + 2j
    ref = complex((2 ** s - 1) * mpmath.zeta(s))
    val, tail = zeta_partial_sum(spec, s)
    assert abs(val - ref) <= tail + 1e-12


def test_zeta_requires_positive():
    spec = compute_spectrum(jaynes_cummings(), 100)
    with pytest.raises(PositivityError, match="Hurwitz shift"):
        zeta_partial_sum(spec, 2)


def test_hurwitz_examples():
    spec = compute_spectrum(harmonic_oscillator(), 2500)
    assert hurwitz_partial_sum(spec, 0, 2) == zeta_partial_sum(spec, 2)
    assert hurwitz_partial_sum(SpectrumResult.from_values([1, 2]), 1, 1)[0] == pytest.approx(5 / 6)
    val, tail = hurwitz_partial_sum(spec, 0.5, 2)
    assert abs(val - math.pi ** 2 / 6) <= tail
    with pytest.raises(ValueError):
        hurwitz_partial_sum(spec, -1, 2)


def test_jc_zeta_two_stable_under_cutoff():
    a = zeta_partial_sum(compute_spectrum(jaynes_cummings(), 4000).shifted(1), 2)
    b = zeta_partial_sum(compute_spectrum(jaynes_cummings(), 8000).shifted(1), 2)
    assert abs(a[0] - b[0]) <= a[1] + b[1]
