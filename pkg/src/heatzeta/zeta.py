"""Continuation coefficients of the spectral zeta function.

For ``Re s > n`` the zeta function is the Mellin transform of the heat trace,
and each parametrix term contributes a simple pole

    c_{-2j-h} / (s - (n - j) + h/2),
    c_{-2j-h} = (2 pi)^-n int_0^oo int_{S^{2n-1}} Tr b_{-2j-h}(rho^2, w) rho^{2(n-j)-1-h} dw drho,

inside ``Gamma(s)^-1 [ ... ]``.  For ``b = sum_p t^p M_p e^{-tq}`` the radial
integral is a Gamma function and, when ``q = c|X|^2``, the sphere integral of a
monomial is closed form, so the coefficient is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gamma as fgamma
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .closedform import ClosedForm, Estimate, gamma_exact, value_from_json
from .models import ModelSpec, isotropic_constant
from .parametrix import HeatSymbol, vanishing_order
from .symbols import Poly, as_fraction


class ConvergenceError(ArithmeticError):
    pass


def radial_integral(tpow: int, rho_exponent: int, q_omega) -> ClosedForm | float:
    """``int_0^oo rho**(2 tpow + rho_exponent) exp(-rho**2 q_omega) drho``.

    Equal to ``Gamma(a) / (2 q_omega**a)`` with ``a = (2 tpow + rho_exponent + 1)/2``.
    Exact for rational ``q_omega``; a float otherwise.
    """
    m = 2 * tpow + rho_exponent
    if m <= -1:
        raise ConvergenceError(f"radial integral diverges at 0 (exponent {m})")
    a = Fraction(m + 1, 2)
    if isinstance(q_omega, float):
        if q_omega <= 0:
            raise ValueError("q_omega must be positive")
        return float(np.exp(gammaln(float(a)) - float(a) * np.log(q_omega))) / 2
    q_omega = as_fraction(q_omega)
    if q_omega <= 0:
        raise ValueError("q_omega must be positive")
    # q^-a with a = k or k + 1/2
    return gamma_exact(a) * ClosedForm(Fraction(1, 2), 0, q_omega, -int(2 * a))


def sphere_monomial_average(exponents: Sequence[int]) -> ClosedForm:
    """``int_{S^{d-1}} w**exponents dw`` over the unit sphere in ``R^d``, ``d = len(exponents)``.

    Zero if any exponent is odd, otherwise ``2 prod Gamma((a_i+1)/2) / Gamma(d/2 + |a|/2)``.
    """
    if any(e % 2 for e in exponents):
        return ClosedForm(Fraction(0))
    out = ClosedForm(Fraction(2))
    for e in exponents:
        out = out * gamma_exact(Fraction(e + 1, 2))
    return out / gamma_exact(Fraction(len(exponents) + sum(exponents), 2))


def _check_order(b: HeatSymbol, j: int, h: int):
    v = vanishing_order(b)
    if v is not None and v < j + h:
        raise ConvergenceError(f"b_-{2 * j + h} vanishes only to order {v} < {j + h}")


def c_coefficient(bs: Sequence[HeatSymbol], j: int, h: int, n: int | None = None,
                  method: str = "auto", tol: float = 1e-12):
    """Continuation coefficient ``c_{-2j-h}``.

    Exact (:class:`ClosedForm`) when the radial polynomial is isotropic, else an
    :class:`Estimate` from sphere quadrature; ``method`` forces ``"exact"`` or
    ``"numeric"``.
    """
    if h not in (0, 1):
        raise ValueError("h must be 0 or 1")
    k = 2 * j + h
    if k >= len(bs):
        raise IndexError(f"b_-{k} has not been computed (have {len(bs)} terms)")
    b = bs[k]
    n = b.n if n is None else n
    if n != b.n:
        raise ValueError("n does not match the heat symbol")
    _check_order(b, j, h)
    c_iso = isotropic_constant(b.q)
    if method == "exact" or (method == "auto" and c_iso is not None):
        if c_iso is None:
            raise ValueError("exact path needs an isotropic radial polynomial")
        return _c_exact(b, j, h, n, c_iso)
    return _c_numeric(b, j, h, n, tol)


def _c_exact(b: HeatSymbol, j: int, h: int, n: int, c: Fraction) -> ClosedForm:
    rho_exp = 2 * (n - j) - 1 - h
    re = ClosedForm(Fraction(0))
    im = ClosedForm(Fraction(0))
    for p, tr in b.trace().items():
        for mono, coeff in tr.terms.items():
            sph = sphere_monomial_average(mono)
            if sph.is_zero():
                continue
            val = sph * radial_integral(p, rho_exp, c)
            re = re + val * coeff.re
            im = im + val * coeff.im
    norm = ClosedForm(Fraction(1, 2 ** n), -2 * n)
    if not im.is_zero():
        raise ArithmeticError(f"c_-{2 * j + h} has a non-zero imaginary part {im}")
    return re * norm


def sphere_rule(d: int, deg: int):
    """Product Gauss-Legendre rule on ``S^{d-1}`` in hyperspherical angles.

    Returns ``(points, weights)``; points have shape ``(m, d)``.
    """
    xs, ws = np.polynomial.legendre.leggauss(deg)
    grids, weights = [], []
    for i in range(d - 2):
        th = (xs + 1) * np.pi / 2
        grids.append(th)
        weights.append(ws * np.pi / 2 * np.sin(th) ** (d - 2 - i))
    grids.append((xs + 1) * np.pi)
    weights.append(ws * np.pi)
    angles = [g.ravel() for g in np.meshgrid(*grids, indexing="ij")]
    w = np.prod([g.ravel() for g in np.meshgrid(*weights, indexing="ij")], axis=0)
    pts = np.empty((w.size, d))
    sines = np.ones(w.size)
    for i in range(d - 1):
        pts[:, i] = sines * np.cos(angles[i])
        sines = sines * np.sin(angles[i])
    pts[:, d - 1] = sines
    return pts, w


def _eval_poly(p: Poly, pts: np.ndarray) -> np.ndarray:
    out = np.zeros(len(pts), dtype=complex)
    for m, c in p.terms.items():
        v = np.full(len(pts), complex(c))
        for k, e in enumerate(m):
            if e:
                v = v * pts[:, k] ** e
        out += v
    return out


def _c_numeric(b: HeatSymbol, j: int, h: int, n: int, tol: float) -> Estimate:
    rho_exp = 2 * (n - j) - 1 - h
    traces = b.trace()
    if not traces:
        return Estimate(0.0, 0.0)
    pdeg = max(tr.degree() for tr in traces.values())

    def integrate(deg: int) -> complex:
        pts, w = sphere_rule(2 * n, deg)
        qv = _eval_poly(b.q, pts).real
        total = np.zeros(len(pts), dtype=complex)
        for p, tr in traces.items():
            a = (2 * p + rho_exp + 1) / 2
            if a <= 0:
                raise ConvergenceError("radial integral diverges")
            total += _eval_poly(tr, pts) * np.exp(gammaln(a) - a * np.log(qv)) / 2
        return complex(np.sum(w * total)) / (2 * np.pi) ** n

    deg = pdeg + 16
    prev = integrate(deg)
    for _ in range(8):
        deg *= 2
        cur = integrate(deg)
        err = abs(cur - prev)
        if err <= tol * max(1.0, abs(cur)):
            break
        prev = cur
    if abs(cur.imag) > max(err, tol) * 10:
        raise ArithmeticError("numeric c-coefficient has a non-zero imaginary part")
    return Estimate(cur.real, max(err, abs(cur.imag)))


# -- continuation table ------------------------------------------------------------

@dataclass
class TableEntry:
    pole: Fraction
    j: int
    h: int
    coeff: object = None  # ClosedForm | Estimate | None
    provenance: str = "unknown"  # "symbolic", "numeric", "fit" or "unknown"
    parametrix_integral: object = None  # c_{-2j} integral at integer poles (diagnostic)

    def to_json(self) -> dict:
        out = {"pole": f"{self.pole.numerator}/{self.pole.denominator}", "j": self.j, "h": self.h,
               "provenance": self.provenance,
               "coeff": None if self.coeff is None else self.coeff.to_json()}
        if self.parametrix_integral is not None:
            out["parametrix_integral"] = self.parametrix_integral.to_json()
        return out

    @classmethod
    def from_json(cls, data: dict) -> "TableEntry":
        return cls(as_fraction(data["pole"]), int(data["j"]), int(data["h"]),
                   value_from_json(data.get("coeff")), data.get("provenance", "unknown"),
                   value_from_json(data.get("parametrix_integral")))


@dataclass
class ContinuationTable:
    """``zeta(s) = Gamma(s)^-1 [ sum coeff/(s - pole) + H(s) ]``, ``H`` holomorphic
    for ``Re s > holomorphic_bound``."""

    n: int
    N: int
    depth: int
    entries: list = field(default_factory=list)
    model: str = ""
    tau: Fraction = Fraction(0)
    gamma_note: bool = True

    @property
    def holomorphic_bound(self) -> int:
        return (self.n - self.depth) - 1

    def entry(self, pole) -> TableEntry:
        pole = as_fraction(pole)
        for e in self.entries:
            if e.pole == pole:
                return e
        raise KeyError(f"no pole at s = {pole} in the table")

    def exact_entries(self) -> list:
        return [e for e in self.entries if isinstance(e.coeff, ClosedForm)]

    def singular_part(self):
        """``[(pole, float coeff)]`` over exact and numeric (non-fit) entries."""
        return [(e.pole, float(e.coeff)) for e in self.entries
                if e.provenance in ("symbolic", "numeric") and e.coeff is not None]

    def to_json(self) -> dict:
        return {"n": self.n, "N": self.N, "depth": self.depth, "model": self.model,
                "tau": f"{self.tau.numerator}/{self.tau.denominator}",
                "gamma_note": "zeta(s) = (1/Gamma(s)) * [sum coeff/(s - pole) + H(s)]",
                "holomorphic_bound": self.holomorphic_bound,
                "entries": [e.to_json() for e in self.entries]}

    @classmethod
    def from_json(cls, data: dict) -> "ContinuationTable":
        return cls(int(data["n"]), int(data["N"]), int(data["depth"]),
                   [TableEntry.from_json(e) for e in data["entries"]],
                   data.get("model", ""), as_fraction(data.get("tau", "0")))


def continuation_coefficients(bs: Sequence[HeatSymbol], depth: int) -> dict:
    """``{(j, h): c_{-2j-h}}`` for ``0 <= j <= depth`` wherever ``b_{-2j-h}`` is available."""
    out = {}
    for j in range(depth + 1):
        for h in (0, 1):
            if 2 * j + h < len(bs):
                out[(j, h)] = c_coefficient(bs, j, h)
    return out


def assemble_continuation(model: ModelSpec, depth: int, c_values: dict,
                          integer_pole_estimates: dict | None = None,
                          tau=0) -> ContinuationTable:
    """Table of poles ``n - j - h/2`` for ``0 <= j <= depth``.

    Integer poles ``s = n - j`` with ``j >= n`` are filled from
    ``integer_pole_estimates`` (``{j: Estimate}``) when given and are otherwise
    left unknown; their parametrix integral is kept as a diagnostic.
    """
    n = model.n
    estimates = integer_pole_estimates or {}
    table = ContinuationTable(n, model.N, depth, model=model.name, tau=as_fraction(tau))
    for j in range(depth + 1):
        for h in (0, 1):
            pole = Fraction(n - j) - Fraction(h, 2)
            value = c_values.get((j, h))
            if h == 0 and j >= n:
                est = estimates.get(j)
                entry = TableEntry(pole, j, h, est, "fit" if est is not None else "unknown",
                                   parametrix_integral=value)
            else:
                if value is None:
                    entry = TableEntry(pole, j, h)
                else:
                    prov = "symbolic" if isinstance(value, ClosedForm) else "numeric"
                    entry = TableEntry(pole, j, h, value, prov)
            table.entries.append(entry)
    table.entries.sort(key=lambda e: -e.pole)
    return table


def residue_at(table: ContinuationTable, s0) -> tuple:
    """Residue of ``coeff / (Gamma(s) (s - s0))`` at ``s0``: ``(value, note)``."""
    s0 = as_fraction(s0)
    e = table.entry(s0)
    if s0.denominator == 1 and s0 <= 0:
        return ClosedForm(Fraction(0)), "1/Gamma vanishes at non-positive integers"
    if e.coeff is None:
        raise ValueError(f"coefficient at s = {s0} is unknown")
    if isinstance(e.coeff, ClosedForm):
        return e.coeff / gamma_exact(s0), "exact"
    g = fgamma(float(s0))
    return Estimate(e.coeff.val / g, e.coeff.err / abs(g)), "numeric"


def continuation_table(model: ModelSpec, bs: Sequence[HeatSymbol], depth: int | None = None,
                       integer_pole_estimates: dict | None = None, tau=0) -> ContinuationTable:
    """Convenience: coefficients from ``bs`` assembled into a table of depth ``nu``."""
    nu = (len(bs) - 2) // 2 if depth is None else depth
    return assemble_continuation(model, nu, continuation_coefficients(bs, nu),
                                 integer_pole_estimates, tau)
