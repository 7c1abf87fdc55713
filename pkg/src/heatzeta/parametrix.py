"""Heat-semigroup parametrix terms for systems with scalar principal symbol.

Every term has the form ``sum_p t**p M_p(X) exp(-t q(X))``.  Because the
principal symbol is ``q I``, the propagator ``exp(-(t - t') q)`` is scalar and
each transport equation integrates exactly:

    b_{-j} = -int_0^t exp(-(t-t') q) r_{2-j}(t') dt'
           = -exp(-t q) sum_p t**(p+1)/(p+1) M_p          (r = sum t^p M_p e^{-tq})

with right-hand sides

    r_{2-j} = a0 b_{-(j-2)} + a1 b_{-(j-1)} - 1/8 {a2, b_{-(j-4)}}_(2)
              - i/2 {a2, b_{-(j-2)}} - i/2 {a1, b_{-(j-3)}}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Sequence

import numpy as np

from .models import ModelSpec, quadratic_form
from .symbols import (QI, PhaseSymbol, Poly, as_fraction, poly_from_json, poly_to_json,
                      symbol_from_json, symbol_to_json)

HALF_I = QI(0, Fraction(-1, 2))
DEFAULT_DEPTH = 8


class HeatSymbol:
    """``sum_p t**p M_p(X) exp(-t q(X))`` with exact matrix coefficients ``M_p``."""

    __slots__ = ("n", "N", "q", "terms")

    def __init__(self, n: int, N: int, q: Poly, terms: dict | None = None, check: bool = False):
        self.n = n
        self.N = N
        self.q = q
        merged: dict = {}
        for p, M in (terms or {}).items():
            if p < 0:
                raise ValueError("t-powers must be non-negative")
            if (M.n, M.N) != (n, N):
                raise ValueError("term has the wrong shape")
            merged[p] = merged[p] + M if p in merged else M
        self.terms = {p: M for p, M in sorted(merged.items()) if not M.is_zero()}
        if check:
            self._check_radial()

    def _check_radial(self):
        q = self.q
        if not q.is_homogeneous(2) or q.is_zero() or not q.is_real():
            raise ValueError("radial polynomial must be real and homogeneous of degree 2")
        # sample directions on the unit sphere
        rng = np.random.default_rng(0)
        pts = rng.normal(size=(256, 2 * self.n))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        G = quadratic_form(q)
        if np.einsum("ij,jk,ik->i", pts, G, pts).min() <= 0:
            raise ValueError("radial polynomial is not positive on the unit sphere")

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, n: int, N: int, q: Poly) -> "HeatSymbol":
        return cls(n, N, q)

    @classmethod
    def principal(cls, n: int, N: int, q: Poly) -> "HeatSymbol":
        """``b_0 = exp(-t q) I``."""
        return cls(n, N, q, {0: PhaseSymbol.identity(n, N)}, check=True)

    def like(self, terms: dict) -> "HeatSymbol":
        return HeatSymbol(self.n, self.N, self.q, terms)

    # -- structure --------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def tpowers(self) -> list:
        return list(self.terms)

    def at_t0(self) -> PhaseSymbol:
        return self.terms.get(0, PhaseSymbol.zeros(self.n, self.N))

    def trace(self) -> dict:
        """``{p: Tr M_p}`` with zero traces dropped."""
        out = {}
        for p, M in self.terms.items():
            tr = M.trace()
            if not tr.is_zero():
                out[p] = tr
        return out

    def _check(self, other: "HeatSymbol"):
        if (self.n, self.N) != (other.n, other.N):
            raise ValueError("dimension mismatch")
        if self.q != other.q:
            raise ValueError("mismatched radial polynomial")

    def __eq__(self, other):
        if not isinstance(other, HeatSymbol):
            return NotImplemented
        return ((self.n, self.N) == (other.n, other.N) and self.q == other.q
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.n, self.N, self.q, tuple(self.terms)))

    def __repr__(self):
        return f"HeatSymbol(n={self.n}, N={self.N}, tpowers={self.tpowers()})"

    # -- algebra ----------------------------------------------------------
    def __add__(self, other: "HeatSymbol") -> "HeatSymbol":
        self._check(other)
        terms = dict(self.terms)
        for p, M in other.terms.items():
            terms[p] = terms[p] + M if p in terms else M
        return self.like(terms)

    def __neg__(self):
        return self.like({p: -M for p, M in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor) -> "HeatSymbol":
        return self.like({p: M.scale(factor) for p, M in self.terms.items()})

    def left_mul(self, a: PhaseSymbol) -> "HeatSymbol":
        """``a . b`` for an X-dependent matrix ``a``."""
        if a.is_zero():
            return self.like({})
        return self.like({p: a @ M for p, M in self.terms.items()})

    def times_t(self, k: int = 1) -> "HeatSymbol":
        return self.like({p + k: M for p, M in self.terms.items()})

    def diff(self, index: int) -> "HeatSymbol":
        """``d/dX_index`` using ``d(exp(-tq)) = -t dq exp(-tq)``."""
        dq = self.q.diff(index)
        terms: dict = {}
        for p, M in self.terms.items():
            dM = M.diff(index)
            if not dM.is_zero():
                terms[p] = terms[p] + dM if p in terms else dM
            if not dq.is_zero():
                extra = M.scale(-dq)
                terms[p + 1] = terms[p + 1] + extra if p + 1 in terms else extra
        return self.like(terms)

    def diff_t(self) -> "HeatSymbol":
        terms: dict = {}
        for p, M in self.terms.items():
            if p:
                terms[p - 1] = terms[p - 1] + M.scale(p) if p - 1 in terms else M.scale(p)
            extra = M.scale(-self.q)
            terms[p] = terms[p] + extra if p in terms else extra
        return self.like(terms)

    def scale_variables(self, tau) -> "HeatSymbol":
        """``X -> tau X`` on the prefactors; the exponent becomes ``tau**2 q``."""
        return HeatSymbol(self.n, self.N, self.q.scale(as_fraction(tau) ** 2),
                          {p: M.scale_variables(tau) for p, M in self.terms.items()})

    # -- JSON ---------------------------------------------------------------
    def to_json(self) -> dict:
        return {"n": self.n, "N": self.N, "q": poly_to_json(self.q),
                "terms": [{"tpow": p, "matrix": symbol_to_json(M)}
                          for p, M in self.terms.items()]}

    @classmethod
    def from_json(cls, data: dict) -> "HeatSymbol":
        n, N = int(data["n"]), int(data["N"])
        return cls(n, N, poly_from_json(data["q"], 2 * n),
                   {int(t["tpow"]): symbol_from_json(t["matrix"]) for t in data["terms"]})


# -- brackets of a PhaseSymbol (left) with a HeatSymbol (right) ---------------

def bracket(a: PhaseSymbol, b: HeatSymbol) -> HeatSymbol:
    """``{a, b} = sum_k d_xi a . d_x b - d_x a . d_xi b``."""
    n = b.n
    out = b.like({})
    for k in range(n):
        da_xi = a.diff(n + k)
        if not da_xi.is_zero():
            out = out + b.diff(k).left_mul(da_xi)
        da_x = a.diff(k)
        if not da_x.is_zero():
            out = out - b.diff(n + k).left_mul(da_x)
    return out


def bracket2(a: PhaseSymbol, b: HeatSymbol) -> HeatSymbol:
    """Second Moyal bracket, same convention as :func:`symbols.poisson_bracket2`."""
    n = b.n
    out = b.like({})
    for k in range(n):
        for l in range(n):
            for ia, ib, sa in ((n + k, k, 1), (k, n + k, -1)):
                for ja, jb, sb in ((n + l, l, 1), (l, n + l, -1)):
                    da = a.diff(ia).diff(ja)
                    if da.is_zero():
                        continue
                    term = b.diff(ib).diff(jb).left_mul(da)
                    out = out + term if sa * sb > 0 else out - term
    return out


# -- recursion ------------------------------------------------------------------

def _get(history: Sequence[HeatSymbol], k: int, zero: HeatSymbol) -> HeatSymbol:
    # b_{-k}; indices k < 0 stand for b_1, ..., b_4, which vanish
    return history[k] if k >= 0 else zero


def transport_rhs(model: ModelSpec, j: int, history: Sequence[HeatSymbol]) -> HeatSymbol:
    """``r_{2-j}`` from ``history = [b_0, ..., b_{-(j-1)}]``."""
    if j < 1:
        raise ValueError("j must be a positive integer")
    if len(history) < j:
        raise ValueError(f"incomplete history: need b_0..b_-{j - 1}, got {len(history)} terms")
    zero = HeatSymbol.zero(model.n, model.N, model.q)
    a2 = model.a2
    r = _get(history, j - 2, zero).left_mul(model.a0)
    r = r + _get(history, j - 1, zero).left_mul(model.a1)
    b4 = _get(history, j - 4, zero)
    if not b4.is_zero():
        r = r + bracket2(a2, b4).scale(Fraction(-1, 8))
    b2 = _get(history, j - 2, zero)
    if not b2.is_zero():
        r = r + bracket(a2, b2).scale(HALF_I)
    b3 = _get(history, j - 3, zero)
    if not b3.is_zero():
        r = r + bracket(model.a1, b3).scale(HALF_I)
    return r


def solve_transport(j: int, rhs: HeatSymbol, q: Poly | None = None) -> HeatSymbol:
    """``-int_0^t exp(-(t-t') q) rhs(t') dt'``; vanishes at ``t = 0``."""
    if j < 1:
        raise ValueError("j must be a positive integer")
    if q is not None and q != rhs.q:
        raise ValueError("mismatched radial polynomial")
    return rhs.like({p + 1: M.scale(Fraction(-1, p + 1)) for p, M in rhs.terms.items()})


def parametrix_expand(model: ModelSpec, depth: int = DEFAULT_DEPTH) -> list[HeatSymbol]:
    """``[b_0, b_-1, ..., b_-depth]``."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    bs = [HeatSymbol.principal(model.n, model.N, model.q)]
    for j in range(1, depth + 1):
        bs.append(solve_transport(j, transport_rhs(model, j, bs), model.q))
    return bs


def hurwitz_shift(model: ModelSpec, bs: Sequence[HeatSymbol], tau) -> list[HeatSymbol]:
    """Parametrix terms of ``A + tau I`` from those of ``A``.

    The shifted right-hand side is ``r_{2-j}[b~] + tau b~_{-(j-2)}``; since
    ``r`` is linear in the history, ``b~_{-j} = b_{-j} + solve(r[b~ - b] + tau b~_{-(j-2)})``.
    """
    tau = as_fraction(tau)
    if tau < 0:
        raise ValueError("tau must be non-negative")
    bs = list(bs)
    if tau == 0:
        return bs
    zero = HeatSymbol.zero(model.n, model.N, model.q)
    diffs = [zero]
    out = [bs[0]]
    for j in range(1, len(bs)):
        extra = transport_rhs(model, j, diffs)
        if j >= 2:
            extra = extra + out[j - 2].scale(tau)
        d = solve_transport(j, extra, model.q)
        diffs.append(d)
        out.append(bs[j] + d)
    return out


# -- checks -----------------------------------------------------------------------

def vanishes_on_sphere(p: Poly) -> bool:
    """Whether ``p`` is identically zero on the unit sphere."""
    if p.is_zero():
        return True
    r2 = Poly(p.nvars, {tuple(2 if k == i else 0 for k in range(p.nvars)): QI(1)
                        for i in range(p.nvars)})
    for parity in (0, 1):
        degs = [d for d in p.degrees() if d % 2 == parity]
        if not degs:
            continue
        top = max(degs)
        total = Poly(p.nvars)
        for d in degs:
            total = total + p.homogeneous_part(d) * r2 ** ((top - d) // 2)
        if not total.is_zero():
            return False
    return True


def vanishing_order(b: HeatSymbol, on_sphere: bool = True) -> int | None:
    """Smallest t-power with a non-zero coefficient (``None`` when ``b == 0``).

    ``exp(-t q) -> 1`` as ``t -> 0``, so this is the exact small-time order.
    """
    for p, M in b.terms.items():
        if on_sphere:
            if not all(vanishes_on_sphere(e) for row in M for e in row):
                return p
        elif not M.is_zero():
            return p
    return None


def derivative_orders(b: HeatSymbol, order: int, on_sphere: bool = True) -> int | None:
    """Minimal vanishing order over all ``d_X^gamma b`` with ``|gamma| = order``."""
    best = None
    for idx in combinations_with_replacement(range(2 * b.n), order):
        d = b
        for k in idx:
            d = d.diff(k)
        v = vanishing_order(d, on_sphere)
        if v is not None and (best is None or v < best):
            best = v
    return best


def required_derivative_order(j: int, h: int, order: int) -> int:
    """Lower bound on the vanishing order of an ``order``-th derivative of ``b_{-2j-h}``.

    Derivatives of odd order ``2k+1`` vanish like ``t**(j+k+1)``; even order
    ``2k+2`` like ``t**(j+k+h+1)``.
    """
    if order < 1:
        raise ValueError("order must be positive")
    k, extra = divmod(order - 1, 2)
    return j + k + h * extra + 1


def homogeneity_check(b: HeatSymbol, j: int, tau) -> bool:
    """``b(t, tau X) == tau**(-j) b(tau**2 t, X)`` as exact heat symbols."""
    tau = as_fraction(tau)
    lhs = b.scale_variables(tau)
    rhs = HeatSymbol(b.n, b.N, b.q.scale(tau ** 2),
                     {p: M.scale(tau ** (2 * p - j)) for p, M in b.terms.items()})
    return lhs == rhs


def transport_residual(model: ModelSpec, bs: Sequence[HeatSymbol], j: int,
                       tau=0) -> HeatSymbol:
    """``d/dt b_-j + q b_-j + r_{2-j}`` (plus ``tau b_-(j-2)`` for shifted sequences)."""
    b = bs[j]
    res = b.diff_t() + b.left_mul(model.a2)
    if j >= 1:
        res = res + transport_rhs(model, j, bs[:j])
        tau = as_fraction(tau)
        if j >= 2 and tau:
            res = res + bs[j - 2].scale(tau)
    return res


@dataclass
class StructureReport:
    model: str
    rows: list = field(default_factory=list)  # (j, pattern, passed, offending entries)

    @property
    def passed(self) -> bool:
        return all(r[2] for r in self.rows)


def structure_check(model: ModelSpec, bs: Sequence[HeatSymbol]) -> StructureReport:
    """Zero patterns of the JC-type terms.

    ``jc``: odd ``j`` has zero diagonal, even ``j`` is diagonal.  ``jc3``: odd
    ``j`` has zero principal and secondary diagonal, even ``j`` has zero sub- and
    superdiagonal.  Both are the statement that entry ``(k, l)`` vanishes unless
    ``k + l = j (mod 2)``.
    """
    family = model.family()
    if family not in ("jc", "jc3"):
        raise ValueError(f"structure check is only defined for jc and jc3, not {family!r}")
    report = StructureReport(family)
    for j, b in enumerate(bs):
        if j % 2:
            pattern = "zero diagonal" if family == "jc" else "zero principal/secondary diagonal"
        else:
            pattern = "diagonal" if family == "jc" else "zero sub/superdiagonal"
        bad = []
        for M in b.terms.values():
            for k in range(model.N):
                for l in range(model.N):
                    if (k + l) % 2 != j % 2 and not M.entry(k, l).is_zero():
                        bad.append((k, l))
        report.rows.append((j, pattern, not bad, sorted(set(bad))))
    return report
