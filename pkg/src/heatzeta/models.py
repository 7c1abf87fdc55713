"""Model specifications ``A = q I + a1 + a0`` and the built-in registry.

Symbols are stored in a *gauge*: a constant diagonal similarity
``S = diag(sqrt(g_1), ..., sqrt(g_N))`` with rational ``g_k``.  The physical
symbol is ``S^-1 a S``.  The heat-parametrix recursion commutes with a constant
similarity, so traces, zero patterns and spectra are unchanged, while the
``1/sqrt(2)`` of the ladder symbols disappears from the stored coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .symbols import (QI, PhaseSymbol, Poly, as_fraction, poly_from_json, poly_to_json,
                      symbol_from_json, symbol_to_json)


class ModelError(ValueError):
    pass


def quadratic_form(q: Poly) -> np.ndarray:
    """Symmetric Gram matrix ``G`` with ``q(X) = X^T G X``."""
    d = q.nvars
    G = np.zeros((d, d))
    for m, c in q.terms.items():
        idx = [k for k, e in enumerate(m) for _ in range(e)]
        i, j = idx
        v = float(c.re)
        if i == j:
            G[i, i] += v
        else:
            G[i, j] += v / 2
            G[j, i] += v / 2
    return G


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """Second-order system with scalar principal symbol ``q(X) I``."""

    n: int
    N: int
    q: Poly
    a1: PhaseSymbol
    a0: PhaseSymbol
    name: str = "custom"
    params: dict = field(default_factory=dict)
    gauge: tuple = ()

    def __post_init__(self):
        gauge = tuple(as_fraction(g) for g in self.gauge) or (Fraction(1),) * self.N
        object.__setattr__(self, "gauge", gauge)
        object.__setattr__(self, "params", {k: as_fraction(v) for k, v in self.params.items()})
        self.validate()

    def validate(self):
        n, N = self.n, self.N
        if len(self.gauge) != N or any(g <= 0 for g in self.gauge):
            raise ModelError("gauge must hold N positive rationals")
        q = self.q
        if q.nvars != 2 * n:
            raise ModelError("q must be a polynomial in 2n variables")
        if q.is_zero() or not q.is_homogeneous(2):
            raise ModelError("q must be homogeneous of degree 2")
        if not q.is_real():
            raise ModelError("q must have real coefficients")
        if np.linalg.eigvalsh(quadratic_form(q)).min() <= 0:
            raise ModelError("q is not elliptic: it must be positive on the unit sphere")
        for label, a, deg in (("a1", self.a1, 1), ("a0", self.a0, 0)):
            if (a.n, a.N) != (n, N):
                raise ModelError(f"{label} has the wrong shape")
            if a.degrees() - {deg}:
                raise ModelError(f"{label} entries must be homogeneous of degree {deg}")
            self._check_hermitian(label, a)

    def _check_hermitian(self, label: str, a: PhaseSymbol):
        # physical entry (k,l) is a_kl * sqrt(g_l / g_k)
        g = self.gauge
        for k in range(self.N):
            for l in range(k, self.N):
                lhs = a.entry(k, l).scale(g[l])
                rhs = a.entry(l, k).conjugate().scale(g[k])
                if lhs != rhs:
                    raise ModelError(f"{label} is not Hermitian-valued at entry ({k}, {l})")

    # -- derived symbols ----------------------------------------------------
    @property
    def a2(self) -> PhaseSymbol:
        return PhaseSymbol.identity(self.n, self.N, self.q)

    def is_isotropic(self) -> bool:
        return isotropic_constant(self.q) is not None

    def physical_entry(self, k: int, l: int) -> tuple[Poly, float]:
        """Gauge-form entry and the float factor ``sqrt(g_l/g_k)`` undoing the gauge."""
        full = self.a1.entry(k, l) + self.a0.entry(k, l)
        if k == l:
            full = full + self.q
        return full, float(np.sqrt(float(self.gauge[l]) / float(self.gauge[k])))

    def family(self) -> str:
        return self.name.split(":")[0]

    # -- JSON ---------------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "N": self.N,
            "params": {k: f"{v.numerator}/{v.denominator}" for k, v in sorted(self.params.items())},
            "gauge": [f"{g.numerator}/{g.denominator}" for g in self.gauge],
            "q": poly_to_json(self.q),
            "a1": symbol_to_json(self.a1),
            "a0": symbol_to_json(self.a0),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ModelSpec":
        n = int(data["n"])
        return cls(
            n=n,
            N=int(data["N"]),
            q=poly_from_json(data["q"], 2 * n),
            a1=symbol_from_json(data["a1"]),
            a0=symbol_from_json(data["a0"]),
            name=data.get("name", "custom"),
            params=data.get("params", {}),
            gauge=tuple(data.get("gauge", ())),
        )

    def __eq__(self, other):
        if not isinstance(other, ModelSpec):
            return NotImplemented
        return self.to_json() == other.to_json()

    def __hash__(self):
        return hash((self.name, self.n, self.N, self.q))


def isotropic_constant(q: Poly) -> Fraction | None:
    """``c`` when ``q = c |X|^2`` exactly, else ``None``."""
    d = q.nvars
    squares = {tuple(2 if k == i else 0 for k in range(d)) for i in range(d)}
    if set(q.terms) != squares:
        return None
    values = {q.terms[m] for m in squares}
    if len(values) != 1:
        return None
    c = values.pop()
    if c.im != 0 or c.re <= 0:
        return None
    return c.re


# -- built-in models (n = 1; variables X = (x, xi)) ---------------------------

def _p2() -> Poly:
    """Harmonic oscillator symbol ``(x^2 + xi^2)/2``."""
    x = Poly.var(2, 0)
    xi = Poly.var(2, 1)
    return (x * x + xi * xi).scale(Fraction(1, 2))


def _psi_bar(coeff) -> Poly:
    """``coeff * (x - i xi)``, a multiple of the creation symbol."""
    return Poly(2, {(1, 0): QI.coerce(coeff), (0, 1): QI(0, -1) * QI.coerce(coeff)})


def _psi(coeff) -> Poly:
    """``coeff * (x + i xi)``, a multiple of the annihilation symbol."""
    return Poly(2, {(1, 0): QI.coerce(coeff), (0, 1): QI(0, 1) * QI.coerce(coeff)})


def harmonic_oscillator(alpha=1) -> ModelSpec:
    alpha = as_fraction(alpha)
    if alpha <= 0:
        raise ModelError("alpha must be positive")
    return ModelSpec(1, 1, _p2().scale(alpha), PhaseSymbol.zeros(1, 1), PhaseSymbol.zeros(1, 1),
                     name="ho", params={"alpha": alpha})


def jaynes_cummings(alpha=1, beta=1, gamma=1) -> ModelSpec:
    """``alpha p2 I + beta (s+ psi* + s- psi) + gamma s3`` with ``psi = (x + i xi)/sqrt 2``.

    Stored in the gauge ``diag(sqrt 2, 1)``: entry (0,1) is ``beta (x - i xi)``
    and entry (1,0) is ``beta (x + i xi)/2``.
    """
    alpha, beta, gamma = (as_fraction(v) for v in (alpha, beta, gamma))
    if alpha <= 0:
        raise ModelError("alpha must be positive")
    z = Poly(2)
    a1 = PhaseSymbol(1, 2, ((z, _psi_bar(beta)), (_psi(beta / 2), z)))
    a0 = PhaseSymbol.from_constant(1, [[gamma, 0], [0, -gamma]])
    return ModelSpec(1, 2, _p2().scale(alpha), a1, a0, name="jc",
                     params={"alpha": alpha, "beta": beta, "gamma": gamma},
                     gauge=(Fraction(2), Fraction(1)))


def jaynes_cummings_xi3(alpha=1, beta1=1, beta2=1, gamma1=None, gamma2=None,
                        gamma3=None) -> ModelSpec:
    """Three-level ladder (Xi) model.

    ``alpha p2 I3 + 1/2 sum_k beta_k (psi* E_{k,k+1} + psi E_{k+1,k}) + sum_k gamma_k E_kk``,
    stored in the gauge ``diag(2, sqrt 2, 1)``.  Omitted level energies default to
    ``(-1, 0, 1) * scale`` with the largest ``scale`` in ``1, 1/2, 1/4, ...`` giving a
    positive operator (checked on a 256-mode truncation).
    """
    alpha, beta1, beta2 = (as_fraction(v) for v in (alpha, beta1, beta2))
    if alpha <= 0:
        raise ModelError("alpha must be positive")
    if beta1 == 0 or beta2 == 0:
        raise ModelError("beta1 and beta2 must be non-zero")
    if gamma1 is None and gamma2 is None and gamma3 is None:
        return _default_xi3(alpha, beta1, beta2)
    gammas = tuple(as_fraction(g) for g in (gamma1 or 0, gamma2 or 0, gamma3 or 0))
    if not gammas[0] < gammas[1] < gammas[2]:
        raise ModelError("level energies must satisfy gamma1 < gamma2 < gamma3")
    z = Poly(2)
    a1 = PhaseSymbol(1, 3, (
        (z, _psi_bar(beta1 / 2), z),
        (_psi(beta1 / 4), z, _psi_bar(beta2 / 2)),
        (z, _psi(beta2 / 4), z),
    ))
    a0 = PhaseSymbol.from_constant(1, [[gammas[0], 0, 0], [0, gammas[1], 0], [0, 0, gammas[2]]])
    return ModelSpec(1, 3, _p2().scale(alpha), a1, a0, name="jc3",
                     params={"alpha": alpha, "beta1": beta1, "beta2": beta2,
                             "gamma1": gammas[0], "gamma2": gammas[1], "gamma3": gammas[2]},
                     gauge=(Fraction(4), Fraction(2), Fraction(1)))


def _default_xi3(alpha, beta1, beta2) -> ModelSpec:
    from .fock import compute_spectrum

    scale = Fraction(1)
    for _ in range(40):
        model = jaynes_cummings_xi3(alpha, beta1, beta2, -scale, 0, scale)
        if compute_spectrum(model, 256).positive:
            return model
        scale /= 2
    raise ModelError("no positive default level spacing found")


BUILTIN = {
    "ho": harmonic_oscillator,
    "jc": jaynes_cummings,
    "jc3": jaynes_cummings_xi3,
}


def builtin_model(name: str, **params) -> ModelSpec:
    try:
        factory = BUILTIN[name]
    except KeyError:
        raise ModelError(f"unknown model {name!r}; choose from {sorted(BUILTIN)}") from None
    return factory(**params)
