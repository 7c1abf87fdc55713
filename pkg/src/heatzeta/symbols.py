"""Exact matrix-valued polynomial symbols on phase space.

Variables are ordered ``X = (x_1, ..., x_n, xi_1, ..., xi_n)``.  Coefficients
are Gaussian rationals (:class:`QI`), so the ``(-i/2)**j`` factors of the Weyl
composition stay exact.

Bracket convention (used everywhere in the package)::

    {a, b}     = sum_k  d_xi_k a . d_x_k b  -  d_x_k a . d_xi_k b
    {a, b}_(2) = sum_{k,l} (d_xi_k d_xi_l a . d_x_k d_x_l b
                            - d_xi_k d_x_l a . d_x_k d_xi_l b
                            - d_x_k d_xi_l a . d_xi_k d_x_l b
                            + d_x_k d_x_l a . d_xi_k d_xi_l b)

so that ``a # b = ab + (-i/2){a,b} + (1/2)(-i/2)**2 {a,b}_(2) + ...``.  With
this choice ``x # xi = x xi + i/2``, the Weyl symbol of ``x D``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence


def as_fraction(value) -> Fraction:
    """Parse an int, Fraction or ``"p/q"`` string; floats are rejected."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if any(c in text for c in ".eE"):
            raise ValueError(f"decimal notation is not an exact rational: {value!r}")
        return Fraction(text)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


class QI:
    """Gaussian rational ``re + i*im`` with :class:`Fraction` parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    @classmethod
    def coerce(cls, value) -> "QI":
        if isinstance(value, QI):
            return value
        if isinstance(value, complex):
            raise TypeError("complex floats are not exact")
        return cls(as_fraction(value) if not isinstance(value, Fraction) else value)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, QI):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __add__(self, other):
        other = QI.coerce(other)
        return QI(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __sub__(self, other):
        other = QI.coerce(other)
        return QI(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return QI.coerce(other) - self

    def __mul__(self, other):
        other = QI.coerce(other)
        return QI(self.re * other.re - self.im * other.im,
                  self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = QI.coerce(other)
        den = other.re * other.re + other.im * other.im
        if den == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        num = self * other.conjugate()
        return QI(num.re / den, num.im / den)

    def conjugate(self) -> "QI":
        return QI(self.re, -self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im == 0:
            return f"QI({self.re})"
        return f"QI({self.re}, {self.im})"


I = QI(0, 1)
ZERO = QI(0)
ONE = QI(1)

Monomial = tuple


def _grlex_key(mono: Monomial):
    return (sum(mono), mono)


class Poly:
    """Sparse polynomial in ``nvars`` variables with :class:`QI` coefficients.

    Zero coefficients are never stored, so equality is dictionary equality.
    Treat instances as immutable.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        self.terms = {} if terms is None else {m: c for m, c in terms.items() if c}

    # -- constructors -----------------------------------------------------
    @classmethod
    def const(cls, nvars: int, value) -> "Poly":
        return cls(nvars, {(0,) * nvars: QI.coerce(value)})

    @classmethod
    def var(cls, nvars: int, index: int, coeff=1) -> "Poly":
        mono = tuple(1 if k == index else 0 for k in range(nvars))
        return cls(nvars, {mono: QI.coerce(coeff)})

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars)

    # -- structure --------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set:
        return {sum(m) for m in self.terms}

    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=-1)

    def is_homogeneous(self, degree: int | None = None) -> bool:
        degs = self.degrees()
        if not degs:
            return True
        if len(degs) != 1:
            return False
        return degree is None or degs == {degree}

    def homogeneous_part(self, degree: int) -> "Poly":
        return Poly(self.nvars, {m: c for m, c in self.terms.items() if sum(m) == degree})

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda mc: _grlex_key(mc[0]))

    def is_real(self) -> bool:
        return all(c.im == 0 for c in self.terms.values())

    def constant_term(self) -> QI:
        return self.terms.get((0,) * self.nvars, ZERO)

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: "Poly"):
        if self.nvars != other.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(self.nvars, other)
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, ZERO) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor) -> "Poly":
        factor = QI.coerce(factor)
        if not factor:
            return Poly(self.nvars)
        return Poly(self.nvars, {m: c * factor for m, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        self._check(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, ZERO) + c1 * c2
        return Poly(self.nvars, out)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        out = Poly.const(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def conjugate(self) -> "Poly":
        return Poly(self.nvars, {m: c.conjugate() for m, c in self.terms.items()})

    def diff(self, index: int) -> "Poly":
        out = {}
        for m, c in self.terms.items():
            e = m[index]
            if e:
                mm = m[:index] + (e - 1,) + m[index + 1:]
                out[mm] = c * e
        return Poly(self.nvars, out)

    def scale_variables(self, tau) -> "Poly":
        """Substitute ``X -> tau X``."""
        tau = as_fraction(tau)
        return Poly(self.nvars, {m: c * tau ** sum(m) for m, c in self.terms.items()})

    def evaluate(self, point: Sequence[complex]) -> complex:
        total = 0j
        for m, c in self.terms.items():
            v = complex(c)
            for x, e in zip(point, m):
                if e:
                    v *= x ** e
            total += v
        return total

    def __repr__(self):
        if not self.terms:
            return "Poly(0)"
        parts = []
        for m, c in self.sorted_terms():
            mono = "*".join(f"X{k}^{e}" if e > 1 else f"X{k}" for k, e in enumerate(m) if e)
            parts.append(f"({c.re}{'+' if c.im >= 0 else ''}{c.im}i)" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


# -- matrix symbols -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PhaseSymbol:
    """``N x N`` matrix of polynomials in ``2n`` phase-space variables."""

    n: int
    N: int
    entries: tuple

    def __post_init__(self):
        if self.n < 1 or self.N < 1:
            raise ValueError("n and N must be positive")
        rows = tuple(tuple(row) for row in self.entries)
        if len(rows) != self.N or any(len(r) != self.N for r in rows):
            raise ValueError(f"entries must be {self.N}x{self.N}")
        for row in rows:
            for p in row:
                if not isinstance(p, Poly) or p.nvars != 2 * self.n:
                    raise ValueError("every entry must be a Poly in 2n variables")
        object.__setattr__(self, "entries", rows)

    # -- constructors -----------------------------------------------------
    @classmethod
    def zeros(cls, n: int, N: int) -> "PhaseSymbol":
        z = Poly(2 * n)
        return cls(n, N, tuple(tuple(z for _ in range(N)) for _ in range(N)))

    @classmethod
    def identity(cls, n: int, N: int, scalar: Poly | None = None) -> "PhaseSymbol":
        scalar = Poly.const(2 * n, 1) if scalar is None else scalar
        z = Poly(2 * n)
        return cls(n, N, tuple(tuple(scalar if i == j else z for j in range(N)) for i in range(N)))

    @classmethod
    def scalar(cls, n: int, p: Poly) -> "PhaseSymbol":
        return cls(n, 1, ((p,),))

    @classmethod
    def from_constant(cls, n: int, matrix) -> "PhaseSymbol":
        """Constant symbol from a nested sequence of exact numbers."""
        N = len(matrix)
        return cls(n, N, tuple(tuple(Poly.const(2 * n, QI.coerce(v)) for v in row)
                               for row in matrix))

    # -- structure --------------------------------------------------------
    def __iter__(self):
        return iter(self.entries)

    def entry(self, i: int, j: int) -> Poly:
        return self.entries[i][j]

    def is_zero(self) -> bool:
        return all(p.is_zero() for row in self.entries for p in row)

    def degrees(self) -> set:
        out = set()
        for row in self.entries:
            for p in row:
                out |= p.degrees()
        return out

    def trace(self) -> Poly:
        out = Poly(2 * self.n)
        for k in range(self.N):
            out = out + self.entries[k][k]
        return out

    def map(self, fn) -> "PhaseSymbol":
        return PhaseSymbol(self.n, self.N, tuple(tuple(fn(p) for p in row) for row in self.entries))

    def homogeneous_part(self, degree: int) -> "PhaseSymbol":
        return self.map(lambda p: p.homogeneous_part(degree))

    def conjugate_transpose(self) -> "PhaseSymbol":
        return PhaseSymbol(self.n, self.N, tuple(
            tuple(self.entries[j][i].conjugate() for j in range(self.N)) for i in range(self.N)))

    def diff(self, index: int) -> "PhaseSymbol":
        return self.map(lambda p: p.diff(index))

    def scale_variables(self, tau) -> "PhaseSymbol":
        return self.map(lambda p: p.scale_variables(tau))

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: "PhaseSymbol"):
        if (self.n, self.N) != (other.n, other.N):
            raise ValueError(f"dimension mismatch: (n, N)=({self.n}, {self.N}) "
                             f"vs ({other.n}, {other.N})")

    def __eq__(self, other):
        if not isinstance(other, PhaseSymbol):
            return NotImplemented
        return (self.n, self.N) == (other.n, other.N) and self.entries == other.entries

    def __hash__(self):
        return hash((self.n, self.N, self.entries))

    def __add__(self, other: "PhaseSymbol") -> "PhaseSymbol":
        self._check(other)
        return PhaseSymbol(self.n, self.N, tuple(
            tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.entries, other.entries)))

    def __neg__(self):
        return self.map(lambda p: -p)

    def __sub__(self, other: "PhaseSymbol") -> "PhaseSymbol":
        return self + (-other)

    def scale(self, factor) -> "PhaseSymbol":
        if isinstance(factor, Poly):
            return self.map(lambda p: p * factor)
        factor = QI.coerce(factor)
        return self.map(lambda p: p.scale(factor))

    def __matmul__(self, other: "PhaseSymbol") -> "PhaseSymbol":
        self._check(other)
        N = self.N
        rows = []
        for i in range(N):
            row = []
            for j in range(N):
                acc = Poly(2 * self.n)
                for k in range(N):
                    a = self.entries[i][k]
                    b = other.entries[k][j]
                    if a.terms and b.terms:
                        acc = acc + a * b
                row.append(acc)
            rows.append(tuple(row))
        return PhaseSymbol(self.n, N, tuple(rows))

    def __repr__(self):
        return f"PhaseSymbol(n={self.n}, N={self.N}, entries={self.entries!r})"


@dataclass(frozen=True, eq=True)
class HomogeneousPart:
    degree: int
    symbol: PhaseSymbol

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError("degree must be non-negative")
        if self.symbol.degrees() - {self.degree}:
            raise ValueError(f"symbol is not homogeneous of degree {self.degree}")


def grade_decompose(s: PhaseSymbol) -> list[HomogeneousPart]:
    """Split ``s`` into homogeneous parts, ascending in degree, zero parts omitted."""
    return [HomogeneousPart(d, s.homogeneous_part(d)) for d in sorted(s.degrees())]


# -- brackets ---------------------------------------------------------------

def _x(n: int, k: int) -> int:
    return k


def _xi(n: int, k: int) -> int:
    return n + k


def poisson_bracket(a: PhaseSymbol, b: PhaseSymbol) -> PhaseSymbol:
    """First bracket ``sum_k d_xi a . d_x b - d_x a . d_xi b``; matrix order kept."""
    a._check(b)
    n = a.n
    out = PhaseSymbol.zeros(n, a.N)
    for k in range(n):
        da_xi = a.diff(_xi(n, k))
        da_x = a.diff(_x(n, k))
        if not da_xi.is_zero():
            out = out + da_xi @ b.diff(_x(n, k))
        if not da_x.is_zero():
            out = out - da_x @ b.diff(_xi(n, k))
    return out


def poisson_bracket2(a: PhaseSymbol, b: PhaseSymbol) -> PhaseSymbol:
    """Second iterated bracket of the Weyl composition (see module docstring)."""
    a._check(b)
    n = a.n
    out = PhaseSymbol.zeros(n, a.N)
    # (d_xi_k d_x'_k - d_x_k d_xi'_k)(d_xi_l d_x'_l - d_x_l d_xi'_l), primes on b
    for k, l in product(range(n), repeat=2):
        for (ia, ib, sa), (ja, jb, sb) in product(
                [(_xi(n, k), _x(n, k), 1), (_x(n, k), _xi(n, k), -1)],
                [(_xi(n, l), _x(n, l), 1), (_x(n, l), _xi(n, l), -1)]):
            da = a.diff(ia).diff(ja)
            if da.is_zero():
                continue
            db = b.diff(ib).diff(jb)
            if db.is_zero():
                continue
            term = da @ db
            out = out + term if sa * sb > 0 else out - term
    return out


def weyl_product_term(a: PhaseSymbol, b: PhaseSymbol, j: int) -> PhaseSymbol:
    """The order-``j`` Moyal term ``(1/j!)(-i/2)**j {a,b}_(j)`` for ``j`` in {1, 2}."""
    if j == 1:
        return poisson_bracket(a, b).scale(QI(0, Fraction(-1, 2)))
    if j == 2:
        # (1/2)(-i/2)^2 = -1/8
        return poisson_bracket2(a, b).scale(Fraction(-1, 8))
    raise ValueError(f"only Moyal orders 1 and 2 are supported, got j={j}")


# -- JSON -------------------------------------------------------------------

def _frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def poly_to_json(p: Poly) -> list:
    return [{"monomial": list(m), "re": _frac_str(c.re), "im": _frac_str(c.im)}
            for m, c in p.sorted_terms()]


def poly_from_json(data: Iterable, nvars: int) -> Poly:
    terms: dict = {}
    for item in data:
        mono = tuple(int(e) for e in item["monomial"])
        if len(mono) != nvars:
            raise ValueError(f"monomial {mono} does not have {nvars} exponents")
        c = QI(as_fraction(item.get("re", "0")), as_fraction(item.get("im", "0")))
        terms[mono] = terms.get(mono, ZERO) + c
    return Poly(nvars, terms)


def symbol_to_json(s: PhaseSymbol) -> dict:
    return {"n": s.n, "N": s.N,
            "entries": [[poly_to_json(p) for p in row] for row in s.entries]}


def symbol_from_json(data: dict) -> PhaseSymbol:
    n, N = int(data["n"]), int(data["N"])
    return PhaseSymbol(n, N, tuple(tuple(poly_from_json(p, 2 * n) for p in row)
                                   for row in data["entries"]))
