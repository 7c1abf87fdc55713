"""Exact values of the form ``rat * pi**(k/2) * scalar**(m/2)`` and numeric estimates."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import mpmath

from .symbols import as_fraction

mpmath.mp.dps = 100


@dataclass(frozen=True)
class ClosedForm:
    """``rat * pi**(pi_half_pow/2) * scalar**(scalar_half_pow/2)``.

    Normalised so that ``scalar_half_pow`` is 0 or 1 (integer powers of the
    rational scalar are folded into ``rat``) and ``scalar == 1`` when
    ``scalar_half_pow == 0``.
    """

    rat: Fraction
    pi_half_pow: int = 0
    scalar: Fraction = Fraction(1)
    scalar_half_pow: int = 0

    def __post_init__(self):
        rat = as_fraction(self.rat)
        scalar = as_fraction(self.scalar)
        m = self.scalar_half_pow
        if scalar <= 0:
            raise ValueError("scalar must be positive")
        if m and scalar != 1:
            whole, m = divmod(m, 2)
            rat *= scalar ** whole
        else:
            m = 0
        if m == 0:
            scalar = Fraction(1)
        if rat == 0:
            object.__setattr__(self, "pi_half_pow", 0)
            scalar, m = Fraction(1), 0
        object.__setattr__(self, "rat", rat)
        object.__setattr__(self, "scalar", scalar)
        object.__setattr__(self, "scalar_half_pow", m)

    @property
    def shape(self):
        return (self.pi_half_pow, self.scalar, self.scalar_half_pow)

    def is_zero(self) -> bool:
        return self.rat == 0

    def is_rational(self) -> bool:
        return self.pi_half_pow == 0 and self.scalar_half_pow == 0

    def __add__(self, other: "ClosedForm") -> "ClosedForm":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.shape != other.shape:
            raise ValueError(f"cannot add {self} and {other} exactly")
        return ClosedForm(self.rat + other.rat, *self.shape)

    def __neg__(self):
        return ClosedForm(-self.rat, *self.shape)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return ClosedForm(self.rat * other, *self.shape)
        if self.scalar_half_pow and other.scalar_half_pow and self.scalar != other.scalar:
            raise ValueError("cannot multiply half powers of different scalars exactly")
        scalar = self.scalar if self.scalar_half_pow else other.scalar
        return ClosedForm(self.rat * other.rat, self.pi_half_pow + other.pi_half_pow,
                          scalar, self.scalar_half_pow + other.scalar_half_pow)

    __rmul__ = __mul__

    def inverse(self) -> "ClosedForm":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        # s**(-1/2) = s**(1/2) / s
        rat = 1 / self.rat
        if self.scalar_half_pow:
            rat /= self.scalar
        return ClosedForm(rat, -self.pi_half_pow, self.scalar, self.scalar_half_pow)

    def __truediv__(self, other: "ClosedForm") -> "ClosedForm":
        return self * other.inverse()

    def mp(self):
        v = mpmath.mpf(self.rat.numerator) / self.rat.denominator
        if self.pi_half_pow:
            v *= mpmath.pi ** (mpmath.mpf(self.pi_half_pow) / 2)
        if self.scalar_half_pow:
            v *= mpmath.sqrt(mpmath.mpf(self.scalar.numerator) / self.scalar.denominator)
        return v

    def __float__(self):
        return float(self.mp())

    def to_json(self) -> dict:
        out = {"rat": f"{self.rat.numerator}/{self.rat.denominator}",
               "pi_half_pow": self.pi_half_pow,
               "scalar_half_pow": self.scalar_half_pow}
        if self.scalar_half_pow:
            out["scalar"] = f"{self.scalar.numerator}/{self.scalar.denominator}"
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ClosedForm":
        return cls(as_fraction(data["rat"]), int(data.get("pi_half_pow", 0)),
                   as_fraction(data.get("scalar", "1")), int(data.get("scalar_half_pow", 0)))

    def __str__(self):
        s = str(self.rat)
        if self.pi_half_pow:
            s += f"*pi^({self.pi_half_pow}/2)"
        if self.scalar_half_pow:
            s += f"*({self.scalar})^(1/2)"
        return s


@dataclass(frozen=True)
class Estimate:
    """Floating value with an absolute error bar."""

    val: float
    err: float

    def __float__(self):
        return float(self.val)

    def to_json(self) -> dict:
        return {"val": float(self.val), "err": float(self.err)}

    @classmethod
    def from_json(cls, data: dict) -> "Estimate":
        return cls(float(data["val"]), float(data["err"]))


def value_from_json(data):
    if data is None:
        return None
    if "rat" in data:
        return ClosedForm.from_json(data)
    return Estimate.from_json(data)


def gamma_exact(x: Fraction) -> ClosedForm:
    """Gamma at an integer or half-integer that is not a pole."""
    x = as_fraction(x)
    if x.denominator == 1:
        k = x.numerator
        if k <= 0:
            raise ValueError(f"Gamma has a pole at {k}")
        return ClosedForm(Fraction(factorial(k - 1)))
    if x.denominator != 2:
        raise ValueError(f"Gamma({x}) is not in the closed field")
    # Gamma(1/2) = sqrt(pi); step with Gamma(z+1) = z Gamma(z)
    k = (x - Fraction(1, 2)).numerator  # x = k + 1/2
    rat = Fraction(1)
    if k >= 0:
        for i in range(k):
            rat *= Fraction(2 * i + 1, 2)
    else:
        for i in range(-k):
            rat /= Fraction(-2 * i - 1, 2)
    return ClosedForm(rat, 1)
