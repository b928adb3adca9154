"""Floating estimates carrying a rigorous absolute error bound.

Every operation widens the bound by the rounding committed in the operation
itself and in the bound arithmetic, so bounds only ever grow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

UNIT_ROUNDOFF = 2.0 ** -53
# Absorbs the roundings made while computing the bound itself.
_SLACK = 1.0 + 16 * UNIT_ROUNDOFF


def _widen(err: float) -> float:
    return err * _SLACK + 2.0 ** -1074


@dataclass(frozen=True)
class ApproxValue:
    value: float
    abs_error: float = 0.0

    def __post_init__(self):
        if not self.abs_error >= 0.0:
            raise ValueError("abs_error must be nonnegative")

    @classmethod
    def exact(cls, x: float) -> "ApproxValue":
        return cls(float(x), 0.0)

    @classmethod
    def from_rational(cls, q) -> "ApproxValue":
        q = Fraction(q)
        v = float(q)
        if Fraction(v) == q:
            return cls(v, 0.0)
        return cls(v, _widen(abs(v) * UNIT_ROUNDOFF))

    @property
    def lower(self) -> float:
        return self.value - self.abs_error

    @property
    def upper(self) -> float:
        return self.value + self.abs_error

    def contains(self, x, slack: float = 0.0) -> bool:
        return abs(Fraction(x) - Fraction(self.value)) <= Fraction(self.abs_error) + Fraction(slack)

    def _coerce(self, other) -> "ApproxValue":
        if isinstance(other, ApproxValue):
            return other
        if isinstance(other, (int, Fraction)):
            return ApproxValue.from_rational(other)
        if isinstance(other, float):
            return ApproxValue.exact(other)
        return NotImplemented

    def __neg__(self):
        return ApproxValue(-self.value, self.abs_error)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        v = self.value + other.value
        return ApproxValue(v, _widen(self.abs_error + other.abs_error + abs(v) * UNIT_ROUNDOFF))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self, other
        v = a.value * b.value
        err = (abs(a.value) * b.abs_error + abs(b.value) * a.abs_error
               + a.abs_error * b.abs_error + abs(v) * UNIT_ROUNDOFF)
        return ApproxValue(v, _widen(err))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, int) and other != 0:
            v = self.value / other
            return ApproxValue(v, _widen(self.abs_error / abs(other) + abs(v) * UNIT_ROUNDOFF))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.abs_error >= abs(other.value):
            raise ZeroDivisionError("divisor interval contains zero")
        v = self.value / other.value
        lo_den = abs(other.value) - other.abs_error
        # |a/b - a'/b'| <= (|a| eb + |b| ea) / (|b| (|b| - eb))
        err = (abs(self.value) * other.abs_error + abs(other.value) * self.abs_error) / (
            abs(other.value) * lo_den) + abs(v) * UNIT_ROUNDOFF
        return ApproxValue(v, _widen(err * (1 + 4 * UNIT_ROUNDOFF)))

    def exp(self) -> "ApproxValue":
        """exp with the libm result assumed within 1 ulp."""
        v = math.exp(self.value)
        hi = math.exp(self.value + self.abs_error)
        err = v * math.expm1(self.abs_error) + 2 * hi * UNIT_ROUNDOFF
        return ApproxValue(v, _widen(err * (1 + 8 * UNIT_ROUNDOFF)))

    def to_json(self) -> dict:
        return {"value": self.value, "abs_error": self.abs_error}

    def __format__(self, spec):
        return f"{format(self.value, spec)} ± {self.abs_error:.1e}"


def fsum_bounded(terms, term_rel_error: float) -> ApproxValue:
    """Correctly rounded sum of terms, each carrying the given relative error.

    The terms must share one sign; the bound is ``term_rel_error * |sum|``
    plus the final rounding.
    """
    s = math.fsum(terms)
    err = abs(s) * term_rel_error / (1.0 - term_rel_error) + abs(s) * UNIT_ROUNDOFF
    return ApproxValue(s, _widen(err))
