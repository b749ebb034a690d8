"""The elliptic surface E: y^2 = 4x^3 + (4t^4+4t^3+1)x^2 - 2t^3(t+1)^2(2t^2+2t+1)x + t^6(t+1)^4.

Arithmetic runs on the monic model Y^2 = X^3 + a2 X^2 + a4 X + a6 with
X = 4x, Y = 4y; points are reported in (x, y).  The base field is either Q
(a rational value of t) or Q(t) via sympy's rational function field.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import sympy

from .arith import DomainError, as_fraction

T = sympy.Symbol("t")


@lru_cache(maxsize=1)
def function_field():
    """Q(t), with elements reduced by polynomial gcd after every operation."""
    return sympy.QQ.frac_field(T)


def _coefficients(t):
    """(a2, a4, a6) of the monic model, evaluated in whatever ring t lives in."""
    s = t + 1
    a2 = 4 * t**4 + 4 * t**3 + 1
    a4 = -8 * t**3 * s**2 * (2 * t**2 + 2 * t + 1)
    a6 = 16 * t**6 * s**4
    return a2, a4, a6


def discriminant(t):
    a2, a4, a6 = _coefficients(t)
    b2, b4, b6 = 4 * a2, 2 * a4, 4 * a6
    b8 = 4 * a2 * a6 - a4 * a4
    return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


@dataclass(frozen=True)
class CurvePoint:
    """A point of E in the original (x, y) coordinates; x = y = None is the
    point at infinity."""

    x: object = None
    y: object = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __str__(self):
        return "O" if self.is_infinity else f"({self.x}, {self.y})"


O = CurvePoint()


class EllipticSurface:
    """E over Q (``t`` a rational number) or over Q(t) (``t`` None)."""

    def __init__(self, t=None):
        if t is None:
            K = function_field()
            self.generic = True
            self.t = K.from_sympy(T)
            self._conv = lambda v: K.from_sympy(v) if isinstance(v, sympy.Expr) else K.convert(v)
        else:
            self.generic = False
            self.t = as_fraction(t)
            self._conv = as_fraction
            if discriminant(self.t) == 0:
                raise DomainError(f"E is singular at t = {self.t}")
        self.a2, self.a4, self.a6 = _coefficients(self.t)

    def __repr__(self):
        return "EllipticSurface(Q(t))" if self.generic else f"EllipticSurface(t={self.t})"

    def element(self, v):
        return self._conv(v)

    # monic-model helpers
    def _to_monic(self, P: CurvePoint):
        return (4 * P.x, 4 * P.y)

    def _from_monic(self, X, Y) -> CurvePoint:
        return CurvePoint(X / 4, Y / 4)

    def point(self, x, y) -> CurvePoint:
        P = CurvePoint(self.element(x), self.element(y))
        if not self.contains(P):
            raise DomainError(f"{P} is not on {self}")
        return P

    def contains(self, P: CurvePoint) -> bool:
        if P.is_infinity:
            return True
        X, Y = self._to_monic(P)
        return Y * Y == ((X + self.a2) * X + self.a4) * X + self.a6

    def base_point(self) -> CurvePoint:
        """P = (0, t^3 (t+1)^2)."""
        t = self.t
        return CurvePoint(self.element(0), t**3 * (t + 1) ** 2)

    def neg(self, P: CurvePoint) -> CurvePoint:
        return P if P.is_infinity else CurvePoint(P.x, -P.y)

    def add(self, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
        for R in (P, Q):
            if not self.contains(R):
                raise DomainError(f"{R} is not on {self}")
        return self._add(P, Q)

    def _add(self, P, Q):
        if P.is_infinity:
            return Q
        if Q.is_infinity:
            return P
        X1, Y1 = self._to_monic(P)
        X2, Y2 = self._to_monic(Q)
        if X1 == X2:
            if Y1 + Y2 == 0:
                return O
            lam = (3 * X1 * X1 + 2 * self.a2 * X1 + self.a4) / (2 * Y1)
        else:
            lam = (Y2 - Y1) / (X2 - X1)
        X3 = lam * lam - self.a2 - X1 - X2
        Y3 = lam * (X1 - X3) - Y1
        return self._from_monic(X3, Y3)

    def multiple(self, n: int, P: CurvePoint) -> CurvePoint:
        if not self.contains(P):
            raise DomainError(f"{P} is not on {self}")
        if n < 0:
            return self.multiple(-n, self.neg(P))
        acc, base = O, P
        while n:
            if n & 1:
                acc = self._add(acc, base)
            n >>= 1
            if n:
                base = self._add(base, base)
        return acc

    def specialize(self, P: CurvePoint, t) -> CurvePoint:
        """Image of a Q(t)-point under t -> value; O if a pole appears."""
        if not self.generic:
            raise DomainError("specialize applies to the generic surface only")
        if P.is_infinity:
            return O
        t = as_fraction(t)
        tq = sympy.QQ(t.numerator, t.denominator)
        vals = []
        for c in (P.x, P.y):
            d = c.denom(tq)
            if d == 0:
                return O
            q = c.numer(tq) / d
            vals.append(Fraction(int(q.numerator), int(q.denominator)))
        return CurvePoint(*vals)


def ec_add(P: CurvePoint, Q: CurvePoint, t=None) -> CurvePoint:
    return EllipticSurface(t).add(P, Q)


def ec_multiple(n: int, P: CurvePoint, t=None) -> CurvePoint:
    return EllipticSurface(t).multiple(n, P)


def as_sympy(v):
    """A field element (Fraction or Q(t) element) as a sympy expression."""
    if isinstance(v, Fraction):
        return sympy.Rational(v.numerator, v.denominator)
    return function_field().to_sympy(v)


__all__ = [
    "CurvePoint",
    "EllipticSurface",
    "O",
    "T",
    "discriminant",
    "ec_add",
    "ec_multiple",
    "function_field",
    "as_sympy",
]
