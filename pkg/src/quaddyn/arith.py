"""Exact integer and rational kernel: fractions, valuations, points of P^1(Q),
integer polynomials and resultants of binary forms."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

import gmpy2


class DomainError(ValueError):
    """Raised when an input lies outside the domain of an operation."""


class PreconditionError(DomainError):
    """Raised when a caller-checked precondition does not hold."""


def reduce(num: int, den: int) -> Fraction:
    if den == 0:
        raise DomainError("zero denominator")
    return Fraction(num, den)


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise DomainError(f"not an exact rational: {x!r}")


def is_prime(p: int) -> bool:
    return p >= 2 and bool(gmpy2.is_prime(p, 50))


def valuation(x, p: int) -> float | int:
    """p-adic valuation of a rational; +inf for zero."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    x = as_fraction(x)
    if x == 0:
        return math.inf
    n, d = x.numerator, x.denominator
    if n % p == 0:
        return int(gmpy2.remove(n, p)[1])
    if d % p == 0:
        return -int(gmpy2.remove(d, p)[1])
    return 0


class P1Point:
    """A point (a:b) of P^1(Q), stored with gcd(a,b)=1 and b >= 0."""

    __slots__ = ("a", "b")

    def __init__(self, a: int, b: int = 1):
        a, b = int(a), int(b)
        if a == 0 and b == 0:
            raise DomainError("(0:0) is not a projective point")
        g = math.gcd(a, b)
        a, b = a // g, b // g
        if b < 0 or (b == 0 and a < 0):
            a, b = -a, -b
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __setattr__(self, name, value):
        raise AttributeError("P1Point is immutable")

    @classmethod
    def from_value(cls, x) -> "P1Point":
        if isinstance(x, P1Point):
            return x
        if isinstance(x, tuple):
            return cls(*x)
        if isinstance(x, str) and x.strip() in ("inf", "oo", "∞", "1/0"):
            return INFINITY
        x = as_fraction(x)
        return cls(x.numerator, x.denominator)

    @property
    def is_infinity(self) -> bool:
        return self.b == 0

    def to_fraction(self) -> Fraction:
        if self.b == 0:
            raise DomainError("infinity has no affine value")
        return Fraction(self.a, self.b)

    def pair(self) -> tuple[int, int]:
        return (self.a, self.b)

    def __eq__(self, other):
        if not isinstance(other, P1Point):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __repr__(self):
        return f"P1Point({self})"

    def __str__(self):
        if self.b == 0:
            return "inf"
        if self.b == 1:
            return str(self.a)
        return f"{self.a}/{self.b}"


INFINITY = P1Point(1, 0)


class IntPoly:
    """Integer polynomial, coeffs[i] is the coefficient of z**i.

    ``bound`` is a nominal degree used when homogenizing; it may exceed the
    true degree."""

    __slots__ = ("coeffs", "bound")

    def __init__(self, coeffs: Iterable[int], bound: int | None = None):
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        deg = len(cs) - 1
        self.bound = deg if bound is None else max(bound, deg)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def padded(self, d: int) -> list[int]:
        return [self.coeff(i) for i in range(d + 1)]

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = math.gcd(g, c)
        return g

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_form(self, a: int, b: int, d: int | None = None) -> int:
        """Value of the degree-d homogenization at (a, b)."""
        d = self.bound if d is None else d
        return sum(self.coeff(i) * a**i * b ** (d - i) for i in range(d + 1))

    def derivative(self) -> "IntPoly":
        return IntPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def __add__(self, other: "IntPoly") -> "IntPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPoly([self.coeff(i) + other.coeff(i) for i in range(n)], max(self.bound, other.bound))

    def __sub__(self, other: "IntPoly") -> "IntPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPoly([self.coeff(i) - other.coeff(i) for i in range(n)], max(self.bound, other.bound))

    def __neg__(self) -> "IntPoly":
        return IntPoly([-c for c in self.coeffs], self.bound)

    def __mul__(self, other) -> "IntPoly":
        if isinstance(other, int):
            return IntPoly([c * other for c in self.coeffs], self.bound)
        if self.is_zero() or other.is_zero():
            return IntPoly([], self.bound + other.bound)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return IntPoly(out, self.bound + other.bound)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, IntPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"IntPoly({list(self.coeffs)})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}{'*' + mono if mono else ''}"
            terms.append(("-" if c < 0 else "+", body))
        s = "".join(f" {sg} {b}" for sg, b in terms).strip()
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


def det_bareiss(m: Sequence[Sequence[int]]) -> int:
    """Fraction-free determinant of a square integer matrix."""
    a = [list(row) for row in m]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def sylvester_forms(f: IntPoly, g: IntPoly, d: int) -> list[list[int]]:
    """Sylvester matrix of the degree-d binary forms of f and g.

    Rows are indexed by the multiplier monomials, coefficients listed from
    X^(2d-1) down to Y^(2d-1)."""
    fc = list(reversed(f.padded(d)))
    gc = list(reversed(g.padded(d)))
    size = 2 * d
    rows = []
    for src in (fc, gc):
        for shift in range(d):
            row = [0] * size
            row[shift:shift + d + 1] = src
            rows.append(row)
    return rows


def resultant_forms(f: IntPoly, g: IntPoly, d: int) -> int:
    if max(f.degree, g.degree) > d:
        raise DomainError("degree exceeds the form degree")
    if d == 2:
        f2, f1, f0 = f.coeff(2), f.coeff(1), f.coeff(0)
        g2, g1, g0 = g.coeff(2), g.coeff(1), g.coeff(0)
        return resultant_quadratic_forms((f2, f1, f0), (g2, g1, g0))
    return det_bareiss(sylvester_forms(f, g, d))


def resultant_quadratic_forms(F: Sequence[int], G: Sequence[int]) -> int:
    """Resultant of f2 X^2 + f1 XY + f0 Y^2 and g2 X^2 + g1 XY + g0 Y^2."""
    f2, f1, f0 = F
    g2, g1, g0 = G
    u = f2 * g0 - f0 * g2
    return u * u - (f2 * g1 - f1 * g2) * (f1 * g0 - f0 * g1)


def content(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = math.gcd(g, v)
    return g


def lcm_denominators(values: Iterable[Fraction]) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, v.denominator)
    return out


def is_square(n: int) -> bool:
    return n >= 0 and bool(gmpy2.is_square(n))


def isqrt(n: int) -> int:
    return math.isqrt(n)
