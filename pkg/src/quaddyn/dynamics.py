"""Degree-2 dynamics on P^1(Q).

Maps are stored as a pair of binary quadratic forms F = (f2, f1, f0) and
G = (g2, g1, g0), meaning z -> (f2 z^2 + f1 z + f0) / (g2 z^2 + g1 z + g0).
Everything here is exact except the real-valued heights, which are logs of
exact integers.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import gmpy2
from gmpy2 import mpz

from .arith import (
    DomainError,
    IntPoly,
    P1Point,
    PreconditionError,
    as_fraction,
    content,
    det_bareiss,
    is_prime,
    resultant_quadratic_forms,
    valuation,
)

LOG2 = math.log(2.0)


def log_abs(n) -> float:
    """Natural log of |n| for an arbitrarily large nonzero integer."""
    n = abs(n)
    bits = n.bit_length()
    if bits <= 1000:
        return math.log(int(n))
    shift = bits - 64
    return math.log(int(n >> shift)) + shift * LOG2


class QuadRatMap:
    """A degree-2 rational map with content-normalized integer forms.

    Sign convention: the first nonzero coefficient of G (reading g2, g1, g0)
    is positive."""

    __slots__ = ("F", "G", "_R", "_hbd", "_sigma")

    def __init__(self, F: Sequence[int], G: Sequence[int]):
        F = tuple(int(v) for v in F)
        G = tuple(int(v) for v in G)
        if len(F) != 3 or len(G) != 3:
            raise DomainError("forms must have three coefficients (x^2, xy, y^2)")
        g = content(F + G)
        if g == 0:
            raise DomainError("zero map")
        lead = next((v for v in G if v != 0), 0)
        if lead < 0:
            g = -g
        F = tuple(v // g for v in F)
        G = tuple(v // g for v in G)
        R = resultant_quadratic_forms(F, G)
        if R == 0:
            raise DomainError("degenerate map: resultant is zero")
        self.F, self.G, self._R = F, G, R
        self._hbd = None
        self._sigma = None

    @classmethod
    def from_polys(cls, f: IntPoly, g: IntPoly) -> "QuadRatMap":
        if max(f.degree, g.degree) > 2:
            raise DomainError("degree above 2")
        return cls((f.coeff(2), f.coeff(1), f.coeff(0)), (g.coeff(2), g.coeff(1), g.coeff(0)))

    @classmethod
    def polynomial(cls, c) -> "QuadRatMap":
        """z^2 + c, as f = q z^2 + p, g = q for c = p/q."""
        c = as_fraction(c)
        return cls((c.denominator, 0, c.numerator), (0, 0, c.denominator))

    @classmethod
    def parse(cls, text: str) -> "QuadRatMap":
        """Parse '(a z^2 + b z + c)/(d z^2 + e z + f)' or a polynomial in z."""
        import sympy

        z = sympy.Symbol("z")
        expr = sympy.sympify(text.replace("^", "**"), locals={"z": z})
        num, den = sympy.fraction(sympy.together(expr))
        pn, pd = sympy.Poly(num, z), sympy.Poly(den, z)
        if pn.degree() > 2 or pd.degree() > 2:
            raise DomainError("degree above 2")
        L = math.lcm(*[int(sympy.Rational(c).q) for c in pn.all_coeffs() + pd.all_coeffs()])
        fc = [int(sympy.Rational(c) * L) for c in reversed(pn.all_coeffs())] + [0, 0, 0]
        gc = [int(sympy.Rational(c) * L) for c in reversed(pd.all_coeffs())] + [0, 0, 0]
        return cls((fc[2], fc[1], fc[0]), (gc[2], gc[1], gc[0]))

    @property
    def f(self) -> IntPoly:
        return IntPoly([self.F[2], self.F[1], self.F[0]], 2)

    @property
    def g(self) -> IntPoly:
        return IntPoly([self.G[2], self.G[1], self.G[0]], 2)

    @property
    def resultant(self) -> int:
        return self._R

    def is_polynomial(self) -> bool:
        return self.G[0] == 0 and self.G[1] == 0

    def poly_constant(self) -> Fraction:
        """c for a map equal to z^2 + c."""
        f2, f1, f0 = self.F
        if not (self.is_polynomial() and f1 == 0 and f2 == self.G[2]):
            raise DomainError("not of the form z^2 + c")
        return Fraction(f0, f2)

    def __call__(self, x) -> P1Point:
        return apply_map(self, P1Point.from_value(x))

    def __eq__(self, other):
        if not isinstance(other, QuadRatMap):
            return NotImplemented
        return self.F == other.F and self.G == other.G

    def __hash__(self):
        return hash((self.F, self.G))

    def __repr__(self):
        return f"QuadRatMap({self})"

    def __str__(self):
        try:
            return f"z^2 + {self.poly_constant()}"
        except DomainError:
            return f"({self.f})/({self.g})"


def step_pair(F, G, a: int, b: int) -> tuple[int, int]:
    """One application of the map to a coprime pair, reduced and canonical."""
    f2, f1, f0 = F
    g2, g1, g0 = G
    aa, ab, bb = a * a, a * b, b * b
    A = f2 * aa + f1 * ab + f0 * bb
    B = g2 * aa + g1 * ab + g0 * bb
    g = math.gcd(A, B)
    A //= g
    B //= g
    if B < 0 or (B == 0 and A < 0):
        A, B = -A, -B
    return A, B


def apply_map(phi: QuadRatMap, x: P1Point) -> P1Point:
    a, b = step_pair(phi.F, phi.G, x.a, x.b)
    return P1Point(a, b)


@dataclass(frozen=True)
class OrbitRecord:
    iterates: tuple
    tail: int | None
    period: int | None
    status: str  # "resolved" or "open"

    @property
    def resolved(self) -> bool:
        return self.status == "resolved"

    @property
    def length(self) -> int | None:
        """Number of distinct points in the forward orbit."""
        return None if not self.resolved else self.tail + self.period


def detect_orbit(phi: QuadRatMap, x: P1Point, max_iter: int) -> OrbitRecord:
    if max_iter < 1:
        raise DomainError("max_iter must be at least 1")
    x = P1Point.from_value(x)
    seen = {x.pair(): 0}
    pts = [x.pair()]
    a, b = x.pair()
    for i in range(1, max_iter + 1):
        a, b = step_pair(phi.F, phi.G, a, b)
        pts.append((a, b))
        j = seen.get((a, b))
        if j is not None:
            return OrbitRecord(tuple(P1Point(*p) for p in pts), j, i - j, "resolved")
        seen[(a, b)] = i
    return OrbitRecord(tuple(P1Point(*p) for p in pts), None, None, "open")


def weil_height(x) -> float:
    x = P1Point.from_value(x)
    return math.log(max(abs(x.a), abs(x.b)))


# --- height comparison constant ---------------------------------------------


class HeightBoundData(NamedTuple):
    R: int
    D: float
    C: float
    D_exact: Fraction


def adjugate_bound(F, G) -> int:
    """K with max(|F|,|G|)(a,b) >= |R|/K * max(|a|,|b|)^2 for all real (a,b).

    Columns 0 and 3 of the adjugate of the Sylvester matrix give forms
    u, v with u F + v G = R X^3 (resp. R Y^3); K is the larger l1 norm."""
    f2, f1, f0 = F
    g2, g1, g0 = G
    S = [[f2, 0, g2, 0], [f1, f2, g1, g2], [f0, f1, g0, g1], [0, f0, 0, g0]]

    def minor(i, j):
        return det_bareiss([[S[r][c] for c in range(4) if c != j] for r in range(4) if r != i])

    def col(k):
        return sum(abs(minor(k, j)) for j in range(4))

    return max(col(0), col(3))


def _certified_chart_min(P, Q, upper: Fraction, rel_tol: Fraction, max_nodes: int):
    """Certified lower bound and sampled upper bound for
    min over s in [-1, 1] of max(|P(s)|, |Q(s)|), P, Q quadratics (p2, p1, p0).

    Intervals are dyadic [k/2^j, (k+1)/2^j].  With midpoint u/S and radius
    1/S (S = 2^(j+1)), Taylor's formula for a quadratic gives
    |p(s)| >= (|p(u/S)| S^2 - |p'(u/S)| S - |p2|) / S^2 on the interval."""

    def scaled(p, u, S):
        p2, p1, p0 = p
        return p2 * u * u + p1 * u * S + p0 * S * S, 2 * p2 * u + p1 * S

    def node(j, k):
        S = 1 << (j + 1)
        u = 2 * k + 1
        vp, dp = scaled(P, u, S)
        vq, dq = scaled(Q, u, S)
        lo = max(abs(vp) - abs(dp) - abs(P[0]), abs(vq) - abs(dq) - abs(Q[0]), 0)
        sample = max(abs(vp), abs(vq))
        return Fraction(lo, S * S), Fraction(sample, S * S)

    for s in (Fraction(-1), Fraction(0), Fraction(1)):
        v = max(abs(P[0] * s * s + P[1] * s + P[2]), abs(Q[0] * s * s + Q[1] * s + Q[2]))
        upper = min(upper, v)
    heap = []
    j0 = 2
    for k in range(-(1 << j0), 1 << j0):
        lo, smp = node(j0, k)
        upper = min(upper, smp)
        heap.append((lo, j0, k))
    heapq.heapify(heap)
    nodes = 0
    while heap:
        lo, j, k = heap[0]
        if lo >= upper * (1 - rel_tol) or nodes >= max_nodes:
            return lo, upper
        heapq.heappop(heap)
        nodes += 1
        for kk in (2 * k, 2 * k + 1):
            clo, smp = node(j + 1, kk)
            upper = min(upper, smp)
            heapq.heappush(heap, (clo, j + 1, kk))
    return Fraction(0), upper


def height_bound_data(phi: QuadRatMap, rel_tol: float = 0.01, max_nodes: int = 200000) -> HeightBoundData:
    """R, a certified lower bound D for min over P^1(R) of
    max(|f(t)|, |g(t)|) / max(|t|^2, 1), and C = log(|R|/D).

    D is the larger of the subdivision bound and the adjugate bound |R|/K;
    both are rigorous, so the maximum is too."""
    if not isinstance(phi, QuadRatMap):
        raise DomainError("expected a QuadRatMap")
    if phi._hbd is not None:
        return phi._hbd
    F, G = phi.F, phi.G
    R = phi.resultant
    tol = Fraction(rel_tol).limit_denominator(10**6)
    inf = Fraction(10) ** 400
    lo1, up1 = _certified_chart_min(F, G, inf, tol, max_nodes)
    # |t| >= 1: t = 1/s, s^2 f(1/s) has reversed coefficients
    lo2, up2 = _certified_chart_min(F[::-1], G[::-1], min(up1, inf), tol, max_nodes)
    D_sub = min(lo1, lo2)
    D_adj = Fraction(abs(R), adjugate_bound(F, G))
    D = max(D_sub, D_adj)
    if D <= 0:
        raise DomainError("could not certify a positive lower bound")
    # round D down and C up so the float values stay conservative
    D_float = float(D) * (1 - 1e-14)
    C = log_abs(R) - math.log(D_float) + 1e-12
    hbd = HeightBoundData(R, D_float, C, D)
    phi._hbd = hbd
    return hbd


def upper_constant(phi: QuadRatMap) -> float:
    """C' with h(phi(x)) <= 2 h(x) + C' for every x."""
    return math.log(max(sum(abs(v) for v in phi.F), sum(abs(v) for v in phi.G)))


# --- canonical height -------------------------------------------------------


class HeightEstimate(NamedTuple):
    estimate: float
    floor: float
    iters: int
    error: float
    preperiodic: bool


def _iterate_heights(phi: QuadRatMap, x: P1Point, C: float):
    """Yield (i, h(phi^i(x)), repeat) for i = 0, 1, 2, ...

    Big iterates are reduced with gcd(A, B, R), valid because the gcd of
    the form values at a coprime pair divides the resultant.  ``repeat`` is
    True once the orbit closes; points are only remembered while their height
    is at most C, since every preperiodic point satisfies h <= C."""
    F = [mpz(v) for v in phi.F]
    G = [mpz(v) for v in phi.G]
    R = abs(mpz(phi.resultant))
    a, b = mpz(x.a), mpz(x.b)
    seen = set()
    i = 0
    while True:
        h = log_abs(max(abs(a), abs(b)))
        if h <= C + 1e-9:
            key = (int(a), int(b))
            if key in seen:
                yield i, h, True
                return
            seen.add(key)
        yield i, h, False
        aa, ab, bb = a * a, a * b, b * b
        A = F[0] * aa + F[1] * ab + F[2] * bb
        B = G[0] * aa + G[1] * ab + G[2] * bb
        if R != 1:
            g = gmpy2.gcd(gmpy2.gcd(A % R, B % R), R)
            if g != 1:
                A //= g
                B //= g
        if B < 0 or (B == 0 and A < 0):
            A, B = -A, -B
        a, b = A, B
        i += 1


def canonical_height(phi: QuadRatMap, x, iters: int, hbd: HeightBoundData | None = None) -> tuple[float, float]:
    """(2^-iters h(phi^iters(x)), best lower bound 2^-i (h(phi^i(x)) - C) over i <= iters).

    A preperiodic orbit that closes within ``iters`` steps gives estimate 0."""
    if iters < 1:
        raise DomainError("iters must be at least 1")
    x = P1Point.from_value(x)
    hbd = hbd or height_bound_data(phi)
    C = hbd.C
    floor = -math.inf
    est = 0.0
    for i, h, repeat in _iterate_heights(phi, x, C):
        if repeat:
            return 0.0, floor
        floor = max(floor, math.ldexp(h - C, -i))
        if i == iters:
            est = math.ldexp(h, -i)
            break
    return est, floor


def refine_canonical_height(
    phi: QuadRatMap,
    x,
    tol: float = 1e-6,
    min_iters: int = 12,
    max_iters: int = 40,
    max_nats: float = 5e6,
    hbd: HeightBoundData | None = None,
) -> HeightEstimate:
    """Iterate until |estimate - true height| <= 2^-n max(C, C') < tol.

    Stops early when the orbit closes (height exactly 0) or the iterate would
    exceed ``max_nats``; ``error`` reports the bound actually achieved."""
    x = P1Point.from_value(x)
    hbd = hbd or height_bound_data(phi)
    C = hbd.C
    width = max(C, upper_constant(phi), 1e-300)
    floor = -math.inf
    est, err, n = 0.0, math.inf, 0
    for i, h, repeat in _iterate_heights(phi, x, C):
        if repeat:
            return HeightEstimate(0.0, floor, i, 0.0, True)
        floor = max(floor, math.ldexp(h - C, -i))
        est, err, n = math.ldexp(h, -i), math.ldexp(width, -i), i
        if i >= max_iters or (i >= min_iters and err < tol) or h > max_nats:
            break
    return HeightEstimate(est, floor, n, err, False)


def padic_height_floor(c, p: int, i: int) -> float:
    """Lower bound for the canonical height of z^2 + c at a point whose
    i-th iterate has v_p < min(0, v_p(c)/2)."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    s = valuation(as_fraction(c), p)
    if s == math.inf:
        s_even_neg = False
    else:
        s_even_neg = s <= -2 and s % 2 == 0
    if p == 2 and s == -2:
        return 0.5 * LOG2
    if p == 2 and s == -4:
        return LOG2
    if s_even_neg:
        return math.ldexp((2 - s) * math.log(p), -i - 1)
    return 0.5 * math.log(p)


def bad_primes(phi: QuadRatMap) -> set[int]:
    """Primes where the reduction drops degree, i.e. the primes dividing R."""
    from sympy import factorint

    return set(int(p) for p in factorint(abs(phi.resultant)))


# --- conjugation, multipliers, sigma invariants ------------------------------


def _subst_form(P, u, v, w, z):
    """P(uX + vY, wX + zY) for a quadratic form P = (p2, p1, p0)."""
    p2, p1, p0 = P
    return (
        p2 * u * u + p1 * u * w + p0 * w * w,
        2 * p2 * u * v + p1 * (u * z + v * w) + 2 * p0 * w * z,
        p2 * v * v + p1 * v * z + p0 * z * z,
    )


def conjugate(phi: QuadRatMap, eta) -> QuadRatMap:
    """eta o phi o eta^-1 for eta = ((alpha, beta), (gamma, delta))."""
    (al, be), (ga, de) = eta
    if al * de - be * ga == 0:
        raise DomainError("singular coordinate change")
    Fs = _subst_form(phi.F, de, -be, -ga, al)
    Gs = _subst_form(phi.G, de, -be, -ga, al)
    Fn = tuple(al * Fs[i] + be * Gs[i] for i in range(3))
    Gn = tuple(ga * Fs[i] + de * Gs[i] for i in range(3))
    return QuadRatMap(Fn, Gn)


def moebius(eta, x: P1Point) -> P1Point:
    (al, be), (ga, de) = eta
    return P1Point(al * x.a + be * x.b, ga * x.a + de * x.b)


def _derivative_at(phi: QuadRatMap, z: Fraction) -> Fraction:
    f2, f1, f0 = phi.F
    g2, g1, g0 = phi.G
    f = (f2 * z + f1) * z + f0
    g = (g2 * z + g1) * z + g0
    df = 2 * f2 * z + f1
    dg = 2 * g2 * z + g1
    return (df * g - f * dg) / (g * g)


def multiplier(phi: QuadRatMap, x, n: int) -> Fraction:
    """(phi^n)'(x) for a point of exact period n."""
    x = P1Point.from_value(x)
    if n < 1:
        raise PreconditionError("period must be positive")
    cycle = [x]
    y = x
    for i in range(1, n + 1):
        y = apply_map(phi, y)
        if y == x and i < n:
            raise PreconditionError(f"{x} has period {i}, not {n}")
        if i < n:
            cycle.append(y)
    if y != x:
        raise PreconditionError(f"{x} is not {n}-periodic")
    if any(p.is_infinity for p in cycle):
        k = 0
        members = {p for p in cycle}
        while P1Point(k) in members:
            k += 1
        eta = ((0, 1), (1, -k))
        phi = conjugate(phi, eta)
        cycle = [moebius(eta, p) for p in cycle]
    out = Fraction(1)
    for p in cycle:
        out *= _derivative_at(phi, p.to_fraction())
    return out


@dataclass(frozen=True)
class SigmaInvariants:
    sigma1: Fraction
    sigma2: Fraction
    sigma3: Fraction
    map_height: float


# Q[z] helpers; polynomials are lists of Fractions, index = degree


def _trim(p):
    while p and p[-1] == 0:
        p.pop()
    return p


def _pmod(p, m):
    p = _trim(list(p))
    while len(p) >= len(m):
        q = p[-1] / m[-1]
        off = len(p) - len(m)
        for i, c in enumerate(m):
            p[off + i] -= q * c
        _trim(p)
    return p


def _pmul(p, q):
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return _trim(out)


def _pinv_mod(p, m):
    """Inverse of p modulo m via the extended Euclidean algorithm."""
    r0, r1 = list(m), _pmod(p, m)
    s0, s1 = [], [Fraction(1)]
    while r1:
        # polynomial division r0 = q r1 + r
        q = [Fraction(0)] * max(len(r0) - len(r1) + 1, 1)
        r = list(r0)
        while len(r) >= len(r1) and r:
            c = r[-1] / r1[-1]
            off = len(r) - len(r1)
            q[off] = c
            for i, v in enumerate(r1):
                r[off + i] -= c * v
            _trim(r)
        qs = _pmul(_trim(q), s1)
        s_new = [Fraction(0)] * max(len(s0), len(qs))
        for i, v in enumerate(s0):
            s_new[i] += v
        for i, v in enumerate(qs):
            s_new[i] -= v
        r0, r1 = r1, r
        s0, s1 = s1, _trim(s_new)
    if len(r0) != 1:
        raise DomainError("not invertible modulo the fixed-point polynomial")
    return [c / r0[0] for c in s0]


def _sigma_affine(phi: QuadRatMap):
    f2, f1, f0 = (Fraction(v) for v in phi.F)
    g2, g1, g0 = (Fraction(v) for v in phi.G)
    P = _trim([-f0, g0 - f1, g1 - f2, g2])  # z g(z) - f(z)
    gz = _trim([g0, g1, g2])
    num = _trim([f1, 2 * f2 - g1, -2 * g2])  # f'(z) - z g'(z)
    lam = _pmod(_pmul(num, _pinv_mod(gz, P)), P)
    cols = []
    basis = [[Fraction(1)], [Fraction(0), Fraction(1)], [Fraction(0), Fraction(0), Fraction(1)]]
    for e in basis:
        v = _pmod(_pmul(lam, e), P)
        cols.append([v[i] if i < len(v) else Fraction(0) for i in range(3)])
    M = [[cols[j][i] for j in range(3)] for i in range(3)]
    tr = M[0][0] + M[1][1] + M[2][2]
    s2 = (
        M[0][0] * M[1][1] - M[0][1] * M[1][0]
        + M[0][0] * M[2][2] - M[0][2] * M[2][0]
        + M[1][1] * M[2][2] - M[1][2] * M[2][1]
    )
    det = (
        M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
        - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
        + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0])
    )
    return tr, s2, det


def map_height_from_sigmas(s1: Fraction, s2: Fraction) -> float:
    c = math.lcm(s1.denominator, s2.denominator)
    a, b = s1.numerator * (c // s1.denominator), s2.numerator * (c // s2.denominator)
    return math.log(max(abs(a), abs(b), c))


def sigma_invariants(phi: QuadRatMap) -> SigmaInvariants:
    """Elementary symmetric functions of the fixed-point multipliers.

    The multipliers are the values of (f' - z g')/g at the roots of
    z g - f, so they are the eigenvalues of multiplication by that function
    on Q[z]/(z g - f); no roots are extracted.  If infinity is fixed, the
    map is first moved by z -> 1/(z - k) with k not fixed."""
    if phi._sigma is not None:
        return phi._sigma
    work = phi
    if phi.G[0] == 0:
        k = 0
        f2, f1, f0 = phi.F
        g2, g1, g0 = phi.G
        while k * ((g2 * k + g1) * k + g0) - ((f2 * k + f1) * k + f0) == 0:
            k += 1
        work = conjugate(phi, ((0, 1), (1, -k)))
    s1, s2, s3 = _sigma_affine(work)
    out = SigmaInvariants(s1, s2, s3, map_height_from_sigmas(s1, s2))
    phi._sigma = out
    return out


def sigma_forms(F, G) -> tuple[int, int, int]:
    """(c3, c2, c1) with T^3 c3 + T^2 c2 + T c1 + c0 the fixed-point
    multiplier polynomial of (F, G) up to a common factor; c3 is the resultant.

    Then sigma1 = -c2/c3 and sigma2 = c1/c3.  Valid for any nondegenerate map,
    including ones fixing infinity, and used as an independent route to the
    sigma invariants."""
    a, b, c = F
    d, e, f = G
    c3 = a*a*f*f - a*b*e*f - 2*a*c*d*f + a*c*e*e + b*b*d*f - b*c*d*e + c*c*d*d
    c2 = (-4*a*a*c*e - 2*a*a*f*f + a*b*b*e + 4*a*b*c*d - 4*a*c*d*f + 2*a*c*e*e - b*b*b*d
          + 2*b*b*d*f - 4*b*c*d*e - 4*b*d*f*f + b*e*e*f + 6*c*c*d*d + 4*c*d*e*f - c*e*e*e)
    c1 = (4*a*a*a*c - a*a*b*b + 2*a*a*b*f - 4*a*a*c*e + 10*a*b*c*d - a*b*e*f - 4*a*c*d*f
          + 5*a*c*e*e + 2*a*e*f*f - 2*b*b*b*d + 5*b*b*d*f - b*b*e*e - 7*b*c*d*e - 4*b*d*f*f
          + 12*c*c*d*d + 10*c*d*e*f - 2*c*e*e*e + 4*d*f*f*f - e*e*f*f)
    return c3, c2, c1


# --- sharper constant for bounded-height scans -------------------------------


def _local_gcd_exponent(P, Q, p: int, e: int, max_frontier: int) -> int:
    """Largest k <= e such that p^k divides both P(c) and Q(c) for some
    p-adic integer c.  P and Q are ascending coefficient lists in one chart
    variable.  Level 0 is brute force mod p; deeper levels lift each class
    c mod p^k by solving P(c)/p^k + t P'(c) = 0 mod p (linear because the
    quadratic term has valuation 2k > k)."""

    def ev(L, x):
        return (L[2] * x + L[1]) * x + L[0]

    def dv(L, x):
        return 2 * L[2] * x + L[1]

    frontier = [c for c in range(p) if ev(P, c) % p == 0 and ev(Q, c) % p == 0]
    return _lift_frontier(P, Q, p, e, frontier, ev, dv, max_frontier)


def _lift_frontier(P, Q, p, e, frontier, ev, dv, max_frontier):
    if not frontier:
        return 0
    k, mod = 1, p
    while k < e:
        nxt = []
        for c in frontier:
            sols = None  # None means every t
            for L in (P, Q):
                u = (ev(L, c) // mod) % p
                v = dv(L, c) % p
                if v == 0:
                    if u != 0:
                        sols = []
                        break
                    continue
                t = (-u * pow(v, -1, p)) % p
                if sols is None:
                    sols = [t]
                elif t not in sols:
                    sols = []
                    break
            if sols is None:
                sols = range(p)
            nxt.extend(c + t * mod for t in sols)
            if len(nxt) > max_frontier:
                return e
        if not nxt:
            return k
        frontier = nxt
        k += 1
        mod *= p
    return e


def local_gcd_bound(phi: QuadRatMap, max_prime: int = 10**5, max_frontier: int = 4096) -> dict[int, int]:
    """{p: k} such that gcd(F(a, b), G(a, b)) divides prod p^k for every
    coprime (a, b).  k never exceeds v_p(R); primes above ``max_prime`` keep
    the full exponent."""
    from sympy import factorint

    out = {}
    F, G = phi.F, phi.G
    for p, e in sorted(factorint(abs(phi.resultant)).items()):
        p, e = int(p), int(e)
        if p > max_prime:
            out[p] = e
            continue
        # chart b = 1: polynomials in a; chart a = 1, p | b: polynomials in b
        k0 = _local_gcd_exponent([F[2], F[1], F[0]], [G[2], G[1], G[0]], p, e, max_frontier)
        P1, Q1 = [F[0], F[1], F[2]], [G[0], G[1], G[2]]

        def ev(L, x):
            return (L[2] * x + L[1]) * x + L[0]

        def dv(L, x):
            return 2 * L[2] * x + L[1]

        start = [0] if ev(P1, 0) % p == 0 and ev(Q1, 0) % p == 0 else []
        k1 = _lift_frontier(P1, Q1, p, e, start, ev, dv, max_frontier)
        out[p] = max(k0, k1)
    return out


def sharp_constant(phi: QuadRatMap) -> tuple[float, int]:
    """(C#, G#) where G# bounds the gcd of the form values at coprime
    points and C# = log(G#/D) <= C.  Every preperiodic point has height at
    most C#, since h(phi(x)) >= 2 h(x) - C#."""
    hbd = height_bound_data(phi)
    gmax = 1
    for p, k in local_gcd_bound(phi).items():
        gmax *= p**k
    Cs = math.log(gmax) - math.log(hbd.D) + 1e-12 if gmax > 1 else -math.log(hbd.D) + 1e-12
    return min(Cs, hbd.C), gmax
