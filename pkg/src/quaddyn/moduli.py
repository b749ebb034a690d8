"""Preperiodic-orbit bookkeeping: orbit labels, preimage partners, bounded
scans for rational preperiodic points, and the birational model of the
surface of pairs with tail 5 and period 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import kernels
from .arith import INFINITY, DomainError, P1Point, PreconditionError, as_fraction
from .dynamics import (
    OrbitRecord,
    QuadRatMap,
    apply_map,
    detect_orbit,
    moebius,
    sharp_constant,
    local_gcd_bound,
    step_pair,
)
from .elliptic import CurvePoint, EllipticSurface
from .rat_search import (
    Degenerate,
    TripleParam,
    construct_map,
    height_to_int_bound,
    normalize_pair,
    normalizer,
    x42_fifth,
)


@dataclass(frozen=True, order=True)
class ModuliLabel:
    tail: int
    period: int

    def __post_init__(self):
        if self.tail < 0 or self.period < 1:
            raise DomainError("need tail >= 0 and period >= 1")

    @property
    def length(self) -> int:
        return self.tail + self.period

    @property
    def in_surface_family(self) -> bool:
        """Orbit long enough (at least six points) to define a surface of pairs."""
        return self.length >= 6

    def __str__(self):
        return f"({self.tail},{self.period})"


def classify_orbit(rec: OrbitRecord) -> ModuliLabel:
    if not rec.resolved:
        raise PreconditionError("orbit did not close; no label")
    return ModuliLabel(rec.tail, rec.period)


def preimage_partner(phi: QuadRatMap, x) -> P1Point | None:
    """The other root of phi(y) = phi(x), or None when x is critical."""
    x = P1Point.from_value(x)
    u, v = apply_map(phi, x).pair()
    # v F(a, b) - u G(a, b) vanishes at x; its second root is the partner
    q2, q1, q0 = (v * f - u * g for f, g in zip(phi.F, phi.G))
    a0, b0 = x.pair()
    if a0 == 0:
        y = P1Point(-q1, q2)
    elif b0 == 0:
        y = P1Point(q0, -q1)
    else:
        y = P1Point(q0 * b0, q2 * a0)
    return None if y == x else y


# --- bounded scans ------------------------------------------------------------

_I62 = 1 << 62


def _compiled_scan_ok(phi: QuadRatMap, MC: int, primes) -> bool:
    if any(abs(c) >= _I62 for c in phi.F + phi.G) or MC >= _I62:
        return False
    return len(primes) <= 64 and all(p < _I62 and p**e < (1 << 126) for p, e in primes)


def preperiodic_scan(phi: QuadRatMap, height_bound: float, max_iter: int = 50, backend=None,
                     stats: dict | None = None) -> set[P1Point]:
    """Every x with h(x) <= height_bound whose orbit closes within max_iter steps.

    Points above exp(C#) are skipped outright: h(phi(x)) >= 2h(x) - C# means
    their heights grow forever."""
    H = height_to_int_bound(height_bound)
    Cs, _ = sharp_constant(phi)
    MC = int(math.floor(math.exp(min(Cs, 600.0)))) + 1
    primes = [(p, e) for p, e in local_gcd_bound(phi).items() if e > 0]
    Hs = min(H, MC)
    impl = backend or kernels
    if impl.BACKEND == "compiled" and not _compiled_scan_ok(phi, MC, primes):
        impl = kernels.get_backend("python")
    found, undecided, st = impl.preper_scan(phi.F, phi.G, Hs, MC, primes, max_iter)
    out = {P1Point(a, b) for a, b in found}
    for a, b in undecided:
        if _closes(phi, a, b, MC, max_iter):
            out.add(P1Point(a, b))
    if stats is not None:
        stats.update(st, scanned_height=Hs, sharp_constant=Cs, backend=impl.BACKEND)
    return out


def _closes(phi, a, b, MC, max_iter) -> bool:
    seen = {(a, b)}
    for _ in range(max_iter):
        a, b = step_pair(phi.F, phi.G, a, b)
        if max(abs(a), abs(b)) > MC:
            return False
        if (a, b) in seen:
            return True
        seen.add((a, b))
    return False


def preperiodic_closure(phi: QuadRatMap, seeds, max_iter: int = 64) -> set[P1Point]:
    """Preperiodic points reachable from ``seeds`` by forward orbits and
    rational preimages.  Independent of any height bound."""
    from sympy import Poly, Symbol, Rational, roots

    z = Symbol("z")
    out: set[P1Point] = set()
    todo = []
    for s in seeds:
        orb = detect_orbit(phi, s, max_iter)
        if not orb.resolved:
            raise DomainError(f"{s} is not preperiodic within {max_iter} steps")
        todo.extend(orb.iterates)
    while todo:
        y = todo.pop()
        if y in out:
            continue
        out.add(y)
        u, v = y.pair()
        coeffs = [v * f - u * g for f, g in zip(phi.F, phi.G)]
        if coeffs[0] == 0:
            todo.append(INFINITY)
        poly = Poly([Rational(c) for c in coeffs], z)
        if poly.degree() > 0:
            for r in roots(poly, filter="Q"):
                todo.append(P1Point.from_value(Fraction(int(r.p), int(r.q))))
    return out


# --- the (5,2) surface --------------------------------------------------------


def _num(v):
    return v if hasattr(v, "numer") and not isinstance(v, Fraction) else as_fraction(v)


def x52_polynomial(x3, x4, w):
    """Denominator of psi(w), where psi is the map with orbit inf, 1, 0, x3, x4, x5, x4."""
    x3, x4, w = _num(x3), _num(x4), _num(w)
    return (
        w * (1 - x4) * x3**3 + (1 - w) * x3 * x4**2 + w * (x4 * w + x4 - 2) * x3**2
        - (2 * w * w - 2 * w + 1) * x3 * x4 + w * x3 + (w * w - w) * x4**2
    )


def x52_membership(x3, x4, w) -> bool:
    return x52_polynomial(x3, x4, w) == 0


def x52_forward(x3, x4, w):
    """(x3, x4, w) -> (t, x, y) on E, or Degenerate."""
    x3, x4, w = _num(x3), _num(x4), _num(w)
    if x3 == 0 or x3 == 1:
        return Degenerate("x3 in {0, 1}")
    d, e = w - x3, w - 1
    t = d / (x3 - 1)
    x = d * d * e / (x3 * (x3 - 1) ** 3)
    y = d * d * e / (x3 * x3 * (x3 - 1) ** 5) * (d * e * (2 * x4 + x3 * x3) - x3 * (d * d + e * e))
    return t, x, y


def x52_inverse(t, x, y):
    """(t, x, y) on E -> (w, x3, x4), or Degenerate."""
    t, x, y = _num(t), _num(x), _num(y)
    if x == 0:
        return Degenerate("x = 0")
    s = t + 1
    w = t / x * (t * s * s - x)
    x3 = t * t * s / x
    x4 = t / (2 * x * x) * (y + (2 * t * t + 2 * t + 1) * x - t**3 * s * s)
    return w, x3, x4


def x52_coordinates(phi: QuadRatMap, x) -> tuple[Fraction, Fraction, Fraction] | Degenerate:
    """(x3, x4, w) of a pair (x, phi) of label (5,2): conjugate so that
    phi(x), phi^2(x), phi^3(x) sit at inf, 1, 0; w is the image of x."""
    x = P1Point.from_value(x)
    orb = detect_orbit(phi, x, 8)
    if not orb.resolved or (orb.tail, orb.period) != (5, 2):
        return Degenerate("pair is not of label (5,2)")
    pts = orb.iterates
    eta = normalizer(pts[1], pts[2], pts[3])
    vals = [moebius(eta, p) for p in (pts[4], pts[5], pts[0])]
    if any(v.is_infinity for v in vals):
        return Degenerate("normalized orbit hits infinity")
    return tuple(v.to_fraction() for v in vals)


@dataclass(frozen=True)
class X52Witness:
    t: Fraction
    multiple: int
    point: CurvePoint
    w: Fraction
    triple: TripleParam  # (x3, x4, x5) of the map psi with orbit inf, 1, 0, x3, x4, x5, x4
    orbit: OrbitRecord  # orbit of w under psi

    @property
    def label(self) -> ModuliLabel:
        return classify_orbit(self.orbit)

    @property
    def map(self) -> QuadRatMap:
        return construct_map(self.triple)

    def normalized_triple(self) -> TripleParam | Degenerate:
        """Triple of the pair (w, psi) itself."""
        return normalize_pair(self.map, P1Point.from_value(self.w))


def x52_point_from_multiple(n: int, t) -> X52Witness | Degenerate:
    t = as_fraction(t)
    try:
        E = EllipticSurface(t)
    except DomainError as exc:
        return Degenerate(str(exc))
    Q = E.multiple(n, E.base_point())
    if Q.is_infinity:
        return Degenerate("multiple is the identity")
    inv = x52_inverse(t, Q.x, Q.y)
    if not inv:
        return inv
    w, x3, x4 = inv
    if x3 in (0, 1) or x4 in (0, 1) or x3 == x4:
        return Degenerate("x3, x4 collide with 0, 1 or each other")
    x5 = x42_fifth(x3, x4)
    if x5 is None:
        return Degenerate("off the (4,2) chart")
    try:
        triple = TripleParam(x3, x4, x5)
    except DomainError:
        return Degenerate("triple coordinates collide")
    psi = construct_map(triple)
    if not psi:
        return Degenerate("map degenerates")
    orbit = detect_orbit(psi, P1Point.from_value(w), 10)
    if not orbit.resolved or (orbit.tail, orbit.period) != (5, 2):
        return Degenerate("w does not give a (5,2) orbit")
    return X52Witness(t, n, Q, w, triple, orbit)


__all__ = [
    "ModuliLabel",
    "classify_orbit",
    "preimage_partner",
    "preperiodic_scan",
    "preperiodic_closure",
    "x52_polynomial",
    "x52_membership",
    "x52_forward",
    "x52_inverse",
    "x52_coordinates",
    "X52Witness",
    "x52_point_from_multiple",
]
