"""Quadratic rational maps through the normalized orbit
inf -> 1 -> 0 -> x3 -> x4 -> x5, and the search over such triples.

Every pair (x, phi) whose orbit of x has at least six distinct points is
conjugate to exactly one map of the shape

    phi(z) = (a1 z + a0)(z - 1) / (a1 z^2 + b1 z + b0),

with the point moved to infinity.  The triple (x3, x4, x5) determines the
coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from . import kernels
from .arith import INFINITY, DomainError, P1Point, as_fraction, lcm_denominators
from .dynamics import (
    OrbitRecord,
    QuadRatMap,
    apply_map,
    canonical_height,
    detect_orbit,
    height_bound_data,
    log_abs,
    moebius,
    refine_canonical_height,
    sigma_invariants,
)


class Degenerate:
    """Returned when the triple's map drops to degree below 2."""

    __slots__ = ("reason",)

    def __init__(self, reason: str = "resultant vanishes"):
        self.reason = reason

    def __bool__(self):
        return False

    def __repr__(self):
        return f"Degenerate({self.reason!r})"


@dataclass(frozen=True, order=True)
class TripleParam:
    x3: Fraction
    x4: Fraction
    x5: Fraction

    def __post_init__(self):
        vals = []
        for name in ("x3", "x4", "x5"):
            v = as_fraction(getattr(self, name))
            object.__setattr__(self, name, v)
            vals.append(v)
        pts = [Fraction(0), Fraction(1)] + vals
        if len(set(pts)) != 5:
            raise DomainError("0, 1, x3, x4, x5 must be pairwise distinct")

    @classmethod
    def of(cls, x3, x4, x5) -> "TripleParam":
        return cls(as_fraction(x3), as_fraction(x4), as_fraction(x5))

    def heights(self) -> tuple[int, int, int]:
        return tuple(max(abs(v.numerator), v.denominator) for v in (self.x3, self.x4, self.x5))

    def sort_key(self):
        return (self.heights(), (self.x3, self.x4, self.x5))

    def __str__(self):
        return f"({self.x3}, {self.x4}, {self.x5})"


def triple_coefficients(t: TripleParam) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """(a1, a0, b1, b0) as rational functions of the triple."""
    x3, x4, x5 = t.x3, t.x4, t.x5
    a1 = x4 * (x3**2 * x4 - x3**2 * x5 - x3**2 + 2 * x3 * x5 - x4 * x5)
    a0 = x3**2 * x4 * (x4 - 1) * (x5 - x4 + x4 * x5 - x3 * x5)
    b0 = -a0 / x3
    b1 = (
        x3**2 * x4**2 * x5 - x3**3 * x4**2 + 2 * x3**3 * x4 - x3**2 * x4**2 + x4**3 * x5
        - x3**2 * x4 * x5 - x3 * x4**2 * x5 - x3**3 + x3 * x4**2 - x4**3 + x3**2 * x5
        + x3**2 - x3 * x4 + x4**2 - x3 * x5
    )
    return a1, a0, b1, b0


def forms_from_coefficients(a1, a0, b1, b0) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Integer forms F = (a1, a0 - a1, -a0), G = (a1, b1, b0) with
    denominators cleared (not content-reduced)."""
    vals = [as_fraction(v) for v in (a1, a0, b1, b0)]
    L = lcm_denominators(vals)
    a1, a0, b1, b0 = (int(v * L) for v in vals)
    return (a1, a0 - a1, -a0), (a1, b1, b0)


def construct_map(t: TripleParam) -> QuadRatMap | Degenerate:
    if not isinstance(t, TripleParam):
        raise DomainError("expected a TripleParam")
    F, G = forms_from_coefficients(*triple_coefficients(t))
    try:
        return QuadRatMap(F, G)
    except DomainError:
        return Degenerate()


def x42_fifth(x3, x4) -> Fraction | None:
    """x5 on the (4,2) chart, or None off it.

    The (4,2) chart is the surface of triples whose map sends x5 back to x4,
    so infinity has tail 4 and period 2.  It is parametrized by (x3, x4)."""
    x3, x4 = as_fraction(x3), as_fraction(x4)
    den = x3 * x3 - 2 * x3 + x4
    if den == 0:
        return None
    return (x4 - x3) / den


def on_X42(t: TripleParam) -> bool:
    v = x42_fifth(t.x3, t.x4)
    return v is not None and v == t.x5


def x42_raw_resultant(x3, x4) -> Fraction:
    """Resultant of the map on the (4,2) chart, with only the x5 denominator cleared."""
    x3, x4 = as_fraction(x3), as_fraction(x4)
    x5 = x42_fifth(x3, x4)
    if x5 is None:
        raise DomainError("(x3, x4) is off the (4,2) chart")
    # direct substitution, skipping TripleParam validation so that
    # degenerate chart points still evaluate
    x5d = x3 * x3 - 2 * x3 + x4
    a1 = x4 * (x3**2 * x4 - x3**2 * x5 - x3**2 + 2 * x3 * x5 - x4 * x5) * x5d
    a0 = x3**2 * x4 * (x4 - 1) * (x5 - x4 + x4 * x5 - x3 * x5) * x5d
    b0 = -a0 / x3
    b1 = (
        x3**2 * x4**2 * x5 - x3**3 * x4**2 + 2 * x3**3 * x4 - x3**2 * x4**2 + x4**3 * x5
        - x3**2 * x4 * x5 - x3 * x4**2 * x5 - x3**3 + x3 * x4**2 - x4**3 + x3**2 * x5
        + x3**2 - x3 * x4 + x4**2 - x3 * x5
    ) * x5d
    f2, f1, f0 = a1, a0 - a1, -a0
    g2, g1, g0 = a1, b1, b0
    return (f2 * g0 - f0 * g2) ** 2 - (f2 * g1 - f1 * g2) * (f1 * g0 - f0 * g1)


def x42_resultant_factored(x3, x4) -> Fraction:
    """The product x3^2 x4^2 (x3-x4)(x3-1)^8 (x4-1)^2 (x3^2-2x3+x4)(x3x4-x3+x4)^5."""
    x3, x4 = as_fraction(x3), as_fraction(x4)
    if x4 == 1 or x3 == 1 or x3 == 0 or x4 == 0 or x3 == x4:
        raise DomainError("x3, x4 must avoid 0, 1 and each other")
    return (
        x3**2 * x4**2 * (x3 - x4) * (x3 - 1) ** 8 * (x4 - 1) ** 2
        * (x3 * x3 - 2 * x3 + x4) * (x3 * x4 - x3 + x4) ** 5
    )


# the two sides agree exactly with this constant (fixed by one evaluation)
X42_RESULTANT_CONSTANT = 1


def x42_identity_holds(x3, x4) -> bool:
    return x42_raw_resultant(x3, x4) == X42_RESULTANT_CONSTANT * x42_resultant_factored(x3, x4)


def normalizer(y0: P1Point, y1: P1Point, y2: P1Point):
    """Moebius matrix sending y0, y1, y2 to inf, 1, 0."""
    (p0, q0), (p1, q1), (p2, q2) = y0.pair(), y1.pair(), y2.pair()
    k1 = p1 * q0 - p0 * q1
    k2 = p1 * q2 - p2 * q1
    if k1 == 0 or k2 == 0 or p0 * q2 == p2 * q0:
        raise DomainError("normalizer needs three distinct points")
    return ((k1 * q2, -k1 * p2), (k2 * q0, -k2 * p0))


def normalize_pair(phi: QuadRatMap, y: P1Point) -> TripleParam | Degenerate:
    """The triple of (y, phi): conjugate so that y, phi(y), phi^2(y) go to inf, 1, 0."""
    orbit = [P1Point.from_value(y)]
    for _ in range(5):
        orbit.append(apply_map(phi, orbit[-1]))
    if len(set(orbit)) < 6:
        return Degenerate("orbit has fewer than six distinct points")
    eta = normalizer(*orbit[:3])
    vals = [moebius(eta, p) for p in orbit[3:6]]
    if any(v.is_infinity for v in vals):
        return Degenerate("normalized orbit hits infinity")
    try:
        return TripleParam(*(v.to_fraction() for v in vals))
    except DomainError:
        return Degenerate("normalized coordinates collide")


@dataclass(frozen=True)
class RatSearchConfig:
    height_bound: float
    ratio_threshold: float = 0.002
    screen_iterates: tuple = (8, 10)
    estimate_iterate: int = 15
    preperiodic_horizon: int = 10
    post_horizon: int = 20
    margin: float = 1e-9

    def __post_init__(self):
        if not self.height_bound > 0:
            raise DomainError("height bound must be positive")
        if not self.ratio_threshold > 0:
            raise DomainError("ratio threshold must be positive")
        if tuple(self.screen_iterates) != (8, 10) or self.preperiodic_horizon != 10:
            raise DomainError("the compiled screen is fixed to iterates 6..10 with checks at 8 and 10")

    @property
    def max_height(self) -> int:
        return height_to_int_bound(self.height_bound)


def height_to_int_bound(B: float) -> int:
    """Largest integer H with log H <= B, tolerant to rounding in B."""
    H = int(math.floor(math.exp(B)))
    if abs(math.exp(B) - round(math.exp(B))) < 1e-9 * max(1.0, math.exp(B)):
        H = int(round(math.exp(B)))
    return max(H, 1)


def rationals_up_to(H: int) -> list[Fraction]:
    """All rationals other than 0 and 1 with max(|num|, den) <= H, ordered by
    that height and then by value."""
    out = []
    for q in range(1, H + 1):
        for p in range(-H, H + 1):
            if math.gcd(p, q) == 1 and not (p == 0 or (p == 1 and q == 1)):
                out.append(Fraction(p, q))
    out.sort(key=lambda v: (max(abs(v.numerator), v.denominator), v))
    return out


@dataclass(frozen=True)
class RatRecord:
    triple: TripleParam
    F: tuple
    G: tuple
    kind: str  # "preperiodic" or "small-height"
    estimate: float
    canonical_height: float
    ratio: float
    map_height: float
    tail: int | None = None
    period: int | None = None
    error: float = 0.0

    @property
    def map(self) -> QuadRatMap:
        return QuadRatMap(self.F, self.G)

    @property
    def moduli_label(self) -> tuple[int, int] | None:
        if self.tail is None:
            return None
        return (self.tail, self.period)

    def sort_key(self):
        return self.triple.sort_key()


def _height_pair(a, b) -> float:
    return log_abs(max(abs(a), abs(b)))


def examine_triple(t: TripleParam, cfg: RatSearchConfig, screened: bool = False) -> RatRecord | None:
    """Exact version of the whole per-triple procedure.  ``screened`` skips
    the degeneracy and (4,2)-chart checks already done by the screen."""
    phi = construct_map(t)
    if not phi:
        return None
    if not screened and on_X42(t):
        return None
    hphi = sigma_invariants(phi).map_height
    orbit = detect_orbit(phi, INFINITY, cfg.preperiodic_horizon)
    if orbit.resolved:
        return _preperiodic_record(t, phi, orbit, hphi)
    r = cfg.ratio_threshold
    hbd = height_bound_data(phi)
    C = hbd.C
    for i in cfg.screen_iterates:
        p = orbit.iterates[i]
        if _height_pair(p.a, p.b) >= math.ldexp(r * hphi, i) + C:
            return None
    # repeats past the screen horizon show up as a zero estimate, since
    # every preperiodic point has height at most C
    estimate, _ = canonical_height(phi, INFINITY, cfg.estimate_iterate, hbd)
    if estimate == 0.0:
        return _late_preperiodic(t, phi, hbd, hphi, cfg)
    if estimate >= r * hphi + math.ldexp(C, -cfg.estimate_iterate):
        return None
    ref = refine_canonical_height(phi, INFINITY, max_iters=max(cfg.post_horizon, 40), hbd=hbd)
    if ref.preperiodic:
        return _late_preperiodic(t, phi, hbd, hphi, cfg)
    return RatRecord(t, phi.F, phi.G, "small-height", estimate, ref.estimate, ref.estimate / hphi, hphi,
                     error=ref.error)


def _late_preperiodic(t, phi, hbd, hphi, cfg) -> RatRecord:
    # every point of a preperiodic orbit has height at most C, so this walk
    # stays cheap
    orbit = detect_orbit(phi, INFINITY, 64)
    if not orbit.resolved:
        raise AssertionError(f"orbit of {t} reported preperiodic but did not close")
    return _preperiodic_record(t, phi, orbit, hphi)


def _preperiodic_record(t, phi, orbit: OrbitRecord, hphi: float) -> RatRecord:
    return RatRecord(t, phi.F, phi.G, "preperiodic", 0.0, 0.0, 0.0, hphi, orbit.tail, orbit.period)


def search_x3(cfg: RatSearchConfig, x3: Fraction, rats: list[Fraction], backend=None) -> tuple[list[RatRecord], dict]:
    """All records with this x3 (one partition)."""
    impl = backend or kernels
    pairs = [(v.numerator, v.denominator) for v in rats]
    screened, stats = impl.rat_screen((x3.numerator, x3.denominator), pairs, cfg.ratio_threshold, cfg.margin)
    out = []
    for i4, i5, code in screened:
        t = TripleParam(x3, rats[i4], rats[i5])
        rec = examine_triple(t, cfg, screened=True)
        if rec is not None:
            out.append(rec)
    out.sort(key=RatRecord.sort_key)
    stats = dict(stats, records=len(out))
    return out, stats


def rat_search(cfg: RatSearchConfig, backend=None, x3_values=None) -> Iterator[RatRecord]:
    rats = rationals_up_to(cfg.max_height)
    for x3 in x3_values if x3_values is not None else rats:
        recs, _ = search_x3(cfg, as_fraction(x3), rats, backend)
        yield from recs


def min_ratio_records(records) -> list[RatRecord]:
    """Small-height records whose ratio cannot be told apart from the
    smallest one, in search order.

    A pair and its partner have the same canonical height and the same map
    height, so they tie exactly; the refined estimates then differ only by
    their error bounds."""
    small = [r for r in records if r.kind == "small-height"]
    if not small:
        return []
    lo = min(small, key=lambda r: r.ratio + r.error / r.map_height)
    cap = lo.ratio + lo.error / lo.map_height
    tied = [r for r in small if r.ratio - r.error / r.map_height <= cap]
    return sorted(tied, key=RatRecord.sort_key)


def min_ratio_record(records) -> RatRecord | None:
    tied = min_ratio_records(records)
    return tied[0] if tied else None


def partner_triple(t: TripleParam) -> TripleParam | Degenerate | None:
    """Triple of (y, phi) where y is the other preimage of phi(inf) = 1;
    None when infinity is critical."""
    from .moduli import preimage_partner

    phi = construct_map(t)
    if not phi:
        return Degenerate()
    y = preimage_partner(phi, INFINITY)
    if y is None:
        return None
    return normalize_pair(phi, y)


__all__ = [
    "Degenerate",
    "TripleParam",
    "RatSearchConfig",
    "RatRecord",
    "triple_coefficients",
    "construct_map",
    "x42_fifth",
    "on_X42",
    "x42_raw_resultant",
    "x42_resultant_factored",
    "x42_identity_holds",
    "X42_RESULTANT_CONSTANT",
    "normalizer",
    "normalize_pair",
    "height_to_int_bound",
    "rationals_up_to",
    "examine_triple",
    "search_x3",
    "rat_search",
    "partner_triple",
    "min_ratio_records",
    "min_ratio_record",
]
