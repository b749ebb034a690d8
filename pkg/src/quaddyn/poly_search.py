"""Exhaustive search over pairs (x, c) for the maps z^2 + c.

For a denominator n, candidate parameters are c = k/n^2 and candidate points
x = a/n.  A compiled screen discards points whose orbit closes within four
steps and points whose first three iterates pick up a denominator larger than
n; the survivors are iterated exactly here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from . import kernels
from .arith import DomainError, as_fraction, valuation
from .dynamics import (
    QuadRatMap,
    height_bound_data,
    log_abs,
    padic_height_floor,
    refine_canonical_height,
)

# Smallest height floor for a pair discarded by the denominator test: an
# iterate phi^i(x), i <= 3, with a prime p to a too-large power in its
# denominator forces canonical height >= min(log(3)/4, log(2)/2).
DENOMINATOR_FLOOR = min(math.log(3) / 4, math.log(2) / 2)


@dataclass(frozen=True)
class PolySearchConfig:
    n_max: int
    N_max: int = 10
    ratio_threshold: float = 0.02
    iterates_screen: int = 4
    iterates_estimate: int = 12
    allow_4_nmid_n: bool = False
    ratio_threshold_4_nmid_n: float = 0.03
    n_min: int = 1

    def __post_init__(self):
        if self.n_max < 1 or self.N_max < 1 or self.n_min < 1:
            raise DomainError("n_max, N_max and n_min must be at least 1")
        if self.ratio_threshold <= 0 or self.ratio_threshold_4_nmid_n <= 0:
            raise DomainError("ratio thresholds must be positive")
        if self.iterates_screen != 4:
            raise DomainError("the compiled screen uses exactly four iterates")
        if self.iterates_estimate < 5:
            raise DomainError("iterates_estimate must exceed the screen length")

    def threshold(self, n: int) -> float:
        if self.allow_4_nmid_n and n % 4 != 0:
            return self.ratio_threshold_4_nmid_n
        return self.ratio_threshold

    def denominator_prune_is_sound(self, n: int) -> bool:
        """True when every pair discarded by the denominator test has height
        ratio above this n's threshold, since h(c) <= log(N_max n^2)."""
        return DENOMINATOR_FLOOR / math.log(max(self.N_max * n * n, 2)) > self.threshold(n)


@dataclass(frozen=True)
class PolyRecord:
    m: int
    n: int
    k: int
    x: Fraction
    c: Fraction
    estimate: float
    canonical_height: float
    ratio: float
    kind: str  # "preperiodic" or "small-height"
    tail: int | None = None
    period: int | None = None
    error: float = 0.0

    def sort_key(self):
        return (self.n, self.m, self.k, self.x)


def admissible_k_values(m: int, n: int, N_max: int) -> Iterator[int]:
    """k with -N_max n^2 <= k < -3n^2/4, k = -m^2 mod n and
    gcd(n, (k + m^2)/n) = 1, in decreasing order.

    The gcd condition depends on m itself, not only on m mod n, so the
    search applies it per point rather than through this function."""
    if n < 1 or not 1 <= m <= n or math.gcd(m, n) != 1:
        raise DomainError("need 1 <= m <= n with gcd(m, n) = 1")
    n2 = n * n
    kmax = (-3 * n2 - 1) // 4
    k = kmax - ((kmax + m * m) % n)
    while k >= -N_max * n2:
        if math.gcd(n, (k + m * m) // n) == 1:
            yield k
        k -= n


def escape_radius_squared_test(x: Fraction, c: Fraction) -> bool:
    """x <= B = (1 + sqrt(1 - 4c))/2, decided exactly: (2x - 1)^2 <= 1 - 4c or 2x <= 1."""
    t = 2 * x - 1
    return t <= 0 or t * t <= 1 - 4 * c


def start_points(c, m: int, n: int) -> list[Fraction]:
    """Positive x = m/n mod 1 in the interval where preperiodic points of
    z^2 + c must lie: (0, 2] for c >= -2, else sqrt(-c - B) <= x <= B."""
    c = as_fraction(c)
    out = []
    x = Fraction(m, n)
    if c >= -2:
        while x <= 2:
            out.append(x)
            x += 1
        return out
    while escape_radius_squared_test(x, c):
        # x^2 >= -c - B  <=>  B >= -(x^2 + c) = W  <=>  2W - 1 <= sqrt(1 - 4c)
        u = 2 * -(x * x + c) - 1
        if u <= 0 or u * u <= 1 - 4 * c:
            out.append(x)
        x += 1
    return out


def denominator_height_floor(c, x, i: int) -> float:
    """Best height lower bound from a prime p with v_p(phi^i(x)) < min(0, v_p(c)/2)."""
    c = as_fraction(c)
    y = as_fraction(x)
    for _ in range(i):
        y = y * y + c
    best = 0.0
    from sympy import factorint

    for p in factorint(y.denominator):
        vy = valuation(y, p)
        vc = valuation(c, p)
        if vy < min(0, vc / 2):
            best = max(best, padic_height_floor(c, int(p), i))
    return best


def preperiodic_necessary_conditions(x, c) -> bool:
    """Necessary conditions on (x, c) for x to be preperiodic: c = k/n^2 with
    n the denominator of x, k = -m^2 mod n, gcd(n, (k + m^2)/n) = 1 and
    k <= n^2/4."""
    x, c = as_fraction(x), as_fraction(c)
    m, n = x.numerator, x.denominator
    if c.denominator != n * n and not (n == 1 and c.denominator == 1):
        return False
    k = c.numerator * (n * n // c.denominator)
    return (k + m * m) % n == 0 and math.gcd(n, (k + m * m) // n) == 1 and 4 * k <= n * n


def _orbit(x: Fraction, c: Fraction, steps: int):
    """Iterates 0..steps of z^2 + c with the first repeat, if any."""
    pts = [x]
    seen = {x: 0}
    for i in range(1, steps + 1):
        y = pts[-1] * pts[-1] + c
        if y in seen:
            j = seen[y]
            return pts, j, i - j
        seen[y] = i
        pts.append(y)
    return pts, None, None


def _examine(cfg: PolySearchConfig, n: int, m: int, k: int, a: int) -> PolyRecord | None:
    x = Fraction(a, n)
    c = Fraction(k, n * n)
    if not preperiodic_necessary_conditions(x, c):
        raise AssertionError(f"screen emitted ({x}, {c}) violating the necessary conditions")
    steps = cfg.iterates_estimate
    pts, tail, period = _orbit(x, c, steps)
    if tail is not None:
        return PolyRecord(m, n, k, x, c, 0.0, 0.0, 0.0, "preperiodic", tail, period)
    last = pts[steps]
    estimate = math.ldexp(log_abs(max(abs(last.numerator), last.denominator)), -steps)
    hc = log_abs(max(abs(k), n * n))
    if estimate >= cfg.threshold(n) * hc:
        return None
    phi = QuadRatMap.polynomial(c)
    ref = refine_canonical_height(phi, x)
    if ref.preperiodic:
        return PolyRecord(m, n, k, x, c, estimate, 0.0, 0.0, "preperiodic", None, None)
    return PolyRecord(m, n, k, x, c, estimate, ref.estimate, ref.estimate / hc, "small-height", error=ref.error)


def search_denominator(cfg: PolySearchConfig, n: int, backend=None) -> tuple[list[PolyRecord], dict]:
    """All records for one denominator n (one partition)."""
    impl = backend or kernels
    prune = cfg.denominator_prune_is_sound(n)
    survivors, stats = impl.poly_screen(n, cfg.N_max, prune)
    out = []
    for m, k, a in survivors:
        rec = _examine(cfg, n, m, k, a)
        if rec is not None:
            out.append(rec)
    out.sort(key=PolyRecord.sort_key)
    stats = dict(stats, den_prune=prune, records=len(out))
    return out, stats


def poly_search(cfg: PolySearchConfig, backend=None) -> Iterator[PolyRecord]:
    """Records in (n, m, k, x) order."""
    for n in range(cfg.n_min, cfg.n_max + 1):
        recs, _ = search_denominator(cfg, n, backend)
        yield from recs


def brute_force_preperiodic(n_max: int, N_max: int, steps: int = 30, x_max: int = 4) -> set[tuple[Fraction, Fraction]]:
    """Oracle: every (x, c) with c = k/n^2, -N_max n^2 <= k < -3n^2/4 and
    positive x of denominator exactly n, x <= x_max, whose orbit closes
    within ``steps`` iterates with more than four distinct points.  No
    denominator-based filtering; an orbit is only abandoned once an iterate
    has height above the comparison constant C of the map, after which the
    heights increase forever."""
    found = set()
    for n in range(1, n_max + 1):
        n2 = n * n
        for k in range(-N_max * n2, (-3 * n2 - 1) // 4 + 1):
            c = Fraction(k, n2)
            C = height_bound_data(QuadRatMap.polynomial(c)).C
            for a in range(1, x_max * n + 1):
                if math.gcd(a, n) != 1:
                    continue
                x = Fraction(a, n)
                label = _bounded_orbit(x, c, C, steps)
                if label is not None and sum(label) > 4:
                    found.add((x, c))
    return found


def _bounded_orbit(x: Fraction, c: Fraction, C: float, steps: int) -> tuple[int, int] | None:
    seen = {x: 0}
    y = x
    for i in range(1, steps + 1):
        y = y * y + c
        if y in seen:
            return seen[y], i - seen[y]
        if log_abs(max(abs(y.numerator), y.denominator)) > C + 1e-9:
            return None
        seen[y] = i
    return None


__all__ = [
    "PolySearchConfig",
    "PolyRecord",
    "admissible_k_values",
    "start_points",
    "denominator_height_floor",
    "preperiodic_necessary_conditions",
    "poly_search",
    "search_denominator",
    "brute_force_preperiodic",
]
