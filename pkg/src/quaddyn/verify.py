"""Checks behind ``quaddyn verify``.  Each target yields (check, passed, detail)."""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Iterator

from . import known_values as kv
from .arith import INFINITY, P1Point
from .dynamics import (
    QuadRatMap,
    detect_orbit,
    refine_canonical_height,
    sigma_invariants,
)

Check = tuple[str, bool, str]


def _seven_cycle() -> Iterator[Check]:
    from .moduli import classify_orbit, preimage_partner, preperiodic_scan

    phi = QuadRatMap(*kv.SEVEN_CYCLE_MAP)
    orb = detect_orbit(phi, INFINITY, 20)
    label = classify_orbit(orb)
    yield "orbit of inf is a 7-cycle", (label.tail, label.period) == (0, 7), f"label {label}"
    cycle = [P1Point.from_value(v) for v in kv.SEVEN_CYCLE]
    yield "cycle points in order", list(orb.iterates[:7]) == cycle, " ".join(str(p) for p in orb.iterates[:7])
    # the listed preimage of cycle[i] is the partner of cycle[i - 1]
    partners = [preimage_partner(phi, cycle[i - 1]) for i in range(7)]
    expected = [P1Point.from_value(v) for v in kv.SEVEN_CYCLE_PARTNER_PREIMAGES]
    yield "preimage partners", partners == expected, " ".join(str(p) for p in partners)
    found = preperiodic_scan(phi, math.log(1000))
    yield "scan at log 1000", found == set(cycle) | set(expected), f"{len(found)} points"


def _tables() -> Iterator[Check]:
    from .moduli import classify_orbit, preperiodic_closure, preperiodic_scan

    for c, x, hhat, ratio in kv.SMALL_HEIGHT_POLY_PAIRS:
        phi = QuadRatMap.polynomial(c)
        est = refine_canonical_height(phi, x)
        hc = math.log(max(abs(c.numerator), c.denominator))
        ok = abs(est.estimate - hhat) <= 1e-4 and abs(est.estimate / hc - ratio) <= 1e-4
        yield f"z^2 + {c} at {x}", ok, f"height {est.estimate:.5f} ratio {est.estimate / hc:.5f}"
    for i, (F, G, _, tail, period) in enumerate(kv.LENGTH_EIGHT_ORBITS, 1):
        phi = QuadRatMap(F, G)
        label = classify_orbit(detect_orbit(phi, INFINITY, 20))
        yield f"length-8 map {i} label", (label.tail, label.period) == (tail, period), f"label {label}"
        bound = math.log(10**4)
        found = preperiodic_scan(phi, bound)
        closure = {p for p in preperiodic_closure(phi, [INFINITY]) if max(abs(p.a), p.b) <= 10**4}
        yield (f"length-8 map {i} scan", found == closure,
               f"{len(found)} preperiodic points of height <= log 10^4, {len(closure)} reachable from the orbit")
    for triple, (F, G), hhat, ratio in kv.SMALL_HEIGHT_RAT_PAIRS[:1]:
        phi = QuadRatMap(F, G)
        est = refine_canonical_height(phi, INFINITY)
        r = est.estimate / sigma_invariants(phi).map_height
        ok = abs(est.estimate - hhat) <= 1e-4 and abs(r - ratio) <= 2e-5
        yield f"({phi}) at inf", ok, f"height {est.estimate:.5f} ratio {r:.6f}"


def _x42(samples: int = 200, seed: int = 42) -> Iterator[Check]:
    from .dynamics import apply_map
    from .rat_search import (
        TripleParam,
        construct_map,
        on_X42,
        x42_fifth,
        x42_identity_holds,
    )

    rng = random.Random(seed)
    done = bad = 0
    while done < samples:
        x3 = Fraction(rng.randint(-50, 50), rng.randint(1, 50))
        x4 = Fraction(rng.randint(-50, 50), rng.randint(1, 50))
        if x3 in (0, 1) or x4 in (0, 1) or x3 == x4 or x42_fifth(x3, x4) is None:
            continue
        done += 1
        bad += not x42_identity_holds(x3, x4)
    yield "resultant factorization on the chart", bad == 0, f"{samples} points, {bad} mismatches"
    t = TripleParam.of(3, 2, Fraction(-1, 5))
    phi = construct_map(t)
    yield "chart point satisfies phi(x5) = x4", on_X42(t) and apply_map(phi, P1Point.from_value(t.x5)) == P1Point.from_value(t.x4), str(t)


def _x52(samples: int = 20, seed: int = 52) -> Iterator[Check]:
    import sympy

    from .elliptic import EllipticSurface, T, as_sympy
    from .moduli import classify_orbit, x52_point_from_multiple

    E = EllipticSurface()
    P = E.base_point()
    for n, (xs, ys) in kv.BASE_POINT_MULTIPLES.items():
        Q = E.multiple(n, P)
        ok = sympy.simplify(as_sympy(Q.x) - sympy.sympify(xs, locals={"t": T})) == 0 and \
            sympy.simplify(as_sympy(Q.y) - sympy.sympify(ys, locals={"t": T})) == 0
        yield f"[{n}]P", ok, f"({sympy.factor(as_sympy(Q.x))}, {sympy.factor(as_sympy(Q.y))})"
    E1 = EllipticSurface(1)
    P1 = E1.base_point()
    orders = [k for k in range(1, 21) if E1.multiple(k, P1).is_infinity]
    yield "[k]P nonzero at t = 1 for k <= 20", not orders, "no torsion relation" if not orders else f"vanishes at {orders}"
    rng = random.Random(seed)
    ok_count = tried = 0
    while tried < samples:
        t = Fraction(rng.randint(-40, 40), rng.randint(1, 40))
        w = x52_point_from_multiple(6, t)
        if not w:
            continue
        tried += 1
        ok_count += (classify_orbit(w.orbit).tail, classify_orbit(w.orbit).period) == (5, 2)
    yield "[6]P gives a (5,2) orbit", ok_count == samples, f"{ok_count}/{samples} values of t"


def random_map(rng: random.Random, bound: int = 30) -> QuadRatMap:
    from .arith import DomainError

    while True:
        F = [rng.randint(-bound, bound) for _ in range(3)]
        G = [rng.randint(-bound, bound) for _ in range(3)]
        try:
            return QuadRatMap(F, G)
        except DomainError:
            continue


def _sigma(samples: int = 1000, seed: int = 3) -> Iterator[Check]:
    rng = random.Random(seed)
    bad = 0
    for _ in range(samples):
        s = sigma_invariants(random_map(rng))
        bad += s.sigma3 != s.sigma1 - 2
    yield "sigma3 = sigma1 - 2", bad == 0, f"{samples} random maps, {bad} failures"


TARGETS = {"seven-cycle": _seven_cycle, "tables": _tables, "x42": _x42, "x52": _x52, "sigma": _sigma}


def run(target: str) -> list[Check]:
    return list(TARGETS[target]())
