"""The acceptance criteria, one test (and one report line) each.

Run with ``pytest tests/test_acceptance.py -v``; the per-criterion lines are
printed in the "acceptance criteria" section of the terminal summary."""

import math
import random
import time
from fractions import Fraction

import pytest

from quaddyn import known_values as kv
from quaddyn.arith import INFINITY, DomainError, P1Point
from quaddyn.dynamics import (
    QuadRatMap,
    apply_map,
    canonical_height,
    conjugate,
    detect_orbit,
    moebius,
    multiplier,
    refine_canonical_height,
    sigma_invariants,
)
from quaddyn.elliptic import EllipticSurface
from quaddyn.moduli import (
    classify_orbit,
    preimage_partner,
    preperiodic_closure,
    preperiodic_scan,
    x52_forward,
    x52_inverse,
    x52_membership,
)
from quaddyn.poly_search import PolySearchConfig, brute_force_preperiodic, poly_search
from quaddyn.rat_search import (
    RatSearchConfig,
    TripleParam,
    construct_map,
    min_ratio_record,
    min_ratio_records,
    rat_search,
    x42_fifth,
    x42_identity_holds,
)
from quaddyn.verify import random_map
from quaddyn.verify import run as run_verify

SEVEN = QuadRatMap(*kv.SEVEN_CYCLE_MAP)
PSI = QuadRatMap((10, -7, -3), (10, 37, 9))
T = TripleParam.of


def test_criterion_1_row_one_height(acceptance):
    start = time.perf_counter()
    ref = refine_canonical_height(QuadRatMap.polynomial(Fraction(-181, 144)), Fraction(7, 12))
    ratio = ref.estimate / math.log(181)
    elapsed = time.perf_counter() - start
    ok = abs(ref.estimate - 0.03433) <= 1e-4 and abs(ratio - 0.00660) <= 1e-4 and elapsed < 1.0
    acceptance(1, ok, f"height {ref.estimate:.5f}, ratio {ratio:.5f}, {elapsed:.3f} s")
    assert ok


def test_criterion_2_desk_poly_search(acceptance):
    start = time.perf_counter()
    recs = list(poly_search(PolySearchConfig(n_max=144, N_max=10, ratio_threshold=0.02)))
    elapsed = time.perf_counter() - start
    found = {(r.c, r.x): r for r in recs if r.kind == "small-height"}
    rows = [row for row in kv.SMALL_HEIGHT_POLY_PAIRS if row[0].denominator <= 144**2 and row[1].denominator <= 144]
    missing, off = [], []
    for c, x, hhat, ratio in rows:
        r = found.get((c, x))
        if r is None:
            missing.append((c, x))
        elif abs(r.ratio - ratio) > 1e-4 or abs(r.canonical_height - hhat) > 1e-4:
            off.append((c, x, r.ratio))
    ok = len(rows) == 13 and not missing and not off
    acceptance(2, ok, f"{len(rows) - len(missing) - len(off)}/{len(rows)} published rows with n <= 144 "
                      f"reproduced to 1e-4, {len(recs)} records, {elapsed:.1f} s")
    assert ok, (missing, off)


def test_criterion_3_seven_cycle(acceptance):
    start = time.perf_counter()
    orb = detect_orbit(SEVEN, INFINITY, 10)
    label_ok = orb.resolved and (orb.tail, orb.period) == (0, 7)
    cycle = [P1Point.from_value(v) for v in kv.SEVEN_CYCLE]
    partners = [preimage_partner(SEVEN, cycle[i - 1]) for i in range(7)]
    partners_ok = partners == [P1Point.from_value(v) for v in kv.SEVEN_CYCLE_PARTNER_PREIMAGES]
    found = preperiodic_scan(SEVEN, math.log(1000))
    scan_ok = len(found) == 14 and found == set(cycle) | set(partners)
    elapsed = time.perf_counter() - start
    ok = label_ok and partners_ok and scan_ok
    acceptance(3, ok, f"label ({orb.tail},{orb.period}), partners {'exact' if partners_ok else 'WRONG'}, "
                      f"{len(found)} points at log 1000, {elapsed:.2f} s")
    assert ok


@pytest.fixture(scope="module")
def length_eight_scans():
    start = time.perf_counter()
    out = []
    for F, G, _, tail, period in kv.LENGTH_EIGHT_ORBITS:
        phi = QuadRatMap(F, G)
        label = classify_orbit(detect_orbit(phi, INFINITY, 20))
        found = preperiodic_scan(phi, math.log(10**4))
        out.append((phi, (label.tail, label.period), (tail, period), found))
    return out, time.perf_counter() - start


def test_criterion_4_length_eight_maps(acceptance, length_eight_scans):
    scans, elapsed = length_eight_scans
    labels = [lab for _, lab, _, _ in scans]
    labels_ok = all(lab == want for _, lab, want, _ in scans)
    counts = [len(found) for *_, found in scans]
    short = [i + 1 for i, n in enumerate(counts) if n < 14]
    ok = labels_ok and labels.count((6, 2)) == 15 and labels.count((5, 3)) == 1 and not short and elapsed < 60
    acceptance(4, ok, f"labels {labels.count((6, 2))} x (6,2) + {labels.count((5, 3))} x (5,3); "
                      f"points at log 10^4: {counts}; rows {short} below 14 "
                      f"(their 14th point has height above 10^4); {elapsed:.1f} s")
    # the attainable parts must hold
    assert labels_ok and elapsed < 60
    for i, (phi, *_, found) in enumerate(scans):
        closure = preperiodic_closure(phi, [INFINITY])
        assert found == {p for p in closure if max(abs(p.a), p.b) <= 10**4}, i + 1
        if i + 1 not in (15, 16):
            assert len(found) >= 14, i + 1


@pytest.mark.xfail(strict=True, reason="rows 15 and 16 have exactly 13 preperiodic points of height <= 10^4")
def test_criterion_4_last_two_rows_at_the_stated_bound(length_eight_scans):
    scans, _ = length_eight_scans
    assert all(len(found) >= 14 for *_, found in scans[14:])


@pytest.mark.parametrize("row", [15, 16])
def test_criterion_4_last_two_rows_at_a_larger_bound(row):
    F, G, *_ = kv.LENGTH_EIGHT_ORBITS[row - 1]
    phi = QuadRatMap(F, G)
    found = preperiodic_scan(phi, math.log(2 * 10**4))
    assert len(found) == 14 == len(preperiodic_closure(phi, [INFINITY]))


def test_criterion_5_small_height_map(acceptance):
    start = time.perf_counter()
    ref = refine_canonical_height(PSI, INFINITY)
    ratio = ref.estimate / sigma_invariants(PSI).map_height
    elapsed = time.perf_counter() - start
    ok = abs(ref.estimate - 0.00360) <= 1e-4 and abs(ratio - 0.000466) <= 2e-5 and elapsed < 1.0
    acceptance(5, ok, f"height {ref.estimate:.5f}, ratio {ratio:.6f}, {elapsed:.3f} s")
    assert ok


def test_criterion_6_desk_rat_search(acceptance):
    start = time.perf_counter()
    recs = list(rat_search(RatSearchConfig(height_bound=math.log(20), ratio_threshold=0.002)))
    elapsed = time.perf_counter() - start
    best = min_ratio_record(recs)
    tied = [str(r.triple) for r in min_ratio_records(recs)]
    labels = {r.triple: r.moduli_label for r in recs if r.kind == "preperiodic"}
    ok = best is not None and best.triple == T("-1/3", "-1/5", "-3/5") and elapsed <= 3600
    acceptance(6, ok, f"minimum ratio {best.ratio:.7f} at {best.triple} (tied within error with {tied}); "
                      f"{len(recs)} records, {elapsed:.0f} s")
    assert ok
    assert labels.get(T(-3, "7/3", "-1/3")) == (6, 2)
    # the published small-height pairs that lie in range
    for triple, _, hhat, ratio in kv.SMALL_HEIGHT_RAT_PAIRS:
        t = TripleParam(*triple)
        if max(t.heights()) <= 20:
            r = next(r for r in recs if r.triple == t)
            assert abs(r.ratio - ratio) <= 2e-6, t


def test_criterion_7_elliptic_suite(acceptance):
    start = time.perf_counter()
    checks = run_verify("x52")  # [2..6]P exact, non-torsion at t = 1, [6]P gives (5,2) for 20 values of t
    rng = random.Random(7)
    roundtrips = 0
    while roundtrips < 100:
        t = Fraction(rng.randint(-30, 30), rng.randint(1, 30))
        try:
            E = EllipticSurface(t)
        except DomainError:
            continue
        Q = E.multiple(rng.choice([6, -6, 7, -7, 8]), E.base_point())
        if Q.is_infinity:
            continue
        inv = x52_inverse(t, Q.x, Q.y)
        if not inv:
            continue
        w, x3, x4 = inv
        fwd = x52_forward(x3, x4, w)
        if not fwd:
            continue
        assert fwd == (t, Q.x, Q.y) and x52_membership(x3, x4, w)
        roundtrips += 1
    elapsed = time.perf_counter() - start
    ok = all(p for _, p, _ in checks) and elapsed < 60
    acceptance(7, ok, f"{sum(p for _, p, _ in checks)}/{len(checks)} surface checks, "
                      f"{roundtrips} roundtrips, {elapsed:.1f} s")
    assert ok, [c for c in checks if not c[1]]


def test_criterion_8_property_suites(acceptance):
    rng = random.Random(8)
    results = {}

    sigma = run_verify("sigma")
    results["sigma identity (1000 maps)"] = all(p for _, p, _ in sigma)

    ok = True
    for _ in range(200):
        phi = random_map(rng, 12)
        e = [rng.randint(-4, 4) for _ in range(4)]
        if e[0] * e[3] == e[1] * e[2]:
            continue
        eta = ((e[0], e[1]), (e[2], e[3]))
        a, b = sigma_invariants(phi), sigma_invariants(conjugate(phi, eta))
        ok &= (a.sigma1, a.sigma2, a.sigma3) == (b.sigma1, b.sigma2, b.sigma3)
        psi = conjugate(SEVEN, eta)
        ok &= multiplier(psi, moebius(eta, INFINITY), 7) == multiplier(SEVEN, INFINITY, 7)
    results["conjugation invariance"] = ok

    ok = True
    for _ in range(300):
        phi = random_map(rng, 12)
        x = P1Point(rng.randint(-9, 9), rng.randint(1, 9))
        est, floor = canonical_height(phi, x, 12)
        ref = refine_canonical_height(phi, x, max_iters=24)
        ok &= floor <= est + 1e-12 or est == 0.0
        ok &= floor <= ref.estimate + ref.error + 1e-12
    results["floor <= estimate"] = ok

    cfg = PolySearchConfig(n_max=24, N_max=3)
    results["micro-range oracle"] = (
        {(r.x, r.c) for r in poly_search(cfg) if r.kind == "preperiodic"} == brute_force_preperiodic(24, 3)
    )

    ok, done = True, 0
    while done < 1000:
        vals = [Fraction(rng.randint(-40, 40), rng.randint(1, 40)) for _ in range(3)]
        try:
            t = TripleParam(*vals)
        except DomainError:
            continue
        phi = construct_map(t)
        if not phi:
            continue
        orbit = [INFINITY] + [P1Point.from_value(v) for v in (1, 0, t.x3, t.x4, t.x5)]
        ok &= all(apply_map(phi, a) == b for a, b in zip(orbit, orbit[1:]))
        done += 1
    results["six-point orbit contract (1000 triples)"] = ok

    ok, done = True, 0
    while done < 200:
        x3 = Fraction(rng.randint(-60, 60), rng.randint(1, 60))
        x4 = Fraction(rng.randint(-60, 60), rng.randint(1, 60))
        if x3 in (0, 1) or x4 in (0, 1) or x3 == x4 or x42_fifth(x3, x4) is None:
            continue
        ok &= x42_identity_holds(x3, x4)
        done += 1
    results["(4,2) resultant identity (200 points)"] = ok

    passed = all(results.values())
    acceptance(8, passed, "; ".join(f"{k} {'ok' if v else 'FAILED'}" for k, v in results.items()))
    assert passed, results
