import math
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import assume, given
from hypothesis import strategies as st

from quaddyn import kernels
from quaddyn import known_values as kv
from quaddyn.arith import INFINITY, DomainError, P1Point, PreconditionError
from quaddyn.dynamics import QuadRatMap, apply_map, detect_orbit, height_bound_data
from quaddyn.elliptic import O, T, CurvePoint, EllipticSurface, ec_add, ec_multiple
from quaddyn.moduli import (
    ModuliLabel,
    classify_orbit,
    preimage_partner,
    preperiodic_closure,
    preperiodic_scan,
    x52_coordinates,
    x52_forward,
    x52_inverse,
    x52_membership,
    x52_point_from_multiple,
)
from quaddyn.rat_search import Degenerate, RatSearchConfig, TripleParam, construct_map, rat_search, x42_fifth

SEVEN = QuadRatMap(*kv.SEVEN_CYCLE_MAP)


def pt(v):
    return P1Point.from_value(v if v == "inf" else Fraction(v))


# --- labels and partners --------------------------------------------------------


def test_label_basics():
    lab = ModuliLabel(6, 2)
    assert str(lab) == "(6,2)" and lab.length == 8 and lab.in_surface_family
    assert not ModuliLabel(2, 3).in_surface_family
    with pytest.raises(DomainError):
        ModuliLabel(0, 0)


def test_classify_orbit_examples():
    assert classify_orbit(detect_orbit(SEVEN, INFINITY, 10)) == ModuliLabel(0, 7)
    F, G, *_ = kv.LENGTH_EIGHT_ORBITS[0]
    assert classify_orbit(detect_orbit(QuadRatMap(F, G), INFINITY, 12)) == ModuliLabel(5, 3)
    F, G, *_ = kv.LENGTH_EIGHT_ORBITS[1]
    assert classify_orbit(detect_orbit(QuadRatMap(F, G), INFINITY, 12)) == ModuliLabel(6, 2)
    with pytest.raises(PreconditionError):
        classify_orbit(detect_orbit(QuadRatMap((10, -7, -3), (10, 37, 9)), INFINITY, 10))


def test_length_eight_orbits_as_listed():
    for F, G, orbit, tail, period in kv.LENGTH_EIGHT_ORBITS:
        orb = detect_orbit(QuadRatMap(F, G), INFINITY, 12)
        assert (orb.tail, orb.period) == (tail, period)
        assert orb.iterates[:3] == (INFINITY, pt(1), pt(0))
        if orbit is not None:
            assert list(orb.iterates[3:8]) == [P1Point.from_value(v) for v in orbit]


def test_preimage_partner_examples():
    assert preimage_partner(SEVEN, pt("57/35")) == pt("2/19")
    assert preimage_partner(SEVEN, INFINITY) == pt("57/295")
    assert preimage_partner(SEVEN, pt("1/7")) == pt("27/10")
    assert preimage_partner(QuadRatMap.polynomial(0), pt(0)) is None
    # infinity is critical for a polynomial
    assert preimage_partner(QuadRatMap.polynomial(Fraction(-29, 16)), INFINITY) is None


def test_seven_cycle_partner_list():
    cycle = [pt(v) for v in kv.SEVEN_CYCLE]
    assert [apply_map(SEVEN, p) for p in cycle] == cycle[1:] + cycle[:1]
    for i, y in enumerate(kv.SEVEN_CYCLE_PARTNER_PREIMAGES):
        y = P1Point.from_value(y)
        assert apply_map(SEVEN, y) == cycle[i]
        assert y not in cycle
        assert preimage_partner(SEVEN, cycle[i - 1]) == y


coef = st.integers(-9, 9)


@given(st.lists(coef, min_size=6, max_size=6), st.integers(-9, 9), st.integers(0, 9))
def test_partner_has_the_same_image(c, a, b):
    assume((a, b) != (0, 0))
    try:
        phi = QuadRatMap(c[:3], c[3:])
    except DomainError:
        assume(False)
    x = P1Point(a, b)
    y = preimage_partner(phi, x)
    if y is None:
        # critical: phi(y) = phi(x) has a double root at x
        X, Y = sympy.symbols("X Y")
        u, v = apply_map(phi, x).pair()
        form = sum((v * f - u * g) * X ** (2 - i) * Y**i for i, (f, g) in enumerate(zip(phi.F, phi.G)))
        disc = sympy.discriminant(sympy.Poly(form.subs(Y, 1), X)) if form.subs(Y, 1).as_poly(X).degree() == 2 else 0
        assert disc == 0
    else:
        assert y != x and apply_map(phi, y) == apply_map(phi, x)


# --- bounded scans ---------------------------------------------------------------


def test_scan_seven_cycle():
    found = preperiodic_scan(SEVEN, math.log(1000))
    expected = {pt(v) for v in kv.SEVEN_CYCLE} | {P1Point.from_value(v) for v in kv.SEVEN_CYCLE_PARTNER_PREIMAGES}
    assert len(found) == 14 and found == expected
    assert preperiodic_closure(SEVEN, [INFINITY]) == expected


def test_scan_nine_point_polynomial():
    found = preperiodic_scan(QuadRatMap.polynomial(kv.NINE_POINT_POLY_C), math.log(100))
    assert len(found) == 9
    assert {pt("3/4"), pt("-3/4"), INFINITY} <= found


def test_scan_squaring():
    assert preperiodic_scan(QuadRatMap.polynomial(0), math.log(100)) == {pt(0), pt(1), pt(-1), INFINITY}


def test_scan_backends_agree():
    py = kernels.get_backend("python")
    for F, G, *_ in kv.LENGTH_EIGHT_ORBITS[:6]:
        phi = QuadRatMap(F, G)
        assert preperiodic_scan(phi, math.log(300)) == preperiodic_scan(phi, math.log(300), backend=py)


def test_scan_is_complete_below_the_bound():
    """Every point of height at most 60 whose orbit closes is found.  The
    brute force iterates exactly and only gives up once an iterate's height
    exceeds C, beyond which heights increase forever."""
    H = 60
    for phi in (SEVEN, QuadRatMap(*kv.LENGTH_EIGHT_ORBITS[4][:2])):
        C = height_bound_data(phi).C
        brute = set()
        for b in range(H + 1):
            for a in range(-H, H + 1):
                if math.gcd(a, b) != 1 or (b == 0 and a != 1):
                    continue
                x = y = P1Point(a, b)
                seen = {x}
                while math.log(max(abs(y.a), y.b)) <= C + 1e-9:
                    y = apply_map(phi, y)
                    if y in seen:
                        brute.add(x)
                        break
                    seen.add(y)
        assert preperiodic_scan(phi, math.log(H)) == brute


# --- the (5,2) surface ------------------------------------------------------------

SIXFOLD_T2 = (Fraction(1, 24), Fraction(-5, 64), Fraction(-15, 8))


def test_membership_examples():
    x3, x4, w = SIXFOLD_T2
    assert x52_membership(x3, x4, w)
    assert not x52_membership(x3, x4, w + 1)
    assert not x52_membership(Fraction(2), Fraction(3), Fraction(5))


def test_membership_means_pole():
    x3, x4, w = SIXFOLD_T2
    psi = construct_map(TripleParam(x3, x4, x42_fifth(x3, x4)))
    assert apply_map(psi, pt(w)) == INFINITY


def test_inverse_at_t2():
    assert x52_inverse(2, 288, -10152) == (Fraction(-15, 8), Fraction(1, 24), Fraction(-5, 64))
    assert x52_forward(*SIXFOLD_T2[:2], SIXFOLD_T2[2]) == (2, 288, -10152)
    assert isinstance(x52_inverse(2, 0, 16 * 9), Degenerate)
    assert isinstance(x52_forward(1, 2, 3), Degenerate)


def test_roundtrip_on_random_curve_points():
    rng = random.Random(52)
    done = 0
    while done < 100:
        t = Fraction(rng.randint(-30, 30), rng.randint(1, 30))
        n = rng.choice([-7, -6, -4, 2, 3, 4, 6, 7, 8])
        try:
            E = EllipticSurface(t)
        except DomainError:
            continue
        Q = E.multiple(n, E.base_point())
        if Q.is_infinity:
            continue
        inv = x52_inverse(t, Q.x, Q.y)
        if not inv:
            continue
        w, x3, x4 = inv
        fwd = x52_forward(x3, x4, w)
        if not fwd:
            continue
        assert fwd == (t, Q.x, Q.y)
        assert x52_membership(x3, x4, w)
        assert x52_inverse(*fwd) == (w, x3, x4)
        done += 1


def test_search_hits_land_on_the_curve():
    recs = [r for r in rat_search(RatSearchConfig(height_bound=math.log(7))) if r.moduli_label == (5, 2)]
    assert recs
    for r in recs:
        coords = x52_coordinates(r.map, INFINITY)
        if not coords:
            continue
        x3, x4, w = coords
        assert x52_membership(x3, x4, w)
        fwd = x52_forward(x3, x4, w)
        if not fwd:
            continue
        t, x, y = fwd
        E = EllipticSurface(t)
        assert E.contains(CurvePoint(x, y))


# --- the elliptic surface ------------------------------------------------------------


def test_displayed_multiples_exact():
    E = EllipticSurface()
    P = E.base_point()
    for n, (xs, ys) in kv.BASE_POINT_MULTIPLES.items():
        Q = E.multiple(n, P)
        assert Q.x == E.element(sympy.sympify(xs, locals={"t": T}))
        assert Q.y == E.element(sympy.sympify(ys, locals={"t": T}))
        assert E.contains(Q)


def test_base_point_at_t1():
    E = EllipticSurface(1)
    P = E.base_point()
    assert (P.x, P.y) == (0, 4)
    assert E.contains(P)
    # y^2 = 4x^3 + 9x^2 - 40x + 16 at t = 1
    assert (E.a2, E.a4 / 4, E.a6 / 16) == (9, -40, 16)


def test_non_torsion_at_t1():
    E = EllipticSurface(1)
    P = E.base_point()
    for k in range(1, 21):
        Q = E.multiple(k, P)
        assert not Q.is_infinity
        assert E.contains(Q)


def test_specialization_homomorphism():
    G = EllipticSurface()
    P = G.base_point()
    generic = {k: G.multiple(k, P) for k in range(1, 9)}
    rng = random.Random(8)
    tried = 0
    while tried < 10:
        t = Fraction(rng.randint(-20, 20), rng.randint(1, 20))
        try:
            E = EllipticSurface(t)
        except DomainError:
            continue
        tried += 1
        for k, Q in generic.items():
            assert G.specialize(Q, t) == E.multiple(k, E.base_point())


def test_group_law_closure_and_errors():
    E = EllipticSurface(3)
    P = E.base_point()
    Q = E.multiple(3, P)
    R = ec_add(P, Q, 3)
    assert E.contains(R) and R == E.multiple(4, P)
    assert ec_multiple(4, P, 3) == R
    assert E.add(P, E.neg(P)) is O or E.add(P, E.neg(P)).is_infinity
    with pytest.raises(DomainError):
        E.add(P, CurvePoint(Fraction(1), Fraction(1)))
    with pytest.raises(DomainError):
        E.point(1, 1)
    for bad in (0, -1):
        with pytest.raises(DomainError):
            EllipticSurface(bad)


def test_sixfold_coordinates_generic():
    E = EllipticSurface()
    Q = E.multiple(6, E.base_point())
    w, x3, x4 = x52_inverse(E.t, Q.x, Q.y)
    want = [E.element(sympy.sympify(s, locals={"t": T})) for s in kv.SIXFOLD_COORDINATES]
    assert (x3, x4, w) == (want[0], want[1], want[3])
    assert x42_fifth_generic(x3, x4) == want[2]
    assert x52_membership(x3, x4, w)


def x42_fifth_generic(x3, x4):
    return (x4 - x3) / (x3 * x3 - 2 * x3 + x4)


# --- points from multiples -------------------------------------------------------------


def test_point_from_sixfold_multiple():
    w = x52_point_from_multiple(6, 2)
    assert w.triple == TripleParam.of("1/24", "-5/64", "3/4")
    assert w.w == Fraction(-15, 8)
    assert w.label == ModuliLabel(5, 2)
    assert (w.point.x, w.point.y) == (288, -10152)


def test_small_multiples_degenerate():
    for n in (1, -1, 2, -2, 3, -3, 4, -4, 5):
        for t in (2, 3, Fraction(5, 7)):
            assert isinstance(x52_point_from_multiple(n, t), Degenerate), (n, t)


def test_minus_fivefold_is_not_degenerate():
    """[-5]P = (-t(t+1), t(t+1)(t^3+3t^2+2t-1)) gives x3 = -t,
    x4 = -1/(t+1), w = -t(t+2), a genuine (5,2) point."""
    w = x52_point_from_multiple(-5, 2)
    assert (w.triple.x3, w.triple.x4, w.w) == (-2, Fraction(-1, 3), -8)
    psi = construct_map(w.triple)
    orbit = [pt(-8)]
    for _ in range(7):
        orbit.append(apply_map(psi, orbit[-1]))
    assert orbit == [pt(v) for v in (-8, "inf", 1, 0, -2, "-1/3", "5/23", "-1/3")]
    for t in (3, Fraction(5, 7), Fraction(-7, 3)):
        assert x52_point_from_multiple(-5, t).label == ModuliLabel(5, 2)


def test_point_from_multiple_at_t1():
    w = x52_point_from_multiple(6, 1)
    assert w and w.label == ModuliLabel(5, 2)


@pytest.mark.parametrize("n", [6, -6])
def test_sixfold_gives_tail5_period2(n):
    rng = random.Random(n)
    done = 0
    while done < 20:
        t = Fraction(rng.randint(-40, 40), rng.randint(1, 40))
        w = x52_point_from_multiple(n, t)
        if not w:
            continue
        assert classify_orbit(w.orbit) == ModuliLabel(5, 2)
        norm = w.normalized_triple()
        if norm:
            assert classify_orbit(detect_orbit(construct_map(norm), INFINITY, 10)) == ModuliLabel(5, 2)
        done += 1
