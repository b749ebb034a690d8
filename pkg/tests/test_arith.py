import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import assume, given
from hypothesis import strategies as st

from quaddyn.arith import (
    INFINITY,
    DomainError,
    IntPoly,
    P1Point,
    reduce,
    resultant_forms,
    resultant_quadratic_forms,
    valuation,
)
from quaddyn.rat_search import TripleParam, forms_from_coefficients, triple_coefficients

small = st.integers(-30, 30)
nonzero = small.filter(bool)


def test_reduce_examples():
    assert reduce(14, -12) == Fraction(-7, 6)
    z = reduce(0, 5)
    assert (z.numerator, z.denominator) == (0, 1)
    assert reduce(181, 144) == Fraction(181, 144)
    with pytest.raises(DomainError):
        reduce(1, 0)


@given(small, nonzero, nonzero)
def test_reduce_scaling(a, b, k):
    assert reduce(k * a, k * b) == reduce(a, b)


def test_valuation_examples():
    assert valuation(Fraction(12, 5), 2) == 2
    assert valuation(Fraction(7, 12), 2) == -2
    assert valuation(Fraction(7, 12), 5) == 0
    assert valuation(0, 3) == math.inf
    with pytest.raises(DomainError):
        valuation(Fraction(1, 2), 4)


@given(nonzero, nonzero, nonzero, nonzero, st.sampled_from([2, 3, 5, 7]))
def test_valuation_additive(a, b, c, d, p):
    x, y = Fraction(a, b), Fraction(c, d)
    assert valuation(x * y, p) == valuation(x, p) + valuation(y, p)


def test_p1_canonical_form():
    assert P1Point(2, -4).pair() == (-1, 2)
    assert P1Point(-3, 0) == INFINITY and INFINITY.pair() == (1, 0)
    assert P1Point.from_value("inf") == INFINITY
    assert P1Point.from_value(Fraction(-7, 6)).pair() == (-7, 6)
    with pytest.raises(DomainError):
        P1Point(0, 0)


@given(small, small, nonzero)
def test_p1_scaling(a, b, k):
    assume((a, b) != (0, 0))
    assert P1Point(k * a, k * b) == P1Point(a, b)
    p = P1Point(a, b)
    assert math.gcd(p.a, p.b) == 1 and p.b >= 0


def _form_resultant(f, df, g, dg):
    """Sylvester determinant of binary forms of degrees df and dg, by sympy."""
    fc = list(reversed(f + [0] * (df + 1 - len(f))))
    gc = list(reversed(g + [0] * (dg + 1 - len(g))))
    n = df + dg
    rows = [[0] * i + fc + [0] * (n - df - 1 - i) for i in range(dg)]
    rows += [[0] * i + gc + [0] * (n - dg - 1 - i) for i in range(df)]
    return int(sympy.Matrix(rows).det())


def _sympy_resultant(f, g, d):
    return _form_resultant(f, d, g, d)


def test_resultant_examples():
    assert resultant_forms(IntPoly([0, 0, 1]), IntPoly([1]), 2) == 1
    assert resultant_forms(IntPoly([-1, 0, 1]), IntPoly([-1, 1]), 2) == 0
    # the small-height triple: (a1 z + a0)(z - 1) against a1 z^2 + b1 z + b0
    F, G = forms_from_coefficients(*triple_coefficients(TripleParam.of("-1/3", "-1/5", "-3/5")))
    R = resultant_quadratic_forms(F, G)
    assert R != 0
    f, g = list(reversed(F)), list(reversed(G))
    assert R == resultant_forms(IntPoly(f), IntPoly(g), 2)
    assert R == _sympy_resultant(f, g, 2)


def test_degree_drop_counts_as_common_root():
    # (z + 1) / z^2 and (z + 1) / 1 share no affine root, but z + 1 against
    # 1 at degree 2 both vanish at infinity
    assert resultant_forms(IntPoly([1, 1]), IntPoly([1]), 2) == 0
    assert resultant_forms(IntPoly([1, 1]), IntPoly([0, 0, 1]), 2) != 0


poly2 = st.lists(small, min_size=3, max_size=3)


@given(poly2, poly2)
def test_resultant_matches_determinant_oracle(f, g):
    assert resultant_forms(IntPoly(f), IntPoly(g), 2) == _sympy_resultant(f, g, 2)


@given(st.lists(small, min_size=2, max_size=2), st.lists(small, min_size=2, max_size=2), poly2)
def test_resultant_multiplicative(f1, f2, g):
    f = (IntPoly(f1) * IntPoly(f2)).padded(2)
    lhs = resultant_forms(IntPoly(f), IntPoly(g), 2)
    r1 = _form_resultant(f1, 1, g, 2)
    r2 = _form_resultant(f2, 1, g, 2)
    assert lhs == r1 * r2


@given(poly2, poly2)
def test_resultant_zero_iff_common_factor(f, g):
    assume(any(f) and any(g))
    X, Y = sympy.symbols("X Y")
    F = sum(c * X**i * Y ** (2 - i) for i, c in enumerate(f))
    G = sum(c * X**i * Y ** (2 - i) for i, c in enumerate(g))
    common = sympy.Poly(sympy.gcd(F, G), X, Y).total_degree() > 0
    assert (resultant_forms(IntPoly(f), IntPoly(g), 2) == 0) == common
