"""Tests for dense exact polynomials and rational functions."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confinv.ratfunc import Poly, RatFunc


def test_poly_strips_trailing_zeros():
    p = Poly([1, 2, 0, 0])
    assert p.coeffs == (Fraction(1), Fraction(2))
    assert p.degree == 1
    assert Poly([0, 0]).degree == -1


def test_poly_arithmetic():
    p = Poly([1, 1])  # 1 + z
    q = Poly([1, -1])  # 1 - z
    assert (p * q).coeffs == (Fraction(1), Fraction(0), Fraction(-1))
    assert (p + q).coeffs == (Fraction(2),)
    assert (p - q).coeffs == (Fraction(0), Fraction(2))
    assert (p ** 3).coeffs == tuple(Fraction(c) for c in (1, 3, 3, 1))


def test_poly_divmod_exact():
    # (1 - z)^3 divided by (1 - z) leaves no remainder.
    num = Poly([1, -1]) ** 3
    quo, rem = divmod(num, Poly([1, -1]))
    assert rem.degree == -1
    assert quo == Poly([1, -1]) ** 2


def test_poly_gcd_is_monic():
    a = Poly([1, -1]) * Poly([2, 2])  # (1-z) * 2(1+z)
    b = Poly([1, -1]) * Poly([3, 0, 3])  # (1-z) * 3(1+z^2)
    g = a.gcd(b)
    # Monic means leading coefficient one, so the common factor 1 - z
    # comes back as z - 1.
    assert g == Poly([-1, 1]), f"gcd should be the common monic factor, got {g.to_list()}"


def test_poly_evaluate():
    p = Poly([1, 2, 3])
    assert p.evaluate(Fraction(2)) == 1 + 4 + 12


def test_ratfunc_canonical_reduction():
    # (1 - z^2) / (1 - z) reduces to 1 + z.
    r = RatFunc(Poly([1, 0, -1]), Poly([1, -1]))
    assert r.num == Poly([1, 1])
    assert r.den == Poly([1])


def test_ratfunc_denominator_made_monic():
    r = RatFunc(Poly([2]), Poly([4]))
    assert r.num == Poly([Fraction(1, 2)])
    assert r.den == Poly([1])


def test_ratfunc_zero_normal_form():
    r = RatFunc(Poly([0]), Poly([5, 7]))
    assert r.num.degree == -1
    assert r.den == Poly([1])


def test_ratfunc_arithmetic_and_equality():
    half = RatFunc(Poly([1]), Poly([2]))
    third = RatFunc(Poly([1]), Poly([3]))
    assert half + third == RatFunc(Poly([5]), Poly([6]))
    assert half * third == RatFunc(Poly([1]), Poly([6]))
    assert half - half == RatFunc(Poly([0]), Poly([1]))


def test_ratfunc_series_geometric():
    # 1 / (1 - z) expands to all-ones coefficients.
    r = RatFunc(Poly([1]), Poly([1, -1]))
    assert r.series(6) == [Fraction(1)] * 6


def test_ratfunc_series_requires_unit_constant_term():
    r = RatFunc(Poly([1]), Poly([0, 1]))
    with pytest.raises(ZeroDivisionError):
        r.series(3)


def test_ratfunc_json_round_trip_shape():
    r = RatFunc(Poly([0, 0, 1]), Poly([1, -1]) ** 2)
    d = r.to_json_dict()
    assert d == {"num": ["0", "0", "1"], "den": ["1", "-2", "1"]}


@given(
    st.lists(st.integers(-9, 9), min_size=1, max_size=6),
    st.lists(st.integers(-9, 9), min_size=1, max_size=6),
)
def test_poly_multiplication_commutes(a, b):
    p, q = Poly(a), Poly(b)
    assert p * q == q * p


@settings(max_examples=60)
@given(
    st.lists(st.integers(-9, 9), min_size=1, max_size=5),
    st.lists(st.integers(-9, 9), min_size=1, max_size=5),
    st.lists(st.integers(-9, 9), min_size=1, max_size=5),
)
def test_poly_distributive(a, b, c):
    p, q, r = Poly(a), Poly(b), Poly(c)
    assert p * (q + r) == p * q + p * r


@given(st.lists(st.integers(-6, 6), min_size=1, max_size=5))
def test_ratfunc_series_matches_polynomial(coeffs):
    """A polynomial viewed as a rational function expands to itself."""
    r = RatFunc(Poly(coeffs), Poly([1]))
    n = len(coeffs) + 2
    expected = [Fraction(c) for c in coeffs] + [Fraction(0)] * (n - len(coeffs))
    assert r.series(n) == expected
