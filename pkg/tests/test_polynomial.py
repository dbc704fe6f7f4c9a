from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from svsec.polynomial import RationalPoly, binomial_poly, grevlex_key, parse_monomial, shift

VARS = ("x", "y", "z")

coeffs = st.fractions(min_value=-20, max_value=20, max_denominator=12)
exps = st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))
polys = st.dictionaries(exps, coeffs, max_size=6).map(lambda t: RationalPoly(VARS, t))
points = st.tuples(*[st.integers(-9, 9)] * 3)


@settings(max_examples=60)
@given(polys, polys, polys)
def test_ring_laws(p, q, r):
    assert (p + q) + r == p + (q + r)
    assert p + q == q + p
    assert (p * q) * r == p * (q * r)
    assert p * q == q * p
    assert p * (q + r) == p * q + p * r
    assert p - p == 0


@settings(max_examples=60)
@given(polys, polys, points)
def test_evaluation_is_a_homomorphism(p, q, v):
    assert (p * q).evaluate(v) == p.evaluate(v) * q.evaluate(v)
    assert (p + q).evaluate(v) == p.evaluate(v) + q.evaluate(v)


@given(polys)
def test_no_zero_terms(p):
    assert all(c != 0 for c in (p * p - p).terms.values())


def test_binomial_poly():
    assert binomial_poly(0, "n") == 1
    n = RationalPoly.var("n")
    assert binomial_poly(3, "n") == (n**3 + 6 * n**2 + 11 * n + 6) / 6
    assert binomial_poly(2, "n") == (n**2 + 3 * n + 2) / 2
    assert binomial_poly(3, "n").evaluate({"n": 4}) == 35


def test_substitute_and_shift():
    x = RationalPoly.var("x")
    p = x**2 - 4
    assert shift(p, "x", 2).univariate_coeffs() == [0, 4, 1]
    y = RationalPoly.var("y", ("x", "y"))
    q = (x * y + 1).substitute("y", 3)
    assert q == 3 * x + 1


def test_coefficients_in():
    x, y = RationalPoly.var("x", VARS[:2]), RationalPoly.var("y", VARS[:2])
    p = x**2 * y + 3 * y - x
    co = p.coefficients_in("y")
    assert co[1] == RationalPoly.var("x") ** 2 + 3
    assert co[0] == -RationalPoly.var("x")


def test_printing_order():
    x, y = RationalPoly.var("x", ("x", "y")), RationalPoly.var("y", ("x", "y"))
    p = y**2 + x * y - Fraction(1, 2) * x**2 + 1
    assert str(p) == "-1/2*x^2 + x*y + y^2 + 1"
    assert grevlex_key((2, 0)) > grevlex_key((1, 1)) > grevlex_key((0, 2))


def test_parse_monomial():
    assert parse_monomial("n1^6*n3^3", ("n1", "n3")) == (6, 3)
    assert parse_monomial("1", ("a",)) == (0,)
