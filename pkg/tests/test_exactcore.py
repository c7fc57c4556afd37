from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from jkmirror.exactcore import (
    ExactPoly,
    SignedMultiset,
    binomial_general,
    central_binomial_half,
    identity_check_random,
    laurent_substitute,
    parse_complex,
    parse_exact,
    random_identity,
)

VARS = ("x", "y", "z")
fracs = st.fractions(min_value=-50, max_value=50, max_denominator=20)


@st.composite
def polys(draw, max_terms=4):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        e = tuple(draw(st.integers(-3, 3)) for _ in VARS)
        terms[e] = draw(fracs)
    return ExactPoly(VARS, terms)


def test_repr_and_basic_ops():
    x, y = ExactPoly.gens("x", "y")
    p = (x + y) ** 2 - x * x - y * y
    assert p == 2 * x * y
    assert repr(x * y) == "x*y"
    assert (x**-2 * x**2) == ExactPoly.const(("x", "y"), 1)


def test_degree_and_coeffs():
    (t,) = ExactPoly.gens("t")
    p = 3 * t**4 - t + 7
    assert p.degree("t") == 4
    assert p.univariate_coeffs("t") == [3, 0, 0, -1, 7]


@given(polys(), polys(), polys())
@settings(max_examples=60, deadline=None)
def test_ring_axioms(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert (p - p).is_zero()


@given(polys(), polys(), st.lists(fracs.filter(lambda f: f != 0), min_size=3, max_size=3))
@settings(max_examples=60, deadline=None)
def test_evaluation_is_a_homomorphism(p, q, pt):
    assert (p * q).evaluate(pt) == p.evaluate(pt) * q.evaluate(pt)
    assert (p + q).evaluate(pt) == p.evaluate(pt) + q.evaluate(pt)


@given(polys(), polys())
@settings(max_examples=40, deadline=None)
def test_substitution_is_a_homomorphism(p, q):
    x, y, z = ExactPoly.gens(*VARS)
    images = {"x": x * y, "y": 2 * z, "z": x**-1 - 0 * y + x**-1}
    images["z"] = ExactPoly.monomial(VARS, {"x": -1, "z": 2}, 3)
    lhs = laurent_substitute(p * q + p, images)
    rhs = laurent_substitute(p, images) * laurent_substitute(q, images) + laurent_substitute(p, images)
    assert lhs == rhs


@given(polys(), fracs.filter(lambda f: f != 0), st.tuples(*[st.integers(0, 2)] * 3))
@settings(max_examples=40, deadline=None)
def test_identity_check_sound(p, delta, e):
    # a single differing coefficient must never be reported equal
    bump = ExactPoly(VARS, {e: delta})
    assert identity_check_random(p, p + bump, trials=5).status == "not_equal"
    assert identity_check_random(p, p, trials=5).equal


def test_identity_check_monomial_factor():
    x, y, z = ExactPoly.gens(*VARS)
    p = x + y * z - 3
    res = identity_check_random(-4 * x * z**2 * p, p, allow_monomial_factor=True)
    assert res.equal
    assert res.factor == ExactPoly.monomial(VARS, {"x": 1, "z": 2}, -4)
    res = identity_check_random(x * p + 1, p, allow_monomial_factor=True)
    assert res.status == "not_equal"


def test_random_identity_excludes_poles():
    res = random_identity(lambda p: (p[0] ** 2 - 1) / (p[0] - 1), lambda p: p[0] + 1, ["x"])
    assert res.equal


@given(st.integers(0, 200))
@settings(max_examples=50, deadline=None)
def test_half_binomial_central(m):
    assert binomial_general(Fraction(-1, 2), m) * (-4) ** m == comb(2 * m, m)


def test_central_binomial_half_values():
    assert [central_binomial_half(n) for n in range(4)] == [1, Fraction(-1, 2), Fraction(3, 8), Fraction(-5, 16)]


def test_signed_multiset():
    a = SignedMultiset([Fraction(1, 2), Fraction(3, 2), Fraction(1, 3)])
    b = SignedMultiset([Fraction(1, 2)])
    d = a - b
    assert d.size() == 2
    assert d.is_nonnegative()
    assert not (b - a).is_nonnegative()
    assert d == SignedMultiset([Fraction(1, 2), Fraction(1, 3)])


def test_parsers():
    assert parse_exact("3/4") == Fraction(3, 4)
    assert parse_exact("1e-3") == Fraction(1, 1000)
    re, im = parse_complex("1/2,3")
    assert (re, im) == (Fraction(1, 2), 3)
    with pytest.raises(ValueError):
        parse_exact("abc")
