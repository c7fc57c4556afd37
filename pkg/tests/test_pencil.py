import random
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import assume, given, settings, strategies as st

from jkmirror.hypergeom import alpha_crit
from jkmirror.pencil import (
    BadReduction,
    ClassificationUnavailable,
    aberth,
    branch_coeffs_numeric,
    branch_points,
    branch_polynomial,
    charsum_Y,
    count_Y_brute,
    delta_branch_identity,
    genus_from_degree,
    is_degenerate_mod,
    legendre,
)


@given(st.integers(1, 20))
@settings(max_examples=20, deadline=None)
def test_genus(k):
    assert branch_polynomial(k, 1).degree("t") == 6 * k + 4
    assert genus_from_degree(k) == 3 * k + 1


def test_branch_polynomial_frozen_k1():
    # h = t (4t^3 + a)(-64t^6 + t^5 - 32 a t^3 - 4a^2) at a = 1, expanded by hand
    h = branch_polynomial(1, 1)
    expected = {10: -256, 9: 4, 7: -128 - 64, 6: 1, 4: -16 - 32, 1: -4}
    got = {e[0]: c for e, c in h.terms.items()}
    assert got == expected


@given(st.fractions(min_value=-100, max_value=100, max_denominator=50))
@settings(max_examples=15, deadline=None)
def test_discriminant_nonzero_at_random_alpha(al):
    k = 1
    assume(al != 0 and al != alpha_crit(k))
    t = sympy.symbols("t")
    coeffs = branch_polynomial(k, al).univariate_coeffs("t")
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in coeffs], t)
    assert sympy.discriminant(poly) != 0


def test_discriminant_vanishes_at_alpha_crit():
    t = sympy.symbols("t")
    coeffs = branch_polynomial(1, alpha_crit(1)).univariate_coeffs("t")
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in coeffs], t)
    assert sympy.discriminant(poly) == 0


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_delta_identity(k):
    rep = delta_branch_identity(k)
    assert rep.equal
    assert not rep.variant_equal


def test_aberth_matches_polyroots():
    with mpmath.workprec(200):
        coeffs = branch_coeffs_numeric(1, mpmath.mpf("0.3"))
        rng = random.Random(1)
        seeds = [mpmath.mpc(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(len(coeffs) - 1)]
        ours, _ = aberth(coeffs, seeds, 200)
        ref = mpmath.polyroots(list(reversed(coeffs)), maxsteps=200, extraprec=200)
        for r in ref:
            assert min(abs(r - z) for z in ours) < mpmath.mpf(2) ** -150


@pytest.mark.parametrize("k", [1, 2])
def test_root_classes_deep_in_regime(k):
    c = alpha_crit(k)
    al = mpmath.mpf(c.numerator) / c.denominator / 1000
    bd = branch_points(k, al)
    assert bd.sizes_ok
    assert abs(bd.classes["outer"][0] * 64 - 1) < 0.01
    mid = bd.centers["middle"]
    assert all(mid / 2 < abs(z) < 2 * mid for z in bd.classes["middle"])
    assert bd.residual_bound < mpmath.mpf(2) ** -128


def test_classification_refused_for_large_alpha():
    with pytest.raises(ClassificationUnavailable):
        branch_points(1, 0.5)


def test_legendre_against_euler():
    for q in (7, 11, 101):
        squares = {x * x % q for x in range(1, q)}
        for x in range(q):
            expected = 0 if x == 0 else (1 if x in squares else -1)
            assert legendre(x, q) == expected


@pytest.mark.parametrize("q", [5, 7, 11, 13])
@pytest.mark.parametrize("al", [1, 2, 3])
def test_charsum_matches_brute(q, al):
    degenerate = is_degenerate_mod(1, al, q)
    if degenerate:
        with pytest.raises(BadReduction):
            charsum_Y(1, al, q)
    assert charsum_Y(1, al, q, check_reduction=not degenerate).affine_count == count_Y_brute(1, al, q)


def test_charsum_frozen():
    r = charsum_Y(1, 1, 101)
    assert (r.S, r.affine_count, r.weil_ok) == (18, 119, True)


def test_degenerate_reduction_rejected():
    assert is_degenerate_mod(1, 1, 3)
    with pytest.raises(BadReduction):
        charsum_Y(1, 1, 3)
    assert charsum_Y(1, 1, 3, check_reduction=False).affine_count == count_Y_brute(1, 1, 3)


@given(st.sampled_from([p for p in range(7, 102) if sympy.isprime(p)]), st.integers(1, 10**6))
@settings(max_examples=40, deadline=None)
def test_weil_bound(q, al):
    assume(al % q and not is_degenerate_mod(1, al, q))
    r = charsum_Y(1, al, q)
    assert r.weil_ok
    assert abs(r.S) <= 8 * q**0.5 + 2
