from fractions import Fraction
from math import factorial, prod

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from jkmirror.hypergeom import (
    WeightedHypersurface,
    alpha_crit,
    bcm_data,
    bcm_series_check,
    build_operator,
    coefficient_identity_check,
    expansion_coefficient,
    ifun_coefficient,
    ifun_coefficients,
    m_alpha_product,
    multiset_identity_check,
    recurrence_check,
    singular_value,
    jk_hypersurface,
)
from jkmirror.periods import expansion_coefficient_literal


def test_ifun_k1_frozen():
    # (12j)! j! / ((2j)! (3j)!^2 (5j)!) computed by hand for j = 1
    h = jk_hypersurface(1)
    assert ifun_coefficient(h, 0) == 1
    assert ifun_coefficient(h, 1) == Fraction(factorial(12), 2 * 6 * 6 * 120) == 55440
    assert ifun_coefficients(h, 3) == [ifun_coefficient(h, j) for j in range(4)]


@pytest.mark.parametrize("k", [1, 2, 3])
def test_expansion_matches_ifun(k):
    for j in range(12):
        assert coefficient_identity_check(k, j)


def test_integer_and_literal_expansions_agree():
    for k in (1, 2):
        for j in range(6):
            assert expansion_coefficient(k, j) == expansion_coefficient_literal(k, j)


def _order_oracle(h):
    # degree of P1(j-1) after cancelling gcd with P0(j), via sympy
    j = sympy.symbols("j")
    P0 = -prod(prod(a * j - r for r in range(a)) for a in h.weights)
    P1 = j * prod(h.degree * j - r for r in range(h.degree))
    g = sympy.gcd(sympy.expand(P0), sympy.expand(P1))
    return sympy.degree(sympy.quo(sympy.expand(P1), g), j)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_operator_order_against_sympy(k):
    h = jk_hypersurface(k)
    assert build_operator(h).order == _order_oracle(h) == 6 * k + 2


def test_quintic_operator_order():
    assert build_operator(WeightedHypersurface((1, 1, 1, 1, 1), 5)).order == 4


@given(st.lists(st.integers(1, 6), min_size=2, max_size=4))
@settings(max_examples=30, deadline=None)
def test_reduction_keeps_sizes_balanced(weights):
    h = WeightedHypersurface(tuple(weights), sum(weights) - 1)
    op = build_operator(h)
    # P0 and P1 have degree d+1 each; cancelling common factors removes equal counts
    assert op.p0_roots.size() == op.p1_roots.size() == h.degree + 1
    assert op.reduced_p0.size() == op.reduced_p1.size()
    assert op.order == _order_oracle(h)


@given(st.lists(st.integers(1, 5), min_size=2, max_size=4))
@settings(max_examples=20, deadline=None)
def test_recurrence_generic(weights):
    h = WeightedHypersurface(tuple(weights), sum(weights) - 1)
    assert recurrence_check(h, 15)


def test_recurrence_detects_wrong_degree():
    # ratio formula with the wrong degree must break the recurrence of the true coefficients
    from jkmirror import hypergeom as hg

    h = WeightedHypersurface((1, 1, 1), 2)
    bad = WeightedHypersurface((1, 1, 1), 3)
    c1 = ifun_coefficient(bad, 1)
    assert c1 * hg.p0(h, 1) + hg.p1_shifted(h, 1) != 0


@pytest.mark.parametrize("k", range(1, 11))
def test_singular_value_closed_form(k):
    assert singular_value(jk_hypersurface(k)) == alpha_crit(k)
    assert m_alpha_product(k) == 1


def test_alpha_crit_frozen():
    # 5^5 / (4^11 * 3^6)
    assert alpha_crit(1) == Fraction(3125, 4**11 * 729)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_bcm(k):
    d = bcm_data(k)
    assert len(d.v) == len(d.w) == 6 * k + 2
    assert multiset_identity_check(k)
    assert not multiset_identity_check(k, p=(8 * k + 4, 2))
    assert bcm_series_check(k, 8)
