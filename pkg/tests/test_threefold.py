import random
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from jkmirror.exactcore import ExactPoly
from jkmirror.threefold import (
    CHART_VARS,
    conic_bundle_check,
    coordchange_check,
    count_W,
    delta1,
    delta_roots,
    fiber_special_points,
    lines_on_fiber,
    new_coordinates,
    substitution_check,
    w_diagonal,
    w_hat,
)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_substitution(k):
    rep = substitution_check(k)
    assert rep.equal
    assert rep.factor == ExactPoly.monomial(CHART_VARS, {"x": 1, "z": 1})


def test_substitution_against_sympy():
    k = 1
    x, y, z, t, a = sympy.symbols("x y z t a")
    u1, u2, u3, u4 = y / x, x**3 * t / z, 1 / (x * z), z / x
    torus = u1 + u2 + u3 + u4 - 1 - a * u1**2 * u2**3 * u3**3 * u4**5
    chart = -a * t**3 * y**2 + y * z + z**2 + 1 - x * z + t * x**4
    assert sympy.expand(torus * x * z - chart) == 0
    assert len(sympy.Add.make_args(sympy.expand(chart))) == 6


def test_substitution_wrong_image_fails():
    from jkmirror.threefold import change_images

    imgs = change_images()
    imgs["u4"] = ExactPoly.monomial(CHART_VARS, {"x": 1, "z": 1})
    assert not substitution_check(1, imgs).equal


@given(st.integers(1, 3), st.fractions(max_denominator=30), st.fractions(max_denominator=30),
       st.fractions(max_denominator=30), st.fractions(max_denominator=30),
       st.fractions(min_value=Fraction(1, 10), max_value=3, max_denominator=30),
       st.fractions(min_value=Fraction(1, 10), max_value=3, max_denominator=30))
@settings(max_examples=40, deadline=None)
def test_diagonal_form_pulls_back(k, x1, x2, y1, y2, t, a):
    n1, n2 = new_coordinates(k, x1, x2, y1, y2, t, a)
    assert w_diagonal(k, x1, x2, n1, n2, t, a) == w_hat(k, x1, x2, y1, y2, t, a)


@pytest.mark.parametrize("k", [1, 2])
def test_coordchange(k):
    rep = coordchange_check(k, seed=0, trials=20)
    assert rep.equal
    assert rep.result.samples_used == 20
    assert coordchange_check(k, wrong_sign=True).result.status == "not_equal"


@pytest.mark.parametrize("k", [1, 2])
def test_conic_bundle(k):
    rep = conic_bundle_check(k)
    assert rep.equal
    assert (rep.x1_exponent, rep.delta1_exponent, rep.constant) == (2, 1, 1)
    assert conic_bundle_check(k, drop_delta1=True).result.status == "not_equal"


def test_fiber_points_regular():
    rng = random.Random(5)
    for _ in range(5):
        t = Fraction(rng.randint(1, 400), rng.randint(1, 97))
        geo = fiber_special_points(1, 1, "regular", t)
        assert geo.ok
        assert all(r < mpmath.mpf(2) ** -64 for r in geo.residuals.values())
    # the doubled-denominator reading of p_t is off by 3 delta1/4
    geo = fiber_special_points(1, 1, "regular", 2)
    assert abs(geo.alternate_residuals["p+"] - abs(3 * delta1(1, 1, 2) / 4)) < 1e-60


def test_fiber_points_singular():
    g1 = fiber_special_points(1, 1, "delta1_root")
    assert g1.ok and g1.gradient_residuals["p"] < mpmath.mpf(2) ** -64
    g2 = fiber_special_points(1, 1, "delta2_root")
    assert g2.ok
    assert g2.alternate_residuals["q_gradient"] > 1e-3


def test_delta_roots_are_roots():
    with mpmath.workprec(256):
        for r in delta_roots(1, 1, "delta1"):
            assert abs(delta1(1, 1, r)) < mpmath.mpf(2) ** -200
        assert len(delta_roots(2, 1, "delta2")) == 4 * 2 + 2


def test_lines():
    rep = lines_on_fiber(1, 1, 2)
    assert rep.ok and not rep.collision
    r = delta_roots(1, 1, "delta2")[0]
    with mpmath.workprec(256):
        near = r + mpmath.mpf(10) ** -70
    assert lines_on_fiber(1, 1, near).collision


@pytest.mark.parametrize("q", [3, 5, 7])
@pytest.mark.parametrize("k", [1, 2])
@pytest.mark.parametrize("al", [1, 2])
def test_count_char_vs_brute(q, k, al):
    assert count_W(k, al, q, "char") == count_W(k, al, q, "brute")


def test_count_brute_cap():
    with pytest.raises(ValueError):
        count_W(1, 1, 13, "brute")
