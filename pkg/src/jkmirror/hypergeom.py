"""Regularised I-functions of weighted hypersurfaces and their operators.

The differential operator H = P0(D) + alpha*P1(D) is stored through the
rational roots of the linear factors of P0(j) and P1(j-1); reducing the
operator is then a multiset intersection and its order is a count.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, prod

from .exactcore import SignedMultiset


@dataclass(frozen=True)
class WeightedHypersurface:
    weights: tuple[int, ...]
    degree: int

    def __post_init__(self):
        w = tuple(sorted(int(a) for a in self.weights))
        if not w or any(a <= 0 for a in w):
            raise ValueError("weights must be positive integers")
        if self.degree <= 0:
            raise ValueError("degree must be positive")
        object.__setattr__(self, "weights", w)

    @property
    def anticanonical(self) -> bool:
        return self.degree == sum(self.weights) - 1


@dataclass(frozen=True)
class HypergeomOperator:
    p0_roots: SignedMultiset
    p1_roots: SignedMultiset
    reduced_p0: SignedMultiset
    reduced_p1: SignedMultiset

    @property
    def order(self) -> int:
        return self.reduced_p1.size()


@dataclass(frozen=True)
class BCMData:
    v: tuple[Fraction, ...]
    w: tuple[Fraction, ...]
    p: tuple[int, ...]
    q: tuple[int, ...]
    M: Fraction


def _check_k(k: int) -> None:
    if not isinstance(k, int) or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")


def jk_hypersurface(k: int) -> WeightedHypersurface:
    """X_{8k+4} in P(2, 2k+1, 2k+1, 4k+1)."""
    _check_k(k)
    return WeightedHypersurface((2, 2 * k + 1, 2 * k + 1, 4 * k + 1), 8 * k + 4)


def ifun_coefficient(h: WeightedHypersurface, j: int) -> Fraction:
    """(d j)! j! / prod (a_i j)!  -- exact."""
    if j < 0:
        raise ValueError("j must be non-negative")
    num = factorial(h.degree * j) * factorial(j)
    den = prod(factorial(a * j) for a in h.weights)
    return Fraction(num, den)


def ifun_coefficients(h: WeightedHypersurface, jmax: int) -> list[Fraction]:
    """c_0..c_jmax using the ratio c_j / c_{j-1} = P1(j-1) / (-P0(j))."""
    out = [Fraction(1)]
    for j in range(1, jmax + 1):
        out.append(out[-1] * Fraction(p1_shifted(h, j), -p0(h, j)))
    return out


def singular_value(h: WeightedHypersurface) -> Fraction:
    """alpha_0 = prod a_i^a_i / d^d."""
    return Fraction(prod(a**a for a in h.weights), h.degree**h.degree)


def alpha_crit(k: int) -> Fraction:
    """Closed form (4k+1)^(4k+1) / (4^(8k+3) (2k+1)^(2(2k+1)))."""
    _check_k(k)
    return Fraction((4 * k + 1) ** (4 * k + 1), 4 ** (8 * k + 3) * (2 * k + 1) ** (2 * (2 * k + 1)))


# ---------------------------------------------------------------------------
# operator


def p0(h: WeightedHypersurface, j) -> int:
    """P0(j) = -prod_i (a_i j)(a_i j - 1)...(a_i j - a_i + 1)."""
    return -prod(a * j - r for a in h.weights for r in range(a))


def p1_shifted(h: WeightedHypersurface, j) -> int:
    """P1(j-1) = j (d j)(d j - 1)...(d j - d + 1)."""
    d = h.degree
    return j * prod(d * j - r for r in range(d))


def build_operator(h: WeightedHypersurface) -> HypergeomOperator:
    r0 = SignedMultiset({})
    for a in h.weights:
        r0 = r0 + SignedMultiset(Fraction(m, a) for m in range(a))
    r1 = SignedMultiset([Fraction(0)]) + SignedMultiset(
        Fraction(m, h.degree) for m in range(h.degree)
    )
    common = r0.intersection(r1)
    return HypergeomOperator(r0, r1, r0 - common, r1 - common)


def first_recurrence_failure(h: WeightedHypersurface, jmax: int) -> int | None:
    """First j in [1, jmax] with c_j P0(j) + c_{j-1} P1(j-1) != 0, else None."""
    if jmax < 1:
        raise ValueError("jmax must be >= 1")
    prev = ifun_coefficient(h, 0)
    for j in range(1, jmax + 1):
        cur = ifun_coefficient(h, j)
        if cur * p0(h, j) + prev * p1_shifted(h, j) != 0:
            return j
        prev = cur
    return None


def recurrence_check(h: WeightedHypersurface, jmax: int) -> bool:
    return first_recurrence_failure(h, jmax) is None


# ---------------------------------------------------------------------------
# coefficient identity behind the period expansion


def expansion_coefficient(k: int, j: int) -> Fraction:
    """binom(-1/2,m)(-1)^m 4^(3m-j) sum_{p=j}^{2m} binom(-1/2,p-j) C(2m,p), m=(2k+1)j.

    Evaluated as a finite sum in integers: binom(-1/2, i) = (-1)^i C(2i,i)/4^i,
    and 4^(2m-j) clears every denominator of the inner sum.
    """
    _check_k(k)
    if j < 0:
        raise ValueError("j must be non-negative")
    m = (2 * k + 1) * j
    inner = 0
    for i in range(0, 2 * m - j + 1):
        inner += (-1) ** i * comb(2 * i, i) * 4 ** (2 * m - j - i) * comb(2 * m, j + i)
    # binom(-1/2,m)(-1)^m 4^(3m-j) = C(2m,m) 4^(2m-j)
    return Fraction(comb(2 * m, m) * inner)


def coefficient_identity_check(k: int, j: int) -> bool:
    return expansion_coefficient(k, j) == ifun_coefficient(jk_hypersurface(k), j)


# ---------------------------------------------------------------------------
# Beukers-Cohen-Mellit data


def bcm_data(k: int) -> BCMData:
    _check_k(k)
    n = 8 * k + 4
    skip = {4 * i for i in range(1, 2 * k + 1)} | {4 * k + 2}
    v = tuple(Fraction(j, n) for j in range(1, n) if j not in skip)
    w = tuple(Fraction(l, 2 * k + 1) for l in range(1, 2 * k + 2)) + tuple(
        Fraction(m, 4 * k + 1) for m in range(1, 4 * k + 2)
    )
    p = (n, 1)
    q = (2, 2 * k + 1, 2 * k + 1, 4 * k + 1)
    return BCMData(v, w, p, q, _m_value(p, q))


def _m_value(p, q) -> Fraction:
    return Fraction(prod(x**x for x in p), prod(x**x for x in q))


def cyclotomic_roots(ns) -> SignedMultiset:
    """Exponents j/n (mod 1) of the roots of prod (x^n - 1)."""
    out = SignedMultiset({})
    for n in ns:
        out = out + SignedMultiset(Fraction(j, n) for j in range(1, n + 1))
    return out


def multiset_identity_check(k: int, p=None, q=None) -> bool:
    """{roots of prod(x^p-1)} - {roots of prod(x^q-1)} == {v} - {w}."""
    data = bcm_data(k)
    p = data.p if p is None else tuple(p)
    q = data.q if q is None else tuple(q)
    lhs = cyclotomic_roots(p) - cyclotomic_roots(q)
    rhs = SignedMultiset(data.v) - SignedMultiset(data.w)
    return lhs == rhs


def m_alpha_product(k: int) -> Fraction:
    return bcm_data(k).M * alpha_crit(k)


def pochhammer_ratio(v, w, n: int) -> Fraction:
    """prod (v_i)_n / prod (w_i)_n."""
    num = Fraction(1)
    for a in v:
        for i in range(n):
            num *= a + i
    for b in w:
        for i in range(n):
            num /= b + i
    return num


def bcm_series_check(k: int, jmax: int) -> bool:
    """Coefficientwise: dF_{d-1}(v, w | M alpha) equals the I-function series."""
    data = bcm_data(k)
    h = jk_hypersurface(k)
    for j in range(jmax + 1):
        if pochhammer_ratio(data.v, data.w, j) * data.M**j != ifun_coefficient(h, j):
            return False
    return True
