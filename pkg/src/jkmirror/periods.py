"""Contour-integral periods of the pencil and the hypergeometric series.

The period is the mean over the circle |t| = rho of

    (1 + 4 t^(2k+1)/alpha)^(-1/2) * (1 - t (8 + 2 alpha / t^(2k+1))^2)^(-1/2)

with principal square roots; it should equal sum_j c_j alpha^j.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import mpmath

from .exactcore import binomial_general
from .hypergeom import _check_k, alpha_crit, jk_hypersurface, p0, p1_shifted

DEFAULT_PREC = int(os.environ.get("JKMIRROR_PREC", "256"))
DEFAULT_TOL = "1e-30"
MIN_SAMPLES = 32
MAX_SAMPLES = 2**20


class BranchValidityError(ArithmeticError):
    pass


class NoConvergence(ArithmeticError):
    pass


@dataclass
class ContourSpec:
    radius: object
    sample_count: int
    precision_bits: int

    @property
    def base_point(self):
        return self.radius


@dataclass
class PeriodResult:
    value: object
    error_estimate: object
    sample_count: int
    radius: object
    branch_margin: object  # max |z - 1| over both radicands and all nodes
    series_value: object = None
    series_terms_used: int = 0
    agreement: object = None


def _mp(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, str):
        return mpmath.mpmathify(x.replace(" ", ""))
    return mpmath.mpmathify(x)


def band_exponents(k: int) -> tuple[Fraction, Fraction]:
    """Open interval of admissible radius exponents: (1/(2k+1), 2/(4k+1))."""
    return Fraction(1, 2 * k + 1), Fraction(2, 4 * k + 1)


def contour_radius(k: int, alpha_abs, exponent=None):
    """alpha_abs^e with e the midpoint of the band unless given."""
    _check_k(k)
    r = _mp(alpha_abs)
    if not 0 < r < 1:
        raise ValueError("need 0 < |alpha| < 1")
    lo, hi = band_exponents(k)
    e = (lo + hi) / 2 if exponent is None else Fraction(exponent)
    if not lo < e < hi:
        raise ValueError(f"exponent {e} outside the open band ({lo}, {hi})")
    return r ** _mp(e)


def _integrand(k, alpha, t, flip_branch):
    n = 2 * k + 1
    tn = t**n
    z1 = 1 + 4 * tn / alpha
    w = 8 + 2 * alpha / tn
    z2 = 1 - t * w * w
    val = 1 / (mpmath.sqrt(z1) * mpmath.sqrt(z2))
    if flip_branch:
        val = -val
    return val, max(abs(z1 - 1), abs(z2 - 1))


def period_quadrature(k: int, alpha, precision_bits: int = DEFAULT_PREC, tol=DEFAULT_TOL,
                      exponent=None, flip_branch: bool = False, check_branch: bool = True,
                      confirm: bool = True, max_samples: int = MAX_SAMPLES) -> PeriodResult:
    """Trapezoid rule on |t| = rho with N doubled from 32.

    Stops once two successive values differ by less than ``tol`` and then,
    with ``confirm``, doubles once more so the reported error estimate is the
    difference of the last two converged values.
    """
    _check_k(k)
    if precision_bits < 128:
        raise ValueError("precision_bits must be >= 128")
    with mpmath.workprec(precision_bits):
        alpha = mpmath.mpc(_mp(alpha))
        tol = _mp(tol)
        crit = _mp(alpha_crit(k))
        if alpha == 0 or abs(alpha) > crit / 2:
            raise ValueError(f"|alpha| must lie in (0, alpha_crit/2] = (0, {mpmath.nstr(crit / 2, 5)}]")
        rho = contour_radius(k, abs(alpha), exponent)
        margin = mpmath.mpf(0)

        def node_sum(n, odd_only):
            nonlocal margin
            s = mpmath.mpc(0)
            step = 2 if odd_only else 1
            start = 1 if odd_only else 0
            for j in range(start, n, step):
                t = rho * mpmath.expj(2 * mpmath.pi * j / n)
                v, m = _integrand(k, alpha, t, flip_branch)
                margin = max(margin, m)
                s += v
            return s

        n = MIN_SAMPLES
        total = node_sum(n, False)
        prev = total / n
        converged = False
        while True:
            if check_branch and margin >= 1:
                raise BranchValidityError(
                    f"radicand left the disk |z-1|<1 (max distance {mpmath.nstr(margin, 5)})"
                )
            if 2 * n > max_samples:
                raise NoConvergence(f"no convergence with N <= {max_samples}")
            total += node_sum(2 * n, True)
            n *= 2
            cur = total / n
            err = abs(cur - prev)
            if converged or (err < tol and not confirm):
                if check_branch and margin >= 1:
                    raise BranchValidityError("radicand left the disk |z-1|<1")
                return PeriodResult(cur, err, n, rho, margin)
            if err < tol:
                converged = True
            prev = cur


def series_value(k: int, alpha, tol=DEFAULT_TOL, precision_bits: int = DEFAULT_PREC,
                 max_terms: int = 100000):
    """sum_j c_j alpha^j, truncated once the geometric tail bound falls below tol*|sum|.

    Returns (value, terms_used).
    """
    _check_k(k)
    h = jk_hypersurface(k)
    with mpmath.workprec(precision_bits):
        alpha = mpmath.mpc(_mp(alpha))
        tol = _mp(tol)
        crit = _mp(alpha_crit(k))
        if abs(alpha) >= crit:
            raise ValueError(
                f"|alpha| = {mpmath.nstr(abs(alpha), 5)} is outside the disk of convergence "
                f"(radius {mpmath.nstr(crit, 5)})"
            )
        if alpha == 0:
            return mpmath.mpc(1), 1
        limit_ratio = abs(alpha) / crit
        c = Fraction(1)
        term = mpmath.mpc(1)
        total = mpmath.mpc(1)
        for j in range(1, max_terms):
            ratio_exact = Fraction(p1_shifted(h, j), -p0(h, j))
            c *= ratio_exact
            new_term = _mp(c) * alpha**j
            r = max(limit_ratio, abs(new_term) / abs(term))
            term = new_term
            total += term
            if r < 1 and abs(term) * r / (1 - r) < tol * abs(total):
                return total, j + 1
        raise NoConvergence(f"series did not converge in {max_terms} terms")


def expansion_coefficient_literal(k: int, j: int) -> Fraction:
    """binom(-1/2,m)(-1)^m 4^(3m-j) sum_{p=j}^{2m} binom(-1/2,p-j) C(2m,p), m = (2k+1)j."""
    m = (2 * k + 1) * j
    inner = sum(binomial_general(Fraction(-1, 2), p - j) * comb(2 * m, p) for p in range(j, 2 * m + 1))
    return binomial_general(Fraction(-1, 2), m) * (-1) ** m * Fraction(4) ** (3 * m - j) * inner


def expansion_value(k: int, alpha, jmax: int, precision_bits: int = DEFAULT_PREC):
    """Partial sum of the residue expansion of the period, up to alpha^jmax."""
    _check_k(k)
    if jmax < 0:
        raise ValueError("jmax must be >= 0")
    with mpmath.workprec(precision_bits):
        alpha = mpmath.mpc(_mp(alpha))
        return mpmath.fsum(_mp(expansion_coefficient_literal(k, j)) * alpha**j for j in range(jmax + 1))


@dataclass
class PeriodSeriesResult:
    passed: bool
    agreement: object
    period: PeriodResult
    series_value: object
    series_terms_used: int

    def __bool__(self):
        return self.passed


def period_series_check(k: int, alpha, precision_bits: int = DEFAULT_PREC, tol=DEFAULT_TOL,
                       flip_branch: bool = False, exponent=None) -> PeriodSeriesResult:
    """Relative agreement of the quadrature period with the series."""
    with mpmath.workprec(precision_bits):
        res = period_quadrature(k, alpha, precision_bits, tol, exponent=exponent, flip_branch=flip_branch)
        # the series is summed to working precision so it never limits the comparison
        sv, used = series_value(k, alpha, mpmath.mpf(2) ** (24 - precision_bits), precision_bits)
        agreement = abs(res.value - sv) / abs(sv)
        res.series_value, res.series_terms_used, res.agreement = sv, used, agreement
        passed = agreement < max(_mp(tol), 10 * res.error_estimate)
        return PeriodSeriesResult(bool(passed), agreement, res, sv, used)


def scaled_alpha(k: int, factor="1e-3", angle_over_pi=0, precision_bits: int = DEFAULT_PREC):
    """factor * alpha_crit * exp(i pi angle): a parameter safely inside the asymptotic regime."""
    with mpmath.workprec(precision_bits):
        return _mp(factor) * _mp(alpha_crit(k)) * mpmath.expjpi(_mp(Fraction(angle_over_pi)))
