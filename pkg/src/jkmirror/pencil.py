"""The hyperelliptic pencil  alpha*y^2 = h_{k,alpha}(t)  of genus 3k+1.

    h_{k,alpha}(t) = t (4 t^(2k+1) + alpha)
                     (-64 t^(4k+2) + t^(4k+1) - 32 alpha t^(2k+1) - 4 alpha^2)
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

import mpmath

from .exactcore import ExactPoly, as_scalar, laurent_substitute
from .hypergeom import _check_k, alpha_crit


class RootFinderError(RuntimeError):
    def __init__(self, msg, iterations):
        super().__init__(f"{msg} after {iterations} iterations")
        self.iterations = iterations


class ClassificationUnavailable(ValueError):
    pass


class BadReduction(ValueError):
    pass


@dataclass
class PencilSpec:
    k: int
    alpha: object  # Fraction or mpmath.mpc

    def __post_init__(self):
        _check_k(self.k)
        if self.alpha == 0:
            raise ValueError("alpha must be non-zero")

    @property
    def genus(self) -> int:
        return 3 * self.k + 1

    @property
    def alpha_crit(self) -> Fraction:
        return alpha_crit(self.k)

    @property
    def a(self):
        return 1 / self.alpha


# ---------------------------------------------------------------------------
# exact polynomials


def branch_polynomial(k: int, alpha=None) -> ExactPoly:
    """h_{k,alpha}(t), univariate in t; symbolic in 'alpha' when alpha is None."""
    _check_k(k)
    if alpha is None:
        al, t = ExactPoly.gens("alpha", "t")
    else:
        alpha = as_scalar(alpha)
        if alpha == 0:
            raise ValueError("alpha must be non-zero")
        (t,) = ExactPoly.gens("t")
        al = alpha
    n = 2 * k + 1
    return t * (4 * t**n + al) * (-64 * t ** (2 * n) + t ** (2 * n - 1) - 32 * al * t**n - 4 * al * al)


def genus_from_degree(k: int) -> int:
    deg = branch_polynomial(k, 1).degree("t")
    return (deg - 2) // 2


def delta_polys(k: int) -> tuple[ExactPoly, ExactPoly, ExactPoly]:
    """delta1 = 4a t^(2k+1) + 1, delta2 = a^2 t^(4k+2) - 4t delta1^2, delta = delta1*delta2."""
    _check_k(k)
    a, t = ExactPoly.gens("a", "t")
    n = 2 * k + 1
    d1 = 4 * a * t**n + 1
    d2 = a * a * t ** (2 * n) - 4 * t * d1 * d1
    return d1, d2, d1 * d2


def cleared_branch_polynomial(k: int) -> ExactPoly:
    """a^3 h_{k,1/a}(t), obtained by substituting alpha -> a^-1 and clearing."""
    h = branch_polynomial(k)
    names = ("a", "t")
    a_inv = ExactPoly.monomial(names, {"a": -1})
    t = ExactPoly.var(names, "t")
    return laurent_substitute(h, {"alpha": a_inv, "t": t}) * ExactPoly.monomial(names, {"a": 3})


def low_exponent_variant(k: int) -> ExactPoly:
    """a^3 h_{k,1/a} with -64 a^2 t^(2k+1) in the quartic factor instead of -64 a^2 t^(4k+2).

    Kept as a control: it must not match delta1*delta2.
    """
    a, t = ExactPoly.gens("a", "t")
    n = 2 * k + 1
    return t * (4 * a * t**n + 1) * (-64 * a * a * t**n + a * a * t ** (2 * n - 1) - 32 * a * t**n - 4)


@dataclass
class DeltaIdentityReport:
    equal: bool
    difference: ExactPoly
    variant_equal: bool
    variant_difference: ExactPoly

    def __bool__(self):
        return self.equal


def delta_branch_identity(k: int) -> DeltaIdentityReport:
    """a^3 h_{k,1/a} == delta1*delta2 in Q[a, t], plus the low-exponent variant."""
    _, _, delta = delta_polys(k)
    lhs = cleared_branch_polynomial(k)
    diff = lhs - delta
    variant = low_exponent_variant(k) - delta
    return DeltaIdentityReport(diff.is_zero(), diff, variant.is_zero(), variant)


# ---------------------------------------------------------------------------
# numerics: roots


def _poly_mul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def branch_coeffs_numeric(k: int, alpha) -> list:
    """Coefficients of h_{k,alpha}/t, lowest degree first, in mp arithmetic."""
    n = 2 * k + 1
    f1 = [alpha] + [0] * (n - 1) + [4]
    g = [0] * (2 * n + 1)
    g[0] = -4 * alpha**2
    g[n] = -32 * alpha
    g[2 * n - 1] = 1
    g[2 * n] = -64
    return _poly_mul(f1, g)


def _horner(coeffs, z):
    """p(z) and p'(z) for coefficients listed lowest degree first."""
    p = 0
    dp = 0
    for c in reversed(coeffs):
        dp = dp * z + p
        p = p * z + c
    return p, dp


def aberth(coeffs, initial, prec: int, maxiter: int = 500):
    """Aberth-Ehrlich simultaneous iteration.

    Stops once every root meets the backward-error test
    |p(z)| <= 2^-(prec-24) sum |c_j||z|^j, then polishes once.
    Returns (roots, iterations).
    """
    with mpmath.workprec(prec):
        zs = [mpmath.mpc(z) for z in initial]
        cs = [mpmath.mpc(c) for c in coeffs]
        acs = [abs(c) for c in cs]
        tol = mpmath.mpf(2) ** (-(prec - 24))
        n = len(zs)
        done = False
        for it in range(1, maxiter + 1):
            new = list(zs)
            for i in range(n):
                p, dp = _horner(cs, zs[i])
                if p == 0:
                    continue
                ratio = p / dp
                s = mpmath.fsum(1 / (zs[i] - zs[j]) for j in range(n) if j != i)
                new[i] = zs[i] - ratio / (1 - ratio * s)
            zs = new
            if done:
                return zs, it
            ok = True
            for z in zs:
                p, _ = _horner(cs, z)
                bound = _horner(acs, abs(z))[0]
                if abs(p) > tol * bound:
                    ok = False
                    break
            done = ok
        raise RootFinderError("Aberth iteration did not converge", maxiter)


@dataclass
class BranchData:
    k: int
    roots: list
    classes: dict = field(default_factory=dict)
    residual_bound: object = None  # max |h(root)| / (1 + max |coeff|)
    residual_max: object = None
    iterations: int = 0
    centers: dict = field(default_factory=dict)

    def class_sizes(self) -> dict:
        return {name: len(rs) for name, rs in self.classes.items()}

    @property
    def sizes_ok(self) -> bool:
        k = self.k
        return self.class_sizes() == {"zero": 1, "inner": 4 * k + 1, "middle": 2 * k + 1, "outer": 1}


def band_centers(k: int, alpha_abs) -> dict:
    """Leading-order moduli of the three non-zero root groups.

    inner: |t|^(4k+1) ~ 4|alpha|^2;  middle: exact roots of 4t^(2k+1) + alpha;
    outer: t ~ 1/64.
    """
    return {
        "inner": (4 * alpha_abs**2) ** (mpmath.mpf(1) / (4 * k + 1)),
        "middle": (alpha_abs / 4) ** (mpmath.mpf(1) / (2 * k + 1)),
        "outer": mpmath.mpf(1) / 64,
    }


def find_roots(k: int, alpha, precision_bits: int = 256, maxiter: int = 500):
    """All 6k+4 roots of h_{k,alpha}; t=0 is exact, the rest via Aberth."""
    _check_k(k)
    with mpmath.workprec(precision_bits):
        alpha = mpmath.mpc(alpha)
        if alpha == 0:
            raise ValueError("alpha must be non-zero")
        coeffs = branch_coeffs_numeric(k, alpha)
        centers = band_centers(k, abs(alpha))
        seeds = []
        for name, count in (("inner", 4 * k + 1), ("middle", 2 * k + 1), ("outer", 1)):
            for j in range(count):
                seeds.append(centers[name] * mpmath.expj(2 * mpmath.pi * j / count + 0.4 + 0.1 * len(seeds)))
        roots, its = aberth(coeffs, seeds, precision_bits, maxiter)
        roots = [mpmath.mpc(0)] + roots
        full = [0] + coeffs
        scale = 1 + max(abs(c) for c in full)
        resid = max(abs(_horner(full, z)[0]) for z in roots)
        return roots, resid, resid / scale, its, centers


def branch_points(k: int, alpha, precision_bits: int = 256, max_abs="1e-3") -> BranchData:
    """Roots of h_{k,alpha} classified into zero / inner / middle / outer groups.

    Classification assigns each non-zero root to the nearest band centre in
    log-modulus, and is refused when |alpha| exceeds ``max_abs``.
    """
    with mpmath.workprec(precision_bits):
        if abs(mpmath.mpc(alpha)) > mpmath.mpf(max_abs):
            raise ClassificationUnavailable(
                f"|alpha| > {max_abs}: root bands are not separated"
            )
        roots, resid, scaled, its, centers = find_roots(k, alpha, precision_bits)
        classes = {"zero": [roots[0]], "inner": [], "middle": [], "outer": []}
        for z in roots[1:]:
            lz = mpmath.log(abs(z))
            best = min(centers, key=lambda name: abs(lz - mpmath.log(centers[name])))
            classes[best].append(z)
        return BranchData(k, roots, classes, scaled, resid, its, centers)


# ---------------------------------------------------------------------------
# finite fields


def is_odd_prime(q: int) -> bool:
    if q < 3 or q % 2 == 0:
        return False
    return all(q % d for d in range(3, isqrt(q) + 1, 2))


def legendre(x: int, q: int) -> int:
    """Quadratic character on F_q (q an odd prime), chi(0) = 0."""
    x %= q
    if x == 0:
        return 0
    return 1 if pow(x, (q - 1) // 2, q) == 1 else -1


def reduce_mod(x, q: int) -> int:
    x = as_scalar(x)
    if x.denominator % q == 0:
        raise BadReduction(f"denominator of {x} vanishes mod {q}")
    return x.numerator * pow(x.denominator, -1, q) % q


def _poly_mod(coeffs, q):
    out = [c % q for c in coeffs]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _poly_rem(a, b, q):
    a = list(a)
    inv = pow(b[-1], -1, q)
    while len(a) >= len(b) and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        f = a[-1] * inv % q
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - f * c) % q
        a.pop()
    return _poly_mod(a or [0], q)


def poly_gcd_mod(a, b, q):
    """gcd over F_q of coefficient lists (lowest degree first)."""
    a, b = _poly_mod(a, q), _poly_mod(b, q)
    while any(b):
        a, b = b, _poly_rem(a, b, q)
    return a


def branch_coeffs_mod(k: int, alpha_mod: int, q: int) -> list[int]:
    """h_{k,alpha}(t) mod q, lowest degree first (including the factor t)."""
    return [0] + [c % q for c in branch_coeffs_numeric(k, alpha_mod)]


def is_degenerate_mod(k: int, alpha, q: int) -> bool:
    """True when the reduced fibre is singular: alpha = alpha_crit or h not squarefree."""
    am = reduce_mod(alpha, q)
    crit = alpha_crit(k)
    if crit.denominator % q and reduce_mod(crit, q) == am:
        return True
    h = branch_coeffs_mod(k, am, q)
    dh = [(i * c) % q for i, c in enumerate(h)][1:]
    return len(poly_gcd_mod(h, dh, q)) > 1


def _eval_mod(coeffs, t, q):
    v = 0
    for c in reversed(coeffs):
        v = (v * t + c) % q
    return v


@dataclass
class CharSumResult:
    S: int
    affine_count: int
    weil_ok: bool
    q: int


def charsum_Y(k: int, alpha, q: int, check_reduction: bool = True) -> CharSumResult:
    """Quadratic character sum on the affine chart t0 = 1 of alpha*y^2 = h(1, t).

    S = sum_t chi(alpha*h(t)); the affine point count is q + S.  Points with
    t0 = 0 are not counted.
    """
    _check_k(k)
    if not is_odd_prime(q):
        raise ValueError(f"q={q} must be an odd prime")
    am = reduce_mod(alpha, q)
    if am == 0:
        raise BadReduction("alpha vanishes mod q")
    if check_reduction and is_degenerate_mod(k, alpha, q):
        raise BadReduction(f"fibre over alpha={alpha} is degenerate mod {q}")
    h = branch_coeffs_mod(k, am, q)
    S = sum(legendre(am * _eval_mod(h, t, q), q) for t in range(q))
    # chi(h/alpha) = chi(alpha h) since chi(alpha^-2) = 1
    affine = sum(1 + legendre(_eval_mod(h, t, q) * pow(am, -1, q), q) for t in range(q))
    g2 = 6 * k + 2
    slack = abs(S) - 2
    weil_ok = slack <= 0 or slack * slack <= g2 * g2 * q
    return CharSumResult(S, affine, weil_ok, q)


def count_Y_brute(k: int, alpha, q: int) -> int:
    """#{(t, y) in F_q^2 : alpha y^2 = h(t)} by exhaustive enumeration."""
    am = reduce_mod(alpha, q)
    h = branch_coeffs_mod(k, am, q)
    return sum(
        1 for t in range(q) for y in range(q) if (am * y * y - _eval_mod(h, t, q)) % q == 0
    )
