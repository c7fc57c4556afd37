"""The 3-fold family W_k, its del Pezzo fibration chart and the conic-bundle model.

Identities with rational-function coefficients are checked by exact
evaluation at seeded random rational points (see ``random_identity``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .exactcore import (
    ExactPoly,
    IdentityResult,
    as_scalar,
    laurent_substitute,
    random_identity,
)
from .hypergeom import _check_k
from .pencil import aberth, is_odd_prime, reduce_mod

TORUS_VARS = ("u1", "u2", "u3", "u4", "a")
CHART_VARS = ("x", "y", "z", "t", "a")
FIBRE_VARS = ("x1", "x2", "y1", "y2", "t", "a")


@dataclass(frozen=True)
class ThreefoldSpec:
    k: int

    def __post_init__(self):
        _check_k(self.k)

    @property
    def torus_equation(self) -> ExactPoly:
        return w_equation(self.k, "torus")

    @property
    def chart_equation(self) -> ExactPoly:
        return w_equation(self.k, "chart")


def w_equation(k: int, form: str = "torus") -> ExactPoly:
    _check_k(k)
    n = 2 * k + 1
    if form == "torus":
        u1, u2, u3, u4, a = ExactPoly.gens(*TORUS_VARS)
        return u1 + u2 + u3 + u4 - 1 - a * u1**2 * u2**n * u3**n * u4 ** (4 * k + 1)
    if form == "chart":
        x, y, z, t, a = ExactPoly.gens(*CHART_VARS)
        return -a * t**n * y**2 + y * z + z**2 + 1 - x * z + t * x**4
    if form == "weighted":
        x1, x2, y1, y2, t, a = ExactPoly.gens(*FIBRE_VARS)
        return -a * t**n * y1**2 + y1 * y2 + y2**2 + x1**4 - x1 * x2 * y2 + t * x2**4
    raise ValueError(f"unknown form {form!r}")


@dataclass
class SubstitutionReport:
    equal: bool
    factor: ExactPoly | None
    difference: ExactPoly | None = None

    def __bool__(self):
        return self.equal


def change_images() -> dict[str, ExactPoly]:
    """u1 = y/x, u2 = x^3 t/z, u3 = 1/(xz), u4 = z/x."""
    mono = lambda **e: ExactPoly.monomial(CHART_VARS, e)  # noqa: E731
    return {
        "u1": mono(x=-1, y=1),
        "u2": mono(x=3, z=-1, t=1),
        "u3": mono(x=-1, z=-1),
        "u4": mono(x=-1, z=1),
        "a": mono(a=1),
    }


def substitution_check(k: int, images: dict | None = None) -> SubstitutionReport:
    """Torus equation under the chart substitution, cleared by a monomial, vs the chart form."""
    torus = w_equation(k, "torus")
    chart = w_equation(k, "chart")
    sub = laurent_substitute(torus, images or change_images())
    (e_chart, c_chart) = chart.leading()
    (e_sub, c_sub) = sub.leading()
    exps = {v: e1 - e2 for v, e1, e2 in zip(CHART_VARS, e_chart, e_sub)}
    factor = ExactPoly.monomial(CHART_VARS, exps, c_chart / c_sub)
    diff = sub * factor - chart
    if diff.is_zero():
        return SubstitutionReport(True, factor)
    return SubstitutionReport(False, None, diff)


# ---------------------------------------------------------------------------
# fibre equations; generic in the number type (Fraction or mpmath)


def _tpow(k, t):
    return t ** (2 * k + 1)


def delta1(k, a, t):
    return 4 * a * _tpow(k, t) + 1


def delta2(k, a, t):
    return a * a * t ** (4 * k + 2) - 4 * t * delta1(k, a, t) ** 2


def w_hat(k, x1, x2, y1, y2, t, a):
    """Weighted homogeneous closure of W in the fibration chart."""
    T = _tpow(k, t)
    return -a * T * y1**2 + y1 * y2 + y2**2 + x1**4 - x1 * x2 * y2 + t * x2**4


def w_hat_gradient(k, x1, x2, y1, y2, t, a):
    T = _tpow(k, t)
    return [
        4 * x1**3 - x2 * y2,
        -x1 * y2 + 4 * t * x2**3,
        -2 * a * T * y1 + y2,
        y1 + 2 * y2 - x1 * x2,
    ]


def w_diagonal(k, x1, x2, y1, y2, t, a):
    """Fibre equation after completing the square (valid off delta1 = 0)."""
    T = _tpow(k, t)
    d1 = delta1(k, a, t)
    return -d1 * y1**2 + y2**2 + x1**4 + t * x2**4 - a * T / d1 * (x1 * x2) ** 2


def new_coordinates(k, x1, x2, y1, y2, t, a, wrong_sign=False):
    """Diagonalising coordinates (y1', y2') expressed through the old ones."""
    d1 = delta1(k, a, t)
    s = -1 if wrong_sign else 1
    return y1 / 2 - s * x1 * x2 / (2 * d1), y1 / 2 + y2 - x1 * x2 / 2


@dataclass
class CoordChangeReport:
    result: IdentityResult
    substituted_into_w_hat: IdentityResult

    @property
    def equal(self) -> bool:
        return self.result.equal

    def __bool__(self):
        return self.equal


def coordchange_check(k: int, seed: int = 0, trials: int = 20, wrong_sign: bool = False) -> CoordChangeReport:
    """w_diagonal(x, y'(x, y)) == w_hat(x, y) at random exact points.

    The change of coordinates defines the new y' through the old y, so it is
    the diagonal form that gets pulled back.  The opposite reading
    (substituting into w_hat) is evaluated too and reported.
    """
    _check_k(k)

    def pulled_back(pt):
        x1, x2, y1, y2, t, a = pt
        n1, n2 = new_coordinates(k, x1, x2, y1, y2, t, a, wrong_sign)
        return w_diagonal(k, x1, x2, n1, n2, t, a)

    def original(pt):
        return w_hat(k, *pt)

    def hat_substituted(pt):
        x1, x2, y1, y2, t, a = pt
        n1, n2 = new_coordinates(k, x1, x2, y1, y2, t, a, wrong_sign)
        return w_hat(k, x1, x2, n1, n2, t, a)

    def diagonal(pt):
        return w_diagonal(k, *pt)

    main = random_identity(pulled_back, original, FIBRE_VARS, trials=trials, seed=seed)
    other = random_identity(hat_substituted, diagonal, FIBRE_VARS, trials=trials, seed=seed)
    return CoordChangeReport(main, other)


# ---------------------------------------------------------------------------
# special points and lines


@dataclass
class FiberGeometry:
    t_value: object
    delta1: object
    delta2: object
    mode: str
    special_points: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    gradient_residuals: dict = field(default_factory=dict)
    nu_plus: object = None
    nu_minus: object = None
    tolerance: object = None
    alternate_residuals: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        vals = list(self.residuals.values()) + list(self.gradient_residuals.values())
        return all(v < self.tolerance for v in vals)


def _to_mp(x):
    """Fraction, int, str or mpmath value to an mpmath number at the current precision."""
    if isinstance(x, (Fraction, int)):
        x = as_scalar(x)
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpmathify(x)


def _cnorm(vals):
    return max(abs(v) for v in vals)


def delta_roots(k: int, a, which: str, prec: int = 256) -> list:
    """Non-zero roots of delta1 or delta2 in t, sorted by argument."""
    with mpmath.workprec(prec):
        a = _to_mp(a)
        n = 2 * k + 1
        if which == "delta1":
            base = mpmath.root(-1 / (4 * mpmath.mpc(a)), n)
            roots = [base * mpmath.expj(2 * mpmath.pi * j / n) for j in range(n)]
        elif which == "delta2":
            # delta2 / t, lowest degree first
            d1sq = [0] * (2 * n + 1)
            d1sq[0] = 1
            d1sq[n] = 8 * a
            d1sq[2 * n] = 16 * a * a
            coeffs = [-4 * c for c in d1sq]
            coeffs[4 * k + 1] += a * a
            deg = len(coeffs) - 1
            rad = abs(mpmath.mpf(coeffs[0]) / coeffs[-1]) ** (mpmath.mpf(1) / deg)
            seeds = [rad * mpmath.expj(2 * mpmath.pi * j / deg + 0.3) for j in range(deg)]
            roots, _ = aberth(coeffs, seeds, prec)
        else:
            raise ValueError("which must be 'delta1' or 'delta2'")
        return sorted(roots, key=lambda z: (float(mpmath.arg(z)), float(abs(z))))


def nu_squares(k, a, t):
    T = _tpow(k, t)
    d1 = delta1(k, a, t)
    r = mpmath.sqrt(delta2(k, a, t))
    return (a * T + r) / (2 * d1), (a * T - r) / (2 * d1)


def fiber_special_points(k: int, a, which: str = "regular", t=None, precision_bits: int = 256,
                         root_index: int = 0) -> FiberGeometry:
    """Special points of a fibre together with their residuals.

    regular:  p_t+- = (0:0:1:+-sqrt(delta1)) and q_t+- = (nu_+- : 1 : 0 : 0)
              in the diagonal coordinates.
    delta1_root: p_t = (0:0:-2:1) in the w_hat coordinates.
    delta2_root: q_t = (s : 1 : s/delta1 : 2 a t^(2k+1) s/delta1), s^2 = a t^(2k+1)/(2 delta1).

    ``alternate_residuals`` records residuals of the competing coordinate
    readings (y2 = +-sqrt(delta1)/2 for p_t, (1 : sqrt(2 delta1/(a T)) : ...) for q_t)
    so it is visible that they do not lie on the fibre.
    """
    _check_k(k)
    with mpmath.workprec(precision_bits):
        a = _to_mp(a)
        tol = mpmath.mpf(2) ** (-precision_bits // 4)
        if which == "regular":
            if t is None:
                raise ValueError("regular mode needs t")
            t = mpmath.mpc(_to_mp(t))
        else:
            t = delta_roots(k, a, "delta1" if which == "delta1_root" else "delta2", precision_bits)[root_index]
        d1, d2 = delta1(k, a, t), delta2(k, a, t)
        geo = FiberGeometry(t, d1, d2, which, tolerance=tol)
        T = _tpow(k, t)
        if which == "regular":
            if abs(d1) < tol or abs(d2) < tol:
                raise ValueError("t is not regular: delta(t) = 0")
            sd1 = mpmath.sqrt(d1)
            nup2, num2 = nu_squares(k, a, t)
            geo.nu_plus, geo.nu_minus = mpmath.sqrt(nup2), mpmath.sqrt(num2)
            pts = {
                "p+": (0, 0, 1, sd1),
                "p-": (0, 0, 1, -sd1),
                "q+": (geo.nu_plus, 1, 0, 0),
                "q-": (geo.nu_minus, 1, 0, 0),
            }
            for name, pt in pts.items():
                geo.special_points[name] = pt
                geo.residuals[name] = abs(w_diagonal(k, *pt, t, a))
            for sign, name in ((1, "p+"), (-1, "p-")):
                geo.alternate_residuals[name] = abs(w_diagonal(k, 0, 0, 1, sign * sd1 / 2, t, a))
        elif which == "delta1_root":
            pt = (0, 0, -2, 1)
            geo.special_points["p"] = pt
            geo.residuals["p"] = abs(w_hat(k, *pt, t, a))
            geo.gradient_residuals["p"] = _cnorm(w_hat_gradient(k, *pt, t, a))
        elif which == "delta2_root":
            s = mpmath.sqrt(a * T / (2 * d1))
            pt = (s, 1, s / d1, 2 * a * T * s / d1)
            geo.special_points["q"] = pt
            geo.residuals["q"] = abs(w_hat(k, *pt, t, a))
            geo.gradient_residuals["q"] = _cnorm(w_hat_gradient(k, *pt, t, a))
            alt = (1, mpmath.sqrt(2 * d1 / (a * T)), 1 / d1, 2 * a * T / d1)
            geo.alternate_residuals["q"] = abs(w_hat(k, *alt, t, a))
            geo.alternate_residuals["q_gradient"] = _cnorm(w_hat_gradient(k, *alt, t, a))
        else:
            raise ValueError(f"unknown mode {which!r}")
        return geo


@dataclass
class LinesReport:
    residuals: dict
    nu_gap: object
    collision: bool
    tolerance: object

    @property
    def ok(self) -> bool:
        return all(max(v) < self.tolerance for v in self.residuals.values())


LINE_SAMPLES = ((1, 0), (1, 1), (1, -2), (1, mpmath.mpc(1, 3) / 3), (0, 1))


def lines_on_fiber(k: int, a, t, precision_bits: int = 256) -> LinesReport:
    """The four curves y2 = +-sqrt(delta1) y1, x1^2 = nu_+-^2 x2^2 on a fibre.

    Each curve is sampled at five points (x1, x2, y1, y2) = (nu x2, x2, y1, +-sqrt(delta1) y1).
    """
    with mpmath.workprec(precision_bits):
        a = _to_mp(a)
        t = mpmath.mpc(_to_mp(t))
        tol = mpmath.mpf(2) ** (-precision_bits // 4)
        d1 = delta1(k, a, t)
        sd1 = mpmath.sqrt(d1)
        nup2, num2 = nu_squares(k, a, t)
        nus = {"+": mpmath.sqrt(nup2), "-": mpmath.sqrt(num2)}
        lines = {"C1": (1, "+"), "C2": (1, "-"), "C3": (-1, "+"), "C4": (-1, "-")}
        res = {}
        for name, (sign, which) in lines.items():
            vals = []
            for x2, y1 in LINE_SAMPLES:
                pt = (nus[which] * x2, x2, y1, sign * sd1 * y1)
                vals.append(abs(w_diagonal(k, *pt, t, a)))
            res[name] = vals
        gap = abs(nup2 - num2)
        collision = gap < mpmath.mpf(2) ** (-precision_bits // 8) * max(1, abs(nup2))
        return LinesReport(res, gap, bool(collision), tol)


# ---------------------------------------------------------------------------
# point counts on the torus


BRUTE_MAX_Q = 11


def _square_table(q):
    chi = [-1] * q
    chi[0] = 0
    for x in range(1, q):
        chi[x * x % q] = 1
    return chi


def count_W(k: int, alpha, q: int, method: str = "char") -> int:
    """#{u in (F_q^*)^4 : u1+u2+u3+u4-1 = alpha^-1 u1^2 u2^n u3^n u4^(4k+1)}, n = 2k+1."""
    _check_k(k)
    if not is_odd_prime(q):
        raise ValueError(f"q={q} must be an odd prime")
    al = reduce_mod(alpha, q)
    if al == 0:
        raise ValueError("alpha vanishes mod q")
    a = pow(al, -1, q)
    n = 2 * k + 1
    e4 = 4 * k + 1
    if method == "brute":
        if q > BRUTE_MAX_Q:
            raise ValueError(f"brute force is capped at q <= {BRUTE_MAX_Q}")
        total = 0
        units = range(1, q)
        for u1 in units:
            for u2 in units:
                for u3 in units:
                    for u4 in units:
                        lhs = u1 + u2 + u3 + u4 - 1
                        rhs = a * u1 * u1 * pow(u2, n, q) * pow(u3, n, q) * pow(u4, e4, q)
                        total += (lhs - rhs) % q == 0
        return total
    if method != "char":
        raise ValueError(f"unknown method {method!r}")
    # alpha*(u1 + s - 1) - M u1^2 = 0 with M = u2^n u3^n u4^e4: a quadratic in u1
    chi = _square_table(q)
    pw_n = [pow(u, n, q) for u in range(q)]
    pw_e = [pow(u, e4, q) for u in range(q)]
    al2 = al * al % q
    total = 0
    for u2 in range(1, q):
        for u3 in range(1, q):
            m23 = pw_n[u2] * pw_n[u3] % q
            for u4 in range(1, q):
                M = m23 * pw_e[u4] % q
                s1 = (u2 + u3 + u4 - 1) % q
                total += 1 + chi[(al2 + 4 * M * al * s1) % q]
                if s1 == 0:
                    total -= 1  # the root u1 = 0 is not a torus point
    return total


# ---------------------------------------------------------------------------
# conic bundle


CONIC_VARS = ("x1", "y1", "y2", "t", "d")


def w_prime_chart(k, v1, z1, z2, t, a, d1):
    return -z1**2 + d1 * z2**2 + v1 * (d1 * v1**2 - a * _tpow(k, t) * v1 + t * d1)


def w_hat_affine(k, x1, y1, y2, t, a, d1):
    """The fibration chart x2 = 1 of the diagonal form."""
    return -d1 * y1**2 + y2**2 + x1**4 - a * _tpow(k, t) / d1 * x1**2 + t


@dataclass
class ConicBundleReport:
    result: IdentityResult
    x1_exponent: int | None
    delta1_exponent: int | None
    constant: Fraction | None

    @property
    def equal(self) -> bool:
        return self.result.equal

    def __bool__(self):
        return self.equal


def conic_bundle_check(k: int, seed: int = 0, trials: int = 20, drop_delta1: bool = False) -> ConicBundleReport:
    """Pull back the conic-bundle chart along v1 = x1^2, z1 = delta1 x1 y1, z2 = x1 y2.

    Samples are drawn in (x1, y1, y2, t, delta1) and a is recovered as
    (delta1 - 1)/(4 t^(2k+1)); with delta1 promoted to a coordinate the
    expected factor x1^e delta1^f is a monomial and is found by the generic
    monomial-factor search.
    """
    _check_k(k)

    def unpack(pt):
        x1, y1, y2, t, d1 = pt
        a = (d1 - 1) / (4 * _tpow(k, t))
        return x1, y1, y2, t, a, d1

    def pulled_back(pt):
        x1, y1, y2, t, a, d1 = unpack(pt)
        z1 = (1 if drop_delta1 else d1) * x1 * y1
        return w_prime_chart(k, x1 * x1, z1, x1 * y2, t, a, d1)

    def affine(pt):
        return w_hat_affine(k, *unpack(pt))

    res = random_identity(pulled_back, affine, CONIC_VARS, allow_monomial_factor=True,
                          trials=trials, seed=seed)
    if res.equal and res.factor is not None:
        exps, c = res.factor.leading()
        if not any(exps[1:4]):
            return ConicBundleReport(res, exps[0], exps[4], c)
    return ConicBundleReport(res, None, None, None)
