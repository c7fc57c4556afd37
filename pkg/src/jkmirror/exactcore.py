"""Exact arithmetic substrate.

Rationals are :class:`fractions.Fraction`, big complex floats are
:mod:`mpmath` values evaluated under an explicit ``workprec``.  On top of
those this module provides sparse Laurent polynomials with rational
coefficients, signed multisets of residues mod 1, and seeded randomized
identity testing (Schwartz-Zippel style, exact per sample).
"""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import mpmath

Scalar = Fraction

# exponents are plain ints; this bound stands in for a machine-word check
MAX_EXPONENT = 2**31 - 1

SAMPLE_BOUND = 10**4
DEFAULT_TRIALS = 20


def as_scalar(x) -> Fraction:
    """Coerce int / str / Fraction (or anything Fraction accepts) exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a string or Fraction")
    return Fraction(x)


def binomial_general(top, n: int) -> Fraction:
    """Generalised binomial coefficient top*(top-1)*...*(top-n+1)/n!."""
    if n < 0:
        raise ValueError("n must be non-negative")
    top = as_scalar(top)
    num = Fraction(1)
    for i in range(n):
        num *= (top - i) / (i + 1)
    return num


def central_binomial_half(n: int) -> Fraction:
    """binom(-1/2, n) via the closed form (-1)^n C(2n, n) / 4^n."""
    from math import comb

    return Fraction((-1) ** n * comb(2 * n, n), 4**n)


# ---------------------------------------------------------------------------
# big complex values


def to_mpc(re, im=0, prec: int = 256) -> mpmath.mpc:
    """Round an exact (re, im) pair once to ``prec`` bits."""
    if prec < 64:
        raise ValueError("precision_bits must be >= 64")
    re, im = as_scalar(re), as_scalar(im)
    with mpmath.workprec(prec):
        r = mpmath.mpf(re.numerator) / re.denominator
        i = mpmath.mpf(im.numerator) / im.denominator
        return mpmath.mpc(r, i)


def parse_exact(text: str) -> Fraction:
    """Parse a decimal string such as '1e-3' or '-0.25' exactly."""
    return Fraction(text.strip())


def parse_complex(text: str) -> tuple[Fraction, Fraction]:
    """Parse 're' or 're,im' into an exact pair."""
    parts = text.split(",")
    if len(parts) == 1:
        return parse_exact(parts[0]), Fraction(0)
    if len(parts) == 2:
        return parse_exact(parts[0]), parse_exact(parts[1])
    raise ValueError(f"cannot parse complex value {text!r}")


# ---------------------------------------------------------------------------
# Laurent polynomials


def _check_exponents(e: tuple[int, ...]) -> tuple[int, ...]:
    for x in e:
        if abs(x) > MAX_EXPONENT:
            raise OverflowError(f"exponent {x} out of range")
    return e


class ExactPoly:
    """Sparse Laurent polynomial over Q in an ordered list of variables.

    Immutable by convention; every arithmetic operation returns a new
    normalised instance (zero coefficients dropped).
    """

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple, object] = ()):
        self.variables = tuple(variables)
        n = len(self.variables)
        clean: dict[tuple[int, ...], Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for e, c in items:
            e = _check_exponents(tuple(int(x) for x in e))
            if len(e) != n:
                raise ValueError(f"exponent {e} does not match variables {self.variables}")
            c = as_scalar(c)
            if c:
                s = clean.get(e, Fraction(0)) + c
                if s:
                    clean[e] = s
                else:
                    clean.pop(e, None)
        self.terms = clean

    # constructors ---------------------------------------------------------
    @classmethod
    def const(cls, variables, c) -> "ExactPoly":
        return cls(variables, {(0,) * len(tuple(variables)): c})

    @classmethod
    def var(cls, variables, name: str) -> "ExactPoly":
        variables = tuple(variables)
        e = tuple(1 if v == name else 0 for v in variables)
        if name not in variables:
            raise KeyError(name)
        return cls(variables, {e: 1})

    @classmethod
    def monomial(cls, variables, exponents: Mapping[str, int], coeff=1) -> "ExactPoly":
        variables = tuple(variables)
        e = tuple(int(exponents.get(v, 0)) for v in variables)
        return cls(variables, {e: coeff})

    @classmethod
    def gens(cls, *names: str) -> list["ExactPoly"]:
        return [cls.var(names, n) for n in names]

    # helpers ----------------------------------------------------------------
    def _coerce(self, other) -> "ExactPoly":
        if isinstance(other, ExactPoly):
            if other.variables != self.variables:
                raise ValueError(
                    f"variable mismatch {self.variables} vs {other.variables}"
                )
            return other
        return ExactPoly.const(self.variables, other)

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def leading(self) -> tuple[tuple[int, ...], Fraction]:
        """Lex-largest term; compatible with multiplication by monomials."""
        e = max(self.terms)
        return e, self.terms[e]

    def degree(self, name: str) -> int:
        i = self.variables.index(name)
        return max(e[i] for e in self.terms) if self.terms else -1

    def min_degree(self, name: str) -> int:
        i = self.variables.index(name)
        return min(e[i] for e in self.terms) if self.terms else 0

    def coefficient(self, exponents: Mapping[str, int]) -> Fraction:
        e = tuple(int(exponents.get(v, 0)) for v in self.variables)
        return self.terms.get(e, Fraction(0))

    def __len__(self):
        return len(self.terms)

    # arithmetic ----------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return ExactPoly(self.variables, out)

    __radd__ = __add__

    def __neg__(self):
        return ExactPoly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return ExactPoly(self.variables, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        """Division by a scalar or by a monomial only."""
        other = self._coerce(other)
        if not other.is_monomial():
            raise ValueError("can only divide by a monomial")
        (e, c), = other.terms.items()
        inv = ExactPoly(self.variables, {tuple(-x for x in e): 1 / c})
        return self * inv

    def __pow__(self, n: int):
        if n < 0:
            if not self.is_monomial():
                raise ValueError("negative powers only for monomials")
            (e, c), = self.terms.items()
            return ExactPoly(self.variables, {tuple(x * n for x in e): c**n})
        result = ExactPoly.const(self.variables, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, ExactPoly):
            return self.variables == other.variables and self.terms == other.terms
        try:
            return self == ExactPoly.const(self.variables, other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.variables, frozenset(self.terms.items())))

    # evaluation / structure ---------------------------------------------
    def evaluate(self, point):
        """Evaluate at a mapping name->value or a sequence in variable order.

        Values may be Fractions, ints or mpmath numbers.  A zero value for a
        variable carrying a negative exponent raises ZeroDivisionError.
        """
        if isinstance(point, Mapping):
            vals = [point[v] for v in self.variables]
        else:
            vals = list(point)
        total = 0
        for e, c in self.terms.items():
            term = c if not _is_mp(vals) else mpmath.mpf(c.numerator) / c.denominator
            for v, x in zip(vals, e):
                if x:
                    if x < 0 and v == 0:
                        raise ZeroDivisionError("pole of Laurent polynomial")
                    term = term * v**x
            total = total + term
        return total

    def partial(self, name: str, value) -> "ExactPoly":
        """Specialise one variable to an exact value; the variable is dropped."""
        i = self.variables.index(name)
        value = as_scalar(value)
        rest = self.variables[:i] + self.variables[i + 1 :]
        out: dict = {}
        for e, c in self.terms.items():
            if e[i] < 0 and value == 0:
                raise ZeroDivisionError("pole of Laurent polynomial")
            ne = e[:i] + e[i + 1 :]
            out[ne] = out.get(ne, Fraction(0)) + c * value ** e[i]
        return ExactPoly(rest, out)

    def derivative(self, name: str) -> "ExactPoly":
        i = self.variables.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = e[:i] + (e[i] - 1,) + e[i + 1 :]
                out[ne] = c * e[i]
        return ExactPoly(self.variables, out)

    def extend(self, variables: Sequence[str]) -> "ExactPoly":
        """Re-embed into a larger (or reordered) variable list."""
        variables = tuple(variables)
        idx = {v: i for i, v in enumerate(self.variables)}
        for v in self.variables:
            if v not in variables:
                e_nonzero = any(e[idx[v]] for e in self.terms)
                if e_nonzero:
                    raise ValueError(f"variable {v} is used and cannot be dropped")
        out = {}
        for e, c in self.terms.items():
            out[tuple(e[idx[v]] if v in idx else 0 for v in variables)] = c
        return ExactPoly(variables, out)

    def univariate_coeffs(self, name: str) -> list[Fraction]:
        """Dense coefficient list (highest degree first) of a univariate poly."""
        if len(self.variables) != 1 or self.variables[0] != name:
            raise ValueError("not univariate in " + name)
        if self.is_zero():
            return [Fraction(0)]
        if self.min_degree(name) < 0:
            raise ValueError("negative exponents in univariate coefficient list")
        d = self.degree(name)
        return [self.terms.get((i,), Fraction(0)) for i in range(d, -1, -1)]

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                v if x == 1 else f"{v}^{x}" for v, x in zip(self.variables, e) if x
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _is_mp(vals) -> bool:
    return any(isinstance(v, (mpmath.mpf, mpmath.mpc)) for v in vals)


def laurent_substitute(p: ExactPoly, images: Mapping[str, ExactPoly]) -> ExactPoly:
    """Replace each variable of ``p`` by a Laurent monomial and expand."""
    missing = [v for v in p.variables if v not in images]
    if missing:
        raise KeyError(f"no image for {missing}")
    targets = None
    for v in p.variables:
        img = images[v]
        if not isinstance(img, ExactPoly) or not img.is_monomial():
            raise ValueError(f"image of {v} is not a single monomial")
        if targets is None:
            targets = img.variables
        elif img.variables != targets:
            raise ValueError("images must share one variable list")
    if targets is None:
        return ExactPoly((), p.terms)
    imgs = [next(iter(images[v].terms.items())) for v in p.variables]
    out: dict = {}
    for e, c in p.terms.items():
        coeff = c
        exp = [0] * len(targets)
        for (ie, ic), x in zip(imgs, e):
            if x:
                coeff *= ic**x
                for j, y in enumerate(ie):
                    exp[j] += y * x
        key = tuple(exp)
        out[key] = out.get(key, Fraction(0)) + coeff
    return ExactPoly(targets, out)


# ---------------------------------------------------------------------------
# signed multisets of residues mod 1


def _mod1(x) -> Fraction:
    x = as_scalar(x)
    return x - (x.numerator // x.denominator)


class SignedMultiset:
    """Multiset of rationals reduced into [0, 1) with signed multiplicities."""

    __slots__ = ("entries",)

    def __init__(self, entries: Mapping | Iterable = ()):
        c: Counter = Counter()
        if isinstance(entries, Mapping):
            for k, m in entries.items():
                c[_mod1(k)] += int(m)
        else:
            for k in entries:
                c[_mod1(k)] += 1
        self.entries = {k: m for k, m in c.items() if m}

    def __sub__(self, other: "SignedMultiset") -> "SignedMultiset":
        return multiset_difference(self, other)

    def __add__(self, other: "SignedMultiset") -> "SignedMultiset":
        c = Counter(self.entries)
        c.update(other.entries)
        return SignedMultiset(c)

    def intersection(self, other: "SignedMultiset") -> "SignedMultiset":
        """Pointwise minimum of the positive parts."""
        out = {}
        for k, m in self.entries.items():
            n = other.entries.get(k, 0)
            if m > 0 and n > 0:
                out[k] = min(m, n)
        return SignedMultiset(out)

    def size(self) -> int:
        return sum(self.entries.values())

    def is_nonnegative(self) -> bool:
        return all(m > 0 for m in self.entries.values())

    def elements(self) -> list[Fraction]:
        """Sorted expansion; only meaningful for non-negative multisets."""
        out = []
        for k in sorted(self.entries):
            out.extend([k] * max(self.entries[k], 0))
        return out

    def __eq__(self, other):
        return isinstance(other, SignedMultiset) and self.entries == other.entries

    def __hash__(self):
        return hash(frozenset(self.entries.items()))

    def __repr__(self):
        inner = ", ".join(f"{k}:{m}" for k, m in sorted(self.entries.items()))
        return "{" + inner + "}"


def multiset_difference(a: SignedMultiset, b: SignedMultiset) -> SignedMultiset:
    c = Counter(a.entries)
    c.subtract(b.entries)
    return SignedMultiset(c)


# ---------------------------------------------------------------------------
# randomized identity testing


def random_rational(rng: random.Random, bound: int = SAMPLE_BOUND) -> Fraction:
    num = rng.randint(-bound, bound)
    while num == 0:
        num = rng.randint(-bound, bound)
    return Fraction(num, rng.randint(1, bound))


def sample_point(rng: random.Random, n: int, bound: int = SAMPLE_BOUND) -> list[Fraction]:
    return [random_rational(rng, bound) for _ in range(n)]


@dataclass
class IdentityResult:
    status: str  # "equal" | "not_equal" | "inconclusive"
    factor: ExactPoly | None = None
    samples_used: int = 0
    excluded: int = 0
    witness: list | None = field(default=None, repr=False)

    @property
    def equal(self) -> bool:
        return self.status == "equal"

    @property
    def inconclusive(self) -> bool:
        return self.status == "inconclusive"


def _power_of_two_exponent(r: Fraction) -> int | None:
    if r <= 0:
        return None
    n, d = r.numerator, r.denominator
    if d == 1 and n & (n - 1) == 0:
        return n.bit_length() - 1
    if n == 1 and d & (d - 1) == 0:
        return -(d.bit_length() - 1)
    return None


def identity_check_random(
    lhs: ExactPoly,
    rhs: ExactPoly,
    allow_monomial_factor: bool = False,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
) -> IdentityResult:
    """Compare two Laurent polynomials at seeded random rational points.

    With ``allow_monomial_factor`` the check looks for c * prod(x_i^e_i)
    with lhs = factor * rhs at every sample.  Each sample is exact, so a
    reported mismatch is a proof of inequality.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if lhs.variables != rhs.variables:
        raise ValueError("lhs and rhs must share a variable list")
    names = lhs.variables
    return random_identity(
        lambda pt: lhs.evaluate(pt),
        lambda pt: rhs.evaluate(pt),
        names,
        allow_monomial_factor=allow_monomial_factor,
        trials=trials,
        seed=seed,
    )


def random_identity(
    lhs: Callable[[list], Fraction],
    rhs: Callable[[list], Fraction],
    names: Sequence[str],
    allow_monomial_factor: bool = False,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    max_attempts: int | None = None,
) -> IdentityResult:
    """Callable version of :func:`identity_check_random`.

    ``lhs``/``rhs`` take a list of Fractions (one per name).  Points where
    either side raises ZeroDivisionError are excluded and resampled.
    """
    rng = random.Random(seed)
    n = len(names)
    max_attempts = max_attempts or 10 * trials
    factor_exp: tuple[int, ...] | None = None
    factor_c: Fraction | None = None
    used = excluded = 0

    def ev(pt):
        return as_scalar(lhs(pt)), as_scalar(rhs(pt))

    attempts = 0
    while used < trials and attempts < max_attempts:
        attempts += 1
        pt = sample_point(rng, n)
        try:
            lv, rv = ev(pt)
        except ZeroDivisionError:
            excluded += 1
            continue
        if not allow_monomial_factor:
            used += 1
            if lv != rv:
                return IdentityResult("not_equal", None, used, excluded, pt)
            continue
        if rv == 0:
            if lv != 0:
                return IdentityResult("not_equal", None, used + 1, excluded, pt)
            excluded += 1
            continue
        ratio = lv / rv
        if factor_exp is None:
            exps = []
            ok = True
            for i in range(n):
                pt2 = list(pt)
                pt2[i] = 2 * pt2[i]
                try:
                    l2, r2 = ev(pt2)
                except ZeroDivisionError:
                    ok = False
                    break
                if r2 == 0:
                    ok = False
                    break
                if ratio == 0:
                    if l2 != 0:
                        return IdentityResult("not_equal", None, used + 1, excluded, pt)
                    exps.append(0)
                    continue
                e = _power_of_two_exponent((l2 / r2) / ratio)
                if e is None:
                    return IdentityResult("not_equal", None, used + 1, excluded, pt)
                exps.append(e)
            if not ok:
                excluded += 1
                continue
            factor_exp = tuple(exps)
            mono = Fraction(1)
            for x, e in zip(pt, factor_exp):
                mono *= x**e
            factor_c = ratio / mono
        mono = Fraction(1)
        for x, e in zip(pt, factor_exp):
            mono *= x**e
        used += 1
        if lv != factor_c * mono * rv:
            return IdentityResult("not_equal", None, used, excluded, pt)
    if used == 0:
        return IdentityResult("inconclusive", None, 0, excluded)
    if used < trials:
        return IdentityResult("inconclusive", None, used, excluded)
    factor = None
    if allow_monomial_factor:
        factor = ExactPoly(tuple(names), {factor_exp: factor_c})
    return IdentityResult("equal", factor, used, excluded)
