"""Exact polyhedral computations: vertices, normal fans, and the MMP with scaling.

A polytope is stored by its facet inequalities <rho_i, m> >= -a_i.  Vertices
come from solving every square subsystem exactly; everything is Fraction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations
from math import gcd

from .hypergeom import _check_k


class UnboundedPolyhedron(ValueError):
    pass


# ---------------------------------------------------------------------------
# exact linear algebra


def _rref(rows):
    m = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows) -> int:
    if not rows:
        return 0
    return len(_rref(rows)[1])


def solve_exact(A, b):
    """Unique solution of A x = b for square A, or None if A is singular."""
    n = len(A)
    aug = [list(row) + [rhs] for row, rhs in zip(A, b)]
    m, piv = _rref(aug)
    if piv != list(range(n)):
        return None
    return tuple(m[i][n] for i in range(n))


def nullspace(rows, dim):
    """Basis of {x : rows . x = 0}."""
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)]
    m, piv = _rref(rows)
    free = [c for c in range(dim) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * dim
        v[f] = Fraction(1)
        for i, p in enumerate(piv):
            v[p] = -m[i][f]
        basis.append(tuple(v))
    return basis


def primitive(v) -> tuple[int, ...]:
    """Primitive integer vector on the ray through a rational vector."""
    v = [Fraction(x) for x in v]
    den = reduce(lambda a, b: a * b // gcd(a, b), (x.denominator for x in v), 1)
    ints = [int(x * den) for x in v]
    g = reduce(gcd, (abs(x) for x in ints), 0)
    if g == 0:
        raise ValueError("zero vector has no primitive generator")
    return tuple(x // g for x in ints)


def _dot(u, v):
    return sum(Fraction(a) * b for a, b in zip(u, v))


# ---------------------------------------------------------------------------
# polytopes and fans


@dataclass
class LatticePolytope:
    ambient_dim: int
    facets: list  # [(normal tuple, offset Fraction)]: <normal, m> >= -offset
    labels: list = None  # 1-based facet names, parallel to facets

    def __post_init__(self):
        self.facets = [(tuple(int(x) for x in n), Fraction(a)) for n, a in self.facets]
        if any(len(n) != self.ambient_dim for n, _ in self.facets):
            raise ValueError("normal length must equal ambient_dim")
        if self.labels is None:
            self.labels = list(range(1, len(self.facets) + 1))
        self._vertices = None

    @property
    def vertices(self) -> list:
        if self._vertices is None:
            self._vertices = vertices_from_facets(self)
        return self._vertices

    def contains(self, m) -> bool:
        return all(_dot(n, m) >= -a for n, a in self.facets)

    def active(self, m) -> list[int]:
        """Positions of the inequalities that are tight at m."""
        return [i for i, (n, a) in enumerate(self.facets) if _dot(n, m) == -a]

    def affine_dim(self) -> int:
        vs = self.vertices
        if not vs:
            return -1
        return rank([[x - y for x, y in zip(v, vs[0])] for v in vs[1:]]) if len(vs) > 1 else 0

    def supporting_facets(self) -> list[int]:
        """Positions of inequalities that cut out a facet (codim-1 face)."""
        d = self.affine_dim()
        tight = {v: set(self.active(v)) for v in self.vertices}
        out = []
        for i in range(len(self.facets)):
            on = [v for v in self.vertices if i in tight[v]]
            if len(on) >= d and on:
                if rank([[x - y for x, y in zip(v, on[0])] for v in on[1:]]) == d - 1:
                    out.append(i)
        return out


def vertices_from_facets(p: LatticePolytope) -> list[tuple]:
    """All vertices, lexicographically sorted; raises on unbounded nonempty input."""
    dim = p.ambient_dim
    normals = [n for n, _ in p.facets]
    found = set()
    for subset in combinations(range(len(p.facets)), dim):
        A = [normals[i] for i in subset]
        b = [-p.facets[i][1] for i in subset]
        x = solve_exact(A, b)
        if x is not None and p.contains(x):
            found.add(x)
    verts = sorted(found)
    if verts and _has_recession_direction(normals, dim):
        raise UnboundedPolyhedron("polyhedron has a recession direction")
    if not verts and rank(normals) < dim:
        raise UnboundedPolyhedron("inequalities do not determine a pointed polyhedron")
    return verts


def _has_recession_direction(normals, dim) -> bool:
    if rank(normals) < dim:
        return True
    for subset in combinations(range(len(normals)), dim - 1):
        ns = nullspace([normals[i] for i in subset], dim)
        if len(ns) != 1:
            continue
        d = ns[0]
        for s in (1, -1):
            if all(s * _dot(n, d) >= 0 for n in normals):
                return True
    return False


@dataclass
class Fan:
    rays: list  # primitive integer vectors
    maximal_cones: list  # frozensets of ray indices
    ray_labels: list = field(default_factory=list)  # facet labels, parallel to rays
    lineality_dim: int = 0
    lineality_functional: tuple | None = None

    def __post_init__(self):
        for r in self.rays:
            if reduce(gcd, (abs(x) for x in r), 0) != 1:
                raise ValueError(f"ray {r} is not primitive")
        seen = []
        for c in self.maximal_cones:
            if c not in seen:
                seen.append(c)
        self.maximal_cones = seen

    def labelled_cones(self) -> set[frozenset]:
        return {frozenset(self.ray_labels[i] for i in c) for c in self.maximal_cones}


def normal_fan(p: LatticePolytope) -> Fan:
    """One maximal cone per vertex, spanned by the normals of the facets through it.

    For a polytope that is not full-dimensional the cones are reported with
    a lineality dimension; for a segment the dividing functional is given.
    """
    verts = p.vertices
    if not verts:
        raise ValueError("empty polytope has no normal fan")
    d = p.affine_dim()
    if d < p.ambient_dim:
        fan = Fan([], [], [], lineality_dim=p.ambient_dim - d)
        if d == 1:
            fan.lineality_functional = primitive([x - y for x, y in zip(verts[1], verts[0])])
        return fan
    support = set(p.supporting_facets())
    rays, labels, index = [], [], {}
    cones = []
    for v in verts:
        cone = set()
        for i in p.active(v):
            if i not in support:
                continue
            r = primitive(p.facets[i][0])
            if r not in index:
                index[r] = len(rays)
                rays.append(r)
                labels.append(p.labels[i])
            cone.add(index[r])
        cones.append(frozenset(cone))
    return Fan(rays, cones, labels)


# ---------------------------------------------------------------------------
# the Newton polytope P of the torus equation and its scaled family


def jk_facets(k: int) -> list:
    """The eight facet pairs (rho_i, a_i) of P."""
    _check_k(k)
    e = 4 * k + 1
    return [
        ((1, 0, 0, 0), 0),
        ((0, 1, 0, 0), 0),
        ((0, 0, 1, 0), 0),
        ((0, 0, 0, 1), 0),
        ((e, -1, -1, -1), 1),
        ((-1, 3, -1, -1), 1),
        ((-1, -1, 3, -1), 1),
        ((-e, -e, -e, 4 * k + 3), e),
    ]


def jk_polytope(k: int) -> LatticePolytope:
    return LatticePolytope(4, jk_facets(k))


def extra_rays(k: int) -> list:
    """Rays added by the partial resolution.

    rho_9 = (rho_5 + rho_8)/(4k+2), a_9 = 1, and the weighted blow-up ray
    rho_10 = (2k rho_8 + rho_4)/(4k+1) = (-2k,-2k,-2k,2k+1), a_10 = 2k.
    """
    return [((0, -1, -1, 1), 1), ((-2 * k, -2 * k, -2 * k, 2 * k + 1), 2 * k)]


def epsilon_facets(k: int, a9=1, with_blowup: bool = True) -> list:
    nine, ten = extra_rays(k)
    fac = jk_facets(k) + [(nine[0], a9)]
    if with_blowup:
        fac.append(ten)
    return fac


def epsilon_polytope(k: int, eps, a9=1, with_blowup: bool = True) -> LatticePolytope:
    """P(eps): every offset a_i replaced by a_i - eps."""
    eps = Fraction(eps)
    if not 0 <= eps < 1:
        raise ValueError("need 0 <= eps < 1")
    fac = [(n, Fraction(a) - eps) for n, a in epsilon_facets(k, a9, with_blowup)]
    return LatticePolytope(4, fac)


def lifted_polyhedron(k: int, a9=1, with_blowup: bool = True) -> LatticePolytope:
    """P' in M + Z: <(rho_i, -1), (m, r)> >= -a_i together with r >= 0."""
    fac = [(tuple(n) + (-1,), a) for n, a in epsilon_facets(k, a9, with_blowup)]
    fac.append(((0, 0, 0, 0, 1), 0))
    return LatticePolytope(5, fac)


@dataclass
class MMPRun:
    k: int
    thresholds: list
    fans: list  # one per open interval (0, e1), (e1, e2), ...
    sample_points: list
    vertex_counts: list
    cone_changes: list  # (removed, added) labelled cone sets between consecutive fans
    final_segment: list

    def __post_init__(self):
        if any(not 0 < e < 1 for e in self.thresholds):
            raise ValueError("thresholds must lie in (0, 1)")
        if any(a >= b for a, b in zip(self.thresholds, self.thresholds[1:])):
            raise ValueError("thresholds must be strictly increasing")


def mmp_thresholds(k: int, a9=1, with_blowup: bool = True) -> MMPRun:
    """Thresholds are the r-coordinates in (0, 1) of the vertices of P'."""
    lifted = lifted_polyhedron(k, a9, with_blowup)
    ths = sorted({v[4] for v in lifted.vertices if 0 < v[4] < 1})
    edges = [Fraction(0)] + ths
    mids = [(lo + hi) / 2 for lo, hi in zip(edges, edges[1:])]
    fans, counts = [], []
    for e in mids:
        poly = epsilon_polytope(k, e, a9, with_blowup)
        counts.append(len(poly.vertices))
        fans.append(normal_fan(poly))
    changes = []
    for f0, f1 in zip(fans, fans[1:]):
        c0, c1 = f0.labelled_cones(), f1.labelled_cones()
        changes.append((sorted(map(sorted, c0 - c1)), sorted(map(sorted, c1 - c0))))
    segment = []
    if ths:
        segment = epsilon_polytope(k, ths[-1], a9, with_blowup).vertices
    return MMPRun(k, ths, fans, mids, counts, changes, segment)


def expected_thresholds(k: int) -> list[Fraction]:
    return [Fraction(1, 2), Fraction(4 * k + 1, 6 * k + 2), Fraction(2, 3)]


# expected maximal cones of the final fan, in facet labels 1..10
REFERENCE_CONES = [
    {1, 5, 6, 10}, {1, 5, 7, 10}, {5, 6, 7, 10}, {1, 5, 6, 7},
    {1, 2, 3, 6, 7}, {2, 3, 6, 7, 10}, {1, 3, 7, 10}, {1, 2, 6, 10}, {1, 2, 3, 10},
]


def find_relation_ray(rays: dict) -> tuple[int, tuple] | None:
    """The ray r among ``rays`` with rho_6 + rho_7 + 2 rho_1 + 2 r = 0."""
    target = tuple(-(a + b + 2 * c) for a, b, c in zip(rays[6], rays[7], rays[1]))
    if any(x % 2 for x in target):
        return None
    target = tuple(x // 2 for x in target)
    for label, r in rays.items():
        if r == target:
            return label, r
    return None


@dataclass
class FinalFanReport:
    passed: bool
    thresholds: list
    ray_labels: list
    rho10_label: int | None
    rho10: tuple | None
    cone_count: int
    missing: list
    unexpected: list
    vertex_count: int
    facet_count: int

    def __bool__(self):
        return self.passed


def final_fan_check(k: int, a9=1) -> FinalFanReport:
    """Compare the fan on the last interval with REFERENCE_CONES.

    The reference rho_10 is identified with the engine ray satisfying the
    linear relation rho_6 + rho_7 + 2 rho_1 + 2 rho_10 = 0.
    """
    run = mmp_thresholds(k, a9)
    fan = run.fans[-1] if run.fans else None
    fail = FinalFanReport(False, run.thresholds, [], None, None, 0, [], [], 0, 0)
    if fan is None or run.thresholds != expected_thresholds(k):
        return fail
    by_label = dict(zip(fan.ray_labels, fan.rays))
    if not {1, 6, 7} <= by_label.keys():
        return fail
    found = find_relation_ray(by_label)
    if found is None:
        return fail
    r10_label, r10 = found
    mapping = {lab: lab for lab in (1, 2, 3, 5, 6, 7)}
    mapping[10] = r10_label
    expected = {frozenset(mapping[i] for i in c) for c in REFERENCE_CONES}
    got = fan.labelled_cones()
    missing = sorted(map(sorted, expected - got))
    unexpected = sorted(map(sorted, got - expected))
    ray_set_ok = set(fan.ray_labels) == set(mapping.values())
    poly = epsilon_polytope(k, run.sample_points[-1], a9)
    passed = ray_set_ok and not missing and not unexpected and len(fan.rays) == 7 and len(got) == 9
    return FinalFanReport(passed, run.thresholds, sorted(fan.ray_labels), r10_label, r10, len(got),
                          missing, unexpected, len(poly.vertices), len(poly.supporting_facets()))


# ---------------------------------------------------------------------------
# the hyperplane C_0 and the coordinates x, y, z, t


DUAL_BASIS = {
    "x": (Fraction(0), Fraction(0), Fraction(-1, 2), Fraction(-1, 2)),
    "y": (Fraction(1), Fraction(0), Fraction(-1, 2), Fraction(-1, 2)),
    "z": (Fraction(0), Fraction(0), Fraction(-1, 2), Fraction(1, 2)),
    "t": (Fraction(0), Fraction(1), Fraction(1), Fraction(2)),
}


@dataclass
class RelationsReport:
    passed: bool
    relation_ok: bool
    half_sum: tuple
    half_sum_in_N0: bool
    half_sum_outside_N00: bool
    pairing: list
    pairing_is_identity: bool
    substitution_exponents: dict
    rho10: tuple | None

    def __bool__(self):
        return self.passed


def _coordinates(basis, v):
    """Coefficients of v in the span of ``basis`` (independent vectors), or None."""
    dim = len(v)
    cols = [[b[i] for b in basis] + [v[i]] for i in range(dim)]
    m, piv = _rref(cols)
    if len(basis) in piv:
        return None
    return tuple(m[i][len(basis)] for i in range(len(basis)))


def lattice_kernel_basis(functional) -> list[tuple[int, ...]]:
    """An integral basis of {n in Z^4 : <functional, n> = 0} (functional with a unit entry)."""
    f = list(functional)
    piv = next(i for i, c in enumerate(f) if abs(c) == 1)
    basis = []
    for j in range(len(f)):
        if j == piv:
            continue
        v = [0] * len(f)
        v[j] = 1
        v[piv] = -f[j] * f[piv]
        basis.append(tuple(v))
    return basis


def quotient_relations_check(k: int) -> RelationsReport:
    """Relations among the rays spanning C_0 and the induced torus coordinates."""
    run = mmp_thresholds(k)
    fan = run.fans[-1]
    rays = dict(zip(fan.ray_labels, fan.rays))
    found = find_relation_ray(rays)
    if found is None:
        return RelationsReport(False, False, (), False, False, [], False, {}, None)
    _, r10 = found
    r1, r6, r7 = rays[1], rays[6], rays[7]
    relation_ok = all(a + b + 2 * c + 2 * d == 0 for a, b, c, d in zip(r6, r7, r1, r10))
    functional = primitive([x - y for x, y in zip(run.final_segment[1], run.final_segment[0])])
    half = tuple(Fraction(a + b + c, 2) for a, b, c in zip(r6, r1, r10))
    # membership in N_0 = N cap C_0: integral and killed by the functional
    in_n0 = all(x.denominator == 1 for x in half) and _dot(functional, half) == 0
    # and not in the sublattice spanned by rho_6, rho_1, rho_10
    # rho_6, rho_1, rho_10 are independent, so the coefficients of half are unique
    basis00 = [r6, r1, r10]
    coeffs = _coordinates(basis00, half)
    outside = coeffs is not None and any(c.denominator != 1 for c in coeffs)
    frame = [r6, r1, r10, (0, 1, 0, 0)]
    names = ("x", "y", "z", "t")
    pairing = [[_dot(DUAL_BASIS[n], v) for v in frame] for n in names]
    ident = all(pairing[i][j] == (1 if i == j else 0) for i in range(4) for j in range(4))
    # u_i = prod_j (dual_j)^{<e_i^*, frame_j>}
    exps = {f"u{i + 1}": {n: frame[j][i] for j, n in enumerate(names) if frame[j][i]} for i in range(4)}
    passed = relation_ok and in_n0 and outside and ident
    return RelationsReport(passed, relation_ok, half, in_n0, outside, pairing, ident, exps, r10)
