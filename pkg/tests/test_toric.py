from fractions import Fraction
from itertools import combinations

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from jkmirror.toric import (
    LatticePolytope,
    UnboundedPolyhedron,
    epsilon_polytope,
    expected_thresholds,
    final_fan_check,
    jk_polytope,
    mmp_thresholds,
    normal_fan,
    nullspace,
    primitive,
    quotient_relations_check,
    rank,
)


def _sympy_vertices(p):
    # independent oracle: solve every 4-subset of inequalities with sympy
    out = set()
    for sub in combinations(p.facets, p.ambient_dim):
        A = sympy.Matrix([list(n) for n, _ in sub])
        if A.rank() < p.ambient_dim:
            continue
        b = sympy.Matrix([-sympy.Rational(a.numerator, a.denominator) for _, a in sub])
        m = A.solve(b)
        pt = tuple(Fraction(int(x.p), int(x.q)) for x in m)
        if p.contains(pt):
            out.add(pt)
    return out


@pytest.mark.parametrize("k", [1, 2, 3])
def test_jk_polytope_vertices(k):
    p = jk_polytope(k)
    expected = {(0, 0, 0, 0), (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1),
                (2, 2 * k + 1, 2 * k + 1, 4 * k + 1)}
    assert set(p.vertices) == expected == _sympy_vertices(p)
    assert len(p.supporting_facets()) == 8
    fan = normal_fan(p)
    assert len(fan.rays) == 8 and len(fan.maximal_cones) == 6


@pytest.mark.parametrize("eps", [Fraction(1, 4), Fraction(3, 5), Fraction(13, 20)])
def test_epsilon_vertices_against_sympy(eps):
    p = epsilon_polytope(1, eps)
    assert set(p.vertices) == _sympy_vertices(p)


def test_unit_square_and_edge_cases():
    sq = LatticePolytope(2, [((1, 0), 0), ((0, 1), 0), ((-1, 0), 1), ((0, -1), 1)])
    assert len(sq.vertices) == 4
    assert len(normal_fan(sq).maximal_cones) == 4
    assert epsilon_polytope(1, Fraction(99, 100)).vertices == []
    assert set(epsilon_polytope(1, 0).vertices) == set(jk_polytope(1).vertices)
    with pytest.raises(UnboundedPolyhedron):
        LatticePolytope(2, [((1, 0), 0), ((0, 1), 0)]).vertices


def test_linear_algebra():
    assert rank([[1, 2], [2, 4]]) == 1
    ns = nullspace([[1, 1, 0]], 3)
    assert len(ns) == 2
    assert primitive([4, -6, 0]) == (2, -3, 0)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_thresholds(k):
    run = mmp_thresholds(k)
    assert run.thresholds == expected_thresholds(k)
    lo = Fraction(2, 3)
    assert run.final_segment and set(run.final_segment) == {
        (lo, lo, lo, Fraction(1)),
        (lo, Fraction(2 * k + 1, 3), Fraction(2 * k + 1, 3), Fraction(4 * k + 1, 3)),
    }
    assert normal_fan(epsilon_polytope(k, lo)).lineality_functional in {(0, 1, 1, 2), (0, -1, -1, -2)}


@given(st.fractions(min_value=Fraction(1, 100), max_value=Fraction(98, 100), max_denominator=200))
@settings(max_examples=25, deadline=None)
def test_combinatorics_constant_between_thresholds(eps):
    # vertex count only changes at thresholds (k = 1)
    run = _run_k1()
    edges = [Fraction(0)] + run.thresholds + [Fraction(1)]
    for i, (a, b) in enumerate(zip(edges, edges[1:])):
        if a < eps < b:
            p = epsilon_polytope(1, eps)
            if i < len(run.vertex_counts):
                assert len(p.vertices) == run.vertex_counts[i]
            else:
                assert p.vertices == []


_CACHE = {}


def _run_k1():
    if "run" not in _CACHE:
        _CACHE["run"] = mmp_thresholds(1)
    return _CACHE["run"]


def test_vertex_counts_change_at_each_threshold():
    counts = _run_k1().vertex_counts
    assert counts == [18, 13, 9]
    assert all(a != b for a, b in zip(counts, counts[1:]))


def test_alternative_weights_change_thresholds():
    assert mmp_thresholds(1, with_blowup=False).thresholds == [Fraction(1, 2), Fraction(3, 5), Fraction(2, 3)]
    assert mmp_thresholds(1, a9=2).thresholds != expected_thresholds(1)


@pytest.mark.parametrize("k", [1, 2])
def test_final_fan(k):
    rep = final_fan_check(k)
    assert rep.passed
    assert (rep.cone_count, rep.vertex_count, rep.facet_count) == (9, 9, 7)
    assert rep.rho10 == (0, -1, -1, 1)


def test_relations():
    assert quotient_relations_check(1).passed
