"""Affine pencils: both construction routes, the symbolic pencil and its minors."""

import pytest
import sympy

from src.errors import FieldMismatch, NotReduced, SingularCompletion
from src.linalg import Matrix
from src.pencil import (AffinePencil, build_pencil, build_pencil_completion, default_completion,
                        pencil_eval, pencil_spaces_equal, satisfies_system, symbolic_pencil,
                        symbolic_system)
from src.rank_one import exact_rank, minor_system
from src.sampling import random_system, random_vector
from tests.conftest import Q, QI, TRACE_CORNERS, gf, system, three_parameter


def handwritten_pencil(f, g1, g2, g3) -> AffinePencil:
    """[[z2, z3, -g2 - z2], [z3 - g3, z1, g1 - z3]]."""
    zero, one = f.zero, f.one
    K0 = Matrix(f, 2, 3, ((zero, zero, -g2), (-g3, zero, g1)))
    K1 = Matrix(f, 2, 3, ((zero, zero, zero), (zero, one, zero)))
    K2 = Matrix(f, 2, 3, ((one, zero, -one), (zero, zero, zero)))
    K3 = Matrix(f, 2, 3, ((zero, one, zero), (one, zero, -one)))
    return AffinePencil.from_matrices(K0, [K1, K2, K3])


def test_pencil_dimension_and_membership(rng):
    sys = three_parameter(Q, (1, 2, 3))
    pencil = build_pencil(sys)
    assert pencil.r == 3
    for _ in range(5):
        assert satisfies_system(pencil, sys, random_vector(Q, 3, rng))


def test_pencil_matches_handwritten_form():
    sys = three_parameter(Q, (1, 2, 3))
    assert pencil_spaces_equal(build_pencil(sys), handwritten_pencil(Q, Q(1), Q(2), Q(3)))
    assert not pencil_spaces_equal(build_pencil(sys), handwritten_pencil(Q, Q(1), Q(2), Q(4)))


def test_symbolic_pencil_matches_handwritten_form():
    sys = three_parameter(Q, (0, 0, 0))
    sp = symbolic_pencil(sys)
    f = sp.field
    assert pencil_spaces_equal(sp, handwritten_pencil(f, f.gen(0), f.gen(1), f.gen(2)))


def test_handwritten_minors_are_reproduced():
    f = symbolic_system(three_parameter(Q, (0, 0, 0))).field
    pencil = handwritten_pencil(f, f.gen(0), f.gen(1), f.gen(2))
    z1, z2, z3, g1, g2, g3 = sympy.symbols("z1 z2 z3 g1 g2 g3")
    expected = [
        z1 * z2 - z3**2 + g3 * z3,
        z2 * (g1 - g3) + g2 * z3 - g2 * g3,
        z1 * z2 - z3**2 + g2 * z1 + g1 * z3,
    ]
    got = [p.as_expr() for p in minor_system(pencil)]
    assert [sympy.expand(a - b) for a, b in zip(got, expected)] == [0, 0, 0]


@pytest.mark.parametrize("g", [(1, 2, 3), (5, -1, 2), (0, 3, 7)])
def test_rank_one_substitution_when_g1_differs_from_g3(g):
    g1, g2, g3 = (Q(v) for v in g)
    pencil = handwritten_pencil(Q, g1, g2, g3)
    k = pencil_eval(pencil, [Q(0), g2 * g3 / (g1 - g3), Q(0)])
    assert exact_rank(k) == 1


@pytest.mark.parametrize("z2", [0, 1, -2])
def test_rank_one_substitution_when_g1_equals_g3(z2):
    pencil = handwritten_pencil(Q, Q(2), Q(5), Q(2))
    assert exact_rank(pencil_eval(pencil, [Q(0), Q(z2), Q(2)])) == 1


def test_dependent_matrices_are_rejected():
    sys = system(Q, [*TRACE_CORNERS, [[2, 0], [1, 2]]], (3, 1, 2, 7))
    with pytest.raises(NotReduced):
        build_pencil(sys)


def test_complete_system_has_a_single_point():
    sys = system(Q, [[[1, 0], [0, 0]], [[0, 1], [0, 0]], [[0, 0], [1, 0]], [[0, 0], [0, 1]]], (1, 2, 3, 4))
    pencil = build_pencil(sys)
    assert pencil.r == 0
    assert pencil.K0 == Matrix.from_rows(Q, [[1, 2], [3, 4]])


def test_completion_must_be_invertible():
    sys = system(Q, TRACE_CORNERS, (1, 1, 1))
    n = 4
    in_span = [tuple(Q(1) if k in (0, 3) else Q(0) for k in range(n))]
    with pytest.raises(SingularCompletion):
        build_pencil_completion(sys, in_span)


def test_default_completion_skips_pivots():
    sys = system(Q, TRACE_CORNERS, (1, 1, 1))
    assert len(default_completion(sys)) == 1


def test_restrict_fixes_other_coordinates():
    pencil = build_pencil(three_parameter(Q, (1, 2, 3)))
    line = pencil.restrict(1, [Q(2), Q(-1)])
    assert line.r == 1
    assert line([Q(5)]) == pencil([Q(2), Q(5), Q(-1)])


def test_symbolic_pencil_needs_rationals():
    with pytest.raises(FieldMismatch):
        symbolic_system(three_parameter(gf(5), (1, 2, 3)))


@pytest.mark.parametrize("field", [Q, QI, gf(2), gf(3), gf(7)])
def test_construction_routes_agree(field, rng):
    for _ in range(10):
        p, q = (int(v) for v in rng.integers(1, 4, size=2))
        m = int(rng.integers(0, p * q + 1))
        sys = random_system(field, p, q, m, rng)
        assert pencil_spaces_equal(build_pencil(sys), build_pencil_completion(sys))


@pytest.mark.slow
@pytest.mark.parametrize("field", [Q, QI, gf(2), gf(3)])
def test_construction_routes_agree_many(field, rng):
    for _ in range(100):
        p, q = (int(v) for v in rng.integers(1, 4, size=2))
        m = int(rng.integers(0, p * q + 1))
        sys = random_system(field, p, q, m, rng)
        assert pencil_spaces_equal(build_pencil(sys), build_pencil_completion(sys))
