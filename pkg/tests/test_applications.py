"""Commuting sign patterns and quaternion vector pairs."""

import pytest

from src.applications import (SignPattern, commuting_bls, quaternion_bls, quaternion_map,
                              quaternion_pair, realize_commuting)
from src.errors import DimensionMismatch, ParseError
from src.rank_one import SolveMode, Status, solve
from src.sampling import random_vector
from tests.conftest import Q, gf


# ---------------------------------------------------------
# Commuting patterns
# ---------------------------------------------------------

def test_diagonal_and_antidiagonal_patterns():
    cs = commuting_bls(SignPattern.parse("*0/0*"), SignPattern.parse("0*/*0"))
    sys = cs.system
    assert (sys.p, sys.q, sys.m) == (2, 2, 2)
    assert cs.equation_positions == ((0, 1), (1, 0))
    assert cs.y_positions == ((0, 0), (1, 1))
    assert cs.x_positions == ((0, 1), (1, 0))
    assert sys.matrices[0].to_lists() == [["1", "0"], ["-1", "0"]]
    assert sys.matrices[1].to_lists() == [["0", "-1"], ["0", "1"]]
    assert sys.is_homogeneous


@pytest.mark.parametrize("field", [Q, gf(3), gf(5)])
def test_commuting_solutions_realize_commuting_matrices(field):
    n = 2
    cs = commuting_bls(SignPattern.parse("*0/0*"), SignPattern.parse("0*/*0"), field)
    out = solve(cs.system, mode=SolveMode.TOTALLY_NONZERO)
    assert out.status is Status.SOLUTIONS
    for s in out.solutions:
        P, Qm = realize_commuting(cs, s, n)
        assert P @ Qm == Qm @ P
        assert all(P[i, j] for i, j in cs.y_positions)
        assert all(Qm[i, j] for i, j in cs.x_positions)


def test_single_entry_patterns_give_no_equations():
    cs = commuting_bls(SignPattern.parse("*"), SignPattern.parse("*"))
    assert cs.system.m == 0


def test_equation_count_is_at_most_n_squared():
    cs = commuting_bls(SignPattern.parse("**0/0**/*0*"), SignPattern.parse("*0*/**0/0**"))
    assert cs.system.m <= 9


def test_pattern_sides_must_agree():
    with pytest.raises(DimensionMismatch):
        commuting_bls(SignPattern.parse("*"), SignPattern.parse("*0/0*"))


def test_empty_pattern_is_rejected():
    with pytest.raises(ParseError):
        SignPattern.parse("00/00")


def test_sign_pattern_text():
    assert str(SignPattern.parse("*0/**")) == "*0/**"


# ---------------------------------------------------------
# Quaternion pairs
# ---------------------------------------------------------

def test_quaternion_system_shape():
    sys = quaternion_bls((0, 0, 0, 1))
    assert (sys.p, sys.q, sys.m) == (3, 3, 4)
    assert sys.matrices[1].to_lists() == [["0", "0", "0"], ["0", "0", "1"], ["0", "-1", "0"]]


@pytest.mark.parametrize("d0", [(0, 0, 0, 1), (1, 0, 0, 0), (2, -1, 3, 5), (0, 1, 1, 0), (-3, 0, 0, 0)])
def test_quaternion_pair_solves(d0):
    s = quaternion_pair(d0)
    assert s.solves(quaternion_bls(d0))
    assert quaternion_map(s.y, s.x, Q) == tuple(Q(v) for v in d0)


def test_unit_basis_example():
    s = quaternion_pair((0, 0, 0, 1))
    assert quaternion_map(s.y, s.x, Q) == (Q(0), Q(0), Q(0), Q(1))
    e1, e2 = (Q(1), Q(0), Q(0)), (Q(0), Q(1), Q(0))
    assert quaternion_map(e1, e2, Q) == (Q(0), Q(0), Q(0), Q(1))


def test_quaternion_round_trip(rng):
    for _ in range(50):
        v, w = random_vector(Q, 3, rng), random_vector(Q, 3, rng)
        d0 = quaternion_map(v, w, Q)
        assert quaternion_pair(d0).solves(quaternion_bls(d0))


def test_no_totally_nonzero_pair_for_zero_target():
    out = solve(quaternion_bls((0, 0, 0, 0), gf(5)), mode=SolveMode.TOTALLY_NONZERO, budget=10**6)
    assert out.status is not Status.SOLUTIONS


@pytest.mark.slow
def test_quaternion_round_trip_through_solve(rng):
    for _ in range(50):
        v, w = random_vector(Q, 3, rng), random_vector(Q, 3, rng)
        d0 = quaternion_map(v, w, Q)
        sys = quaternion_bls(d0)
        out = solve(sys)
        assert out.status is Status.SOLUTIONS
        assert all(s.solves(sys) for s in out.solutions)
