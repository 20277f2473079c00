"""Brute-force enumeration over small prime fields, and its agreement with the solver."""

import numpy as np
import pytest

from src.errors import BudgetExceeded, InfiniteField
from src.linalg import Matrix
from src.oracle import (all_vectors, always_solvable_exhaustive, brute_force_solve,
                        count_raw_solutions, image_cardinality)
from src.rank_one import SolveMode, Status, solve
from src.sampling import random_system
from tests.conftest import CROSS, DELETED_ECHELON, Q, cross_system, gf, system, trace_corners


def units(f, p, q):
    return [Matrix.unit(f, p, q, i, j) for i in range(p) for j in range(q)]


def test_all_vectors_are_lexicographic():
    assert all_vectors(2, 2).tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]
    assert all_vectors(3, 0).shape == (1, 0)


# ---------------------------------------------------------
# Solutions
# ---------------------------------------------------------

def test_cross_mod_5_has_eight_classes():
    sys = cross_system(gf(5))
    classes = brute_force_solve(sys, SolveMode.NONTRIVIAL)
    assert len(classes) == 8
    assert all(s.solves(sys) and s.y[0] == gf(5).one for s in classes)
    assert count_raw_solutions(sys, SolveMode.NONTRIVIAL) == len(classes) * 4


def test_cross_mod_3_only_trivial():
    assert brute_force_solve(cross_system(gf(3)), SolveMode.NONTRIVIAL) == []


def test_totally_nonzero_mode():
    f = gf(5)
    sys = trace_corners(f, (3, 1, 2))
    sols = brute_force_solve(sys, SolveMode.TOTALLY_NONZERO)
    assert sols and all(s.is_totally_nonzero for s in sols)


def test_solutions_are_sorted_canonical_classes():
    sols = brute_force_solve(trace_corners(gf(7), (1, 1, 1)))
    assert sols == sorted(sols, key=lambda s: s.sort_key())
    assert all(s == s.canonical() for s in sols)


def test_oracle_rejects_infinite_fields():
    with pytest.raises(InfiniteField):
        brute_force_solve(cross_system(Q))


def test_oracle_budget_is_a_hard_limit():
    with pytest.raises(BudgetExceeded):
        brute_force_solve(cross_system(gf(5)), budget=100)


# ---------------------------------------------------------
# Agreement with the solver
# ---------------------------------------------------------

def test_solver_matches_oracle_on_cross_mod_5():
    sys = cross_system(gf(5))
    out = solve(sys, mode=SolveMode.NONTRIVIAL)
    assert set(out.solutions) == set(brute_force_solve(sys, SolveMode.NONTRIVIAL))


@pytest.mark.parametrize("n", [2, 3])
def test_solver_matches_oracle_on_random_systems(n, rng):
    f = gf(n)
    for _ in range(20):
        p, q = (int(v) for v in rng.integers(1, 3, size=2))
        m = int(rng.integers(1, p * q + 1))
        sys = random_system(f, p, q, m, rng)
        mode = SolveMode.NONTRIVIAL if sys.is_homogeneous else SolveMode.ANY
        expected = set(brute_force_solve(sys, mode))
        out = solve(sys, mode=mode)
        if out.status is Status.SOLUTIONS:
            assert set(out.solutions) == expected
        else:
            assert out.status is Status.NO_SOLUTION
            assert not expected


# ---------------------------------------------------------
# Image size and always-solvability
# ---------------------------------------------------------

def test_image_of_a_single_scalar():
    rep = image_cardinality([Matrix.from_rows(gf(3), [[1]])])
    assert rep.attained == 3 and rep.surjective
    assert not rep.bound_applies


def test_image_of_complete_2x2_over_gf2():
    rep = image_cardinality(units(gf(2), 2, 2))
    assert rep.bound_applies
    assert (rep.attained, rep.bound, rep.total) == (10, 10, 16)
    assert rep.violations == ()


def test_first_unattained_rhs_is_lexicographic():
    f = gf(2)
    ok, g = always_solvable_exhaustive(units(f, 2, 2))
    assert not ok
    assert g == (f(0), f(1), f(1), f(0))


def test_always_solvable_pairs():
    assert always_solvable_exhaustive(cross_system(gf(3)).matrices) == (True, None)


def test_deleted_echelon_is_always_solvable_mod_3():
    sys = system(gf(3), DELETED_ECHELON, (0, 0, 0, 0))
    assert always_solvable_exhaustive(sys.matrices) == (True, None)


@pytest.mark.parametrize("n", [2, 3])
def test_too_many_equations_miss_some_rhs(n, rng):
    f = gf(n)
    for _ in range(5):
        sys = random_system(f, 2, 2, 4, rng)
        rep = image_cardinality(sys.matrices)
        assert not rep.surjective
        assert rep.attained <= min(rep.bound, rep.total)
        assert rep.violations == ()


def test_image_codes_agree_with_solve_counts():
    f = gf(3)
    mats = system(f, CROSS, (0, 0)).matrices
    rep = image_cardinality(mats)
    reached = sum(1 for g in np.ndindex(3, 3) if brute_force_solve(system(f, CROSS, g)))
    assert rep.attained == reached == 9
