"""Support patterns, constructive solvers and always-solvable certificates."""

import itertools

import numpy as np
import pytest

from src.bls_core import SolutionPair
from src.errors import DependentMatrices, NotThreeCorner, ParseError
from src.sampling import random_system
from src.structural import (SupportPattern, Verdict, WitnessKind, certify_always_solvable,
                            collective_support, has_three_corner_property, line_search, solve_m2,
                            solve_three_corner, specialization_search, specialize,
                            three_corner_terms)
from tests.conftest import (CROSS, DELETED_ECHELON, Q, gf, system, three_parameter,
                            trace_corners)

# x1 y3 + x2 y2, x2 y1 + x2 y3, x2 y2
MIXED = (
    [[0, 0], [0, 1], [1, 0]],
    [[0, 1], [0, 0], [0, 1]],
    [[0, 0], [0, 1], [0, 0]],
)


def pair(f, x, y) -> SolutionPair:
    return SolutionPair(tuple(f(v) for v in x), tuple(f(v) for v in y))


# ---------------------------------------------------------
# Support patterns
# ---------------------------------------------------------

def test_collective_support_of_three_parameter_example():
    pat = collective_support(three_parameter(Q, (1, 2, 3)))
    assert pat == SupportPattern.parse("***/*0*")
    assert str(pat) == "* * *\n* 0 *"
    assert pat.count == 5


@pytest.mark.parametrize("text,expected", [
    ("***/*0*", False),
    ("**/*0", False),
    ("**/**", False),
    ("*0/0*", True),
    ("****", True),
    ("**0/00*/00*", True),
    ("*/*/*", True),
])
def test_three_corner_property(text, expected):
    assert has_three_corner_property(SupportPattern.parse(text)) is expected


def test_three_corner_property_ignores_permutations(rng):
    for _ in range(30):
        arr = rng.random((3, 4)) < 0.4
        pat = SupportPattern.from_array(arr)
        moved = pat.permuted(rng.permutation(3), rng.permutation(4))
        assert has_three_corner_property(pat) == has_three_corner_property(moved)


def test_bad_pattern_text():
    with pytest.raises(ParseError):
        SupportPattern.parse("*0/*")


def test_three_corner_terms_of_deleted_echelon():
    pat = collective_support(system(Q, DELETED_ECHELON, (1, 2, 3, 4)))
    terms = three_corner_terms(pat)
    assert terms.row_terms == ((0, (0, 1)),)
    assert terms.col_terms == ((2, (1, 2)),)


def test_three_corner_terms_reject_bad_support():
    with pytest.raises(NotThreeCorner):
        three_corner_terms(SupportPattern.parse("***/*0*"))


@pytest.mark.slow
@pytest.mark.parametrize("p,q", [(p, q) for p in range(2, 5) for q in range(2, 5)])
def test_three_corner_masks_have_few_positions(p, q):
    best = 0
    for bits in itertools.product((False, True), repeat=p * q):
        arr = np.array(bits).reshape(p, q)
        if not arr.any(axis=0).all() or not arr.any(axis=1).all():
            continue
        pat = SupportPattern.from_array(arr)
        if has_three_corner_property(pat):
            best = max(best, pat.count)
    assert best == p + q - 2


# ---------------------------------------------------------
# Constructive solvers
# ---------------------------------------------------------

def test_solve_three_corner_on_deleted_echelon():
    sys = system(Q, DELETED_ECHELON, (1, 2, 3, 4))
    assert solve_three_corner(sys) == pair(Q, (1, 2, 1), (1, 3, 4))


def test_solve_three_corner_single_dyad():
    sys = system(Q, [[[1, 0], [0, 0]]], (7,))
    assert solve_three_corner(sys) == pair(Q, (7, 0), (1, 0))


def test_solve_three_corner_rejects_three_parameter_example():
    with pytest.raises(NotThreeCorner):
        solve_three_corner(three_parameter(Q, (1, 2, 3)))


def test_solve_three_corner_for_every_rhs_over_gf3():
    f = gf(3)
    sys = system(f, DELETED_ECHELON, (0, 0, 0, 0))
    for g in itertools.product(range(3), repeat=4):
        assert solve_three_corner(sys, g).solves(sys.with_rhs(g))


def test_solve_m2_cross():
    assert solve_m2(system(Q, CROSS, (1, 0))) == pair(Q, (1, 0), (1, 0))


def test_solve_m2_single_matrix():
    assert solve_m2(system(Q, [[[0, 3], [0, 0]]], (6,))) == pair(Q, (0, 2), (1, 0))


def test_solve_m2_every_rhs_over_gf3(rng):
    f = gf(3)
    for _ in range(5):
        sys = random_system(f, 2, 3, 2, rng)
        for g in itertools.product(range(3), repeat=2):
            assert solve_m2(sys, g).solves(sys.with_rhs(g))


def test_solve_m2_needs_independent_matrices():
    with pytest.raises(DependentMatrices):
        solve_m2(system(Q, [[[1, 0], [0, 1]], [[2, 0], [0, 2]]], (1, 1)))


# ---------------------------------------------------------
# Specialization
# ---------------------------------------------------------

def test_specialize_mixed_assignment():
    sys = system(Q, MIXED, (2, 3, 5))
    spec = specialize(sys, {"x2": 1, "y3": 1})
    assert spec.unknowns == ("x1", "y1", "y2")
    assert spec.coefficient.to_lists() == [["1", "0", "1"], ["0", "1", "0"], ["0", "0", "1"]]
    assert spec.constant == (Q(0), Q(1), Q(0))
    assert spec.full_row_rank
    assert spec.solve() == pair(Q, (-3, 1), (2, 5, 1))


def test_specialize_leaves_bilinear_term():
    assert specialize(system(Q, MIXED, (2, 3, 5)), {"x2": 1}) is None


def test_mixed_search_finds_a_witness():
    sys = system(Q, MIXED, (2, 3, 5))
    hit = specialization_search(sys, strategies=("mixed",))
    assert hit is not None and hit.always and hit.strategy == "mixed"
    assert hit.solution.solves(sys)


def test_no_single_variable_specialization_for_three_parameter_example():
    assert specialization_search(three_parameter(Q, (1, 2, 3)), budget=1, strategies=("mixed",)) is None


def test_full_y_witness():
    sys = system(Q, CROSS, (4, -1))
    hit = specialization_search(sys, strategies=("y",))
    assert hit.strategy == "y" and hit.always
    assert hit.solution.solves(sys)


def test_line_search_solves_m_equal_q_plus_one():
    sys = trace_corners(Q, (3, 1, 2))
    s = line_search(sys)
    assert s is not None and s.solves(sys)


def test_line_search_over_a_large_prime_uses_determinant_roots():
    sys = trace_corners(gf(1000003), (3, 1, 2))
    s = line_search(sys, budget=50)
    assert s is not None and s.solves(sys)


def test_line_search_respects_its_budget():
    sys = trace_corners(gf(1000003), (3, 1, 2))
    assert line_search(sys, budget=0) is None


# ---------------------------------------------------------
# Certificates
# ---------------------------------------------------------

def test_certificate_for_two_matrices():
    cert = certify_always_solvable(system(Q, CROSS, (0, 0)))
    assert cert.verdict is Verdict.YES and cert.witness is WitnessKind.MLE2
    assert cert.summary == "always solvable: YES (m ≤ 2)"
    assert cert.replay((3, 5)).solves(system(Q, CROSS, (3, 5)))


def test_certificate_violates_bound():
    e = [[[int((a, b) == (i, j)) for b in range(2)] for a in range(2)] for i in range(2) for j in range(2)]
    cert = certify_always_solvable(system(Q, e, (1, 2, 3, 4)))
    assert cert.verdict is Verdict.VIOLATES_BOUND
    assert cert.summary == "always solvable: NO (m ≥ p+q)"
    with pytest.raises(ValueError):
        cert.replay((1, 2, 3, 4))


def test_certificate_three_corner_replays():
    sys = system(Q, DELETED_ECHELON, (0, 0, 0, 0))
    cert = certify_always_solvable(sys)
    assert cert.witness is WitnessKind.THREE_CORNER
    assert cert.replay((5, -6, 7, 0)).solves(sys.with_rhs((5, -6, 7, 0)))


def test_certificate_specialization_replays():
    sys = system(Q, MIXED, (0, 0, 0))
    cert = certify_always_solvable(sys)
    assert cert.verdict is Verdict.YES and cert.witness is WitnessKind.SPECIALIZATION
    assert cert.replay((2, 3, 5)).solves(sys.with_rhs((2, 3, 5)))


def test_three_parameter_example_stays_unknown():
    cert = certify_always_solvable(three_parameter(Q, (1, 2, 3)))
    assert cert.verdict is Verdict.UNKNOWN
    assert cert.summary == "always solvable: UNKNOWN (no structural witness)"


def test_certificate_rejects_dependent_matrices():
    with pytest.raises(DependentMatrices):
        certify_always_solvable(system(Q, [[[1, 0], [0, 1]], [[2, 0], [0, 2]], [[0, 1], [0, 0]]], (1, 2, 3)))
