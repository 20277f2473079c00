"""Shared builders for the test-suite."""

import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))

from src.bls_core import BilinearSystem  # noqa: E402
from src.fields import FieldSpec  # noqa: E402

FIXTURES = ROOT / "fixtures"

Q = FieldSpec.rationals()
QI = FieldSpec.gaussian()


def gf(p: int) -> FieldSpec:
    return FieldSpec.prime(p)


def system(f, matrices, rhs) -> BilinearSystem:
    return BilinearSystem.build(f, matrices, rhs)


# ---------- Worked examples --------------------------------------------------

CROSS = ([[1, 0], [0, 1]], [[0, 1], [-1, 0]])
TRACE_CORNERS = ([[1, 0], [0, 1]], [[0, 0], [1, 0]], [[0, 1], [0, 0]])
THREE_PARAMETER = (
    [[0, 1, 0], [0, 0, 1]],
    [[-1, 0, -1], [0, 0, 0]],
    [[0, 1, 0], [-1, 0, 0]],
)
CONTIGUOUS = (
    [[1, 0, 0], [0, 0, 0]],
    [[0, 0, 0], [0, 0, 1]],
    [[0, 1, 1], [0, 0, 0]],
    [[0, 1, 0], [-1, 0, 0]],
    [[0, 1, 0], [0, -1, 0]],
)
CONTIGUOUS_RHS = (1, 1, 0, 0, 0)
DELETED_ECHELON = (
    [[1, 0, 0], [0, 0, 0], [0, 0, 0]],
    [[0, 1, 0], [0, 0, 0], [0, 0, 0]],
    [[0, 0, 0], [0, 0, 1], [0, 0, 0]],
    [[0, 0, 0], [0, 0, 0], [0, 0, 1]],
)


def cross_system(f, g=(0, 0)):
    return system(f, CROSS, g)


def trace_corners(f, g):
    return system(f, TRACE_CORNERS, g)


def three_parameter(f, g):
    return system(f, THREE_PARAMETER, g)


def contiguous_system(f):
    return system(f, CONTIGUOUS, CONTIGUOUS_RHS)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
