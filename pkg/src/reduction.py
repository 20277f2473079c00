"""
Solution-preserving rewrites of a bilinear system: elementary operations on
the (A_i, g_i) pairs, right-hand side normalization and simultaneous
equivalence A_i -> P A_i Q.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

from src.bls_core import BilinearSystem, SolutionPair, unvec, vec
from src.errors import DimensionMismatch, SingularTransform, ZeroRhs
from src.linalg import Matrix, RowOp, apply_op, inverse, replay, rref

_logger = logging.getLogger(__name__)

__all__ = [
    "ReductionReport", "reduce_system", "normalize_rhs", "normalize_rhs_with_log",
    "equiv_transform", "pull_back", "restore", "scale_all", "replay",
]


@dataclass(frozen=True)
class ReductionReport:
    original: BilinearSystem
    reduced: BilinearSystem
    inconsistent: bool
    ops: tuple[RowOp, ...]
    # index (in eliminated order) of the first 0 = g row with g != 0
    inconsistent_row: Optional[int] = None

    @property
    def m_hat(self) -> int:
        return self.reduced.m

    @property
    def dropped(self) -> int:
        return self.original.m - self.reduced.m


def _pair_rows(sys: BilinearSystem) -> list[list]:
    return [list(vec(a)) + [g] for a, g in zip(sys.matrices, sys.rhs)]


def reduce_system(sys: BilinearSystem) -> ReductionReport:
    """Row-reduce [vec(A_i)^T | g_i]; drop 0 = 0 rows, flag 0 = g != 0."""
    n = sys.p * sys.q
    if sys.m == 0:
        return ReductionReport(sys, sys, False, ())
    ech = rref(_pair_rows(sys), sys.field, pivot_limit=n, record=True)

    mats, rhs = [], []
    for row in ech.rows[:ech.rank]:
        mats.append(unvec(row[:n], sys.p, sys.q, sys.field))
        rhs.append(row[n])

    bad = next((k for k, row in enumerate(ech.rows[ech.rank:], start=ech.rank) if row[n]), None)
    reduced = sys.with_matrices(mats, rhs)
    if bad is not None:
        _logger.debug("reduction: row %d reads 0 = %s", bad + 1, ech.rows[bad][n])
    elif ech.rank < sys.m:
        _logger.debug("reduction: dropped %d dependent equation(s)", sys.m - ech.rank)
    return ReductionReport(sys, reduced, bad is not None, tuple(ech.ops), bad)


def normalize_rhs_with_log(sys: BilinearSystem) -> tuple[BilinearSystem, tuple[RowOp, ...]]:
    if sys.is_homogeneous:
        raise ZeroRhs("cannot normalize a zero right-hand side")
    f = sys.field
    rows = _pair_rows(sys)
    ops: list[RowOp] = []

    def do(op: RowOp):
        apply_op(rows, op)
        ops.append(op)

    lead = next(i for i, g in enumerate(sys.rhs) if g)
    if lead != 0:
        do(RowOp("permute", 0, lead))
    if rows[0][-1] != f.one:
        do(RowOp("scale", 0, coeff=rows[0][-1].inverse()))
    for i in range(1, len(rows)):
        if rows[i][-1]:
            do(RowOp("add", i, 0, -rows[i][-1]))

    n = sys.p * sys.q
    mats = [unvec(r[:n], sys.p, sys.q, f) for r in rows]
    return sys.with_matrices(mats, [r[n] for r in rows]), tuple(ops)


def normalize_rhs(sys: BilinearSystem) -> BilinearSystem:
    """Same solution set, right-hand side (1, 0, ..., 0)."""
    return normalize_rhs_with_log(sys)[0]


# ---------- Equivalence ------------------------------------------------------

def _check_invertible(m: Matrix, n: int, name: str) -> Matrix:
    if m.shape != (n, n):
        raise DimensionMismatch(f"{name} must be {n}x{n}, got {m.rows}x{m.cols}")
    inv = inverse(m)
    if inv is None:
        raise SingularTransform(f"{name} is singular")
    return inv


def equiv_transform(sys: BilinearSystem, P: Matrix, Q: Matrix) -> BilinearSystem:
    _check_invertible(P, sys.p, "P")
    _check_invertible(Q, sys.q, "Q")
    return sys.with_matrices([P @ a @ Q for a in sys.matrices], sys.rhs)


def pull_back(s: SolutionPair, P: Matrix, Q: Matrix) -> SolutionPair:
    """Map a solution of the original system to one of P A_i Q.

    y'^T P A Q x' = y^T A x needs x = Q x' and y = P^T y', so the image is
    (Q^-1 x, P^-T y).
    """
    q_inv = _check_invertible(Q, len(s.x), "Q")
    p_inv = _check_invertible(P, len(s.y), "P")
    return SolutionPair(q_inv.apply(s.x), p_inv.rapply(s.y))


def restore(s: SolutionPair, P: Matrix, Q: Matrix) -> SolutionPair:
    """Inverse of pull_back: (Q x', P^T y')."""
    _check_invertible(Q, len(s.x), "Q")
    _check_invertible(P, len(s.y), "P")
    return SolutionPair(Q.apply(s.x), P.rapply(s.y))


def scale_all(sys: BilinearSystem, c) -> BilinearSystem:
    f = sys.field
    return equiv_transform(sys, Matrix.identity(f, sys.p).scale(c), Matrix.identity(f, sys.q))
