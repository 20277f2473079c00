"""
Generators for the two motivating problems: commuting sign patterns
(PQ = QP with prescribed nonzero positions) and quaternion vector pairs
T(v, w) = (v.w, v x w) = d0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from src.bls_core import BilinearSystem, SolutionPair
from src.errors import DimensionMismatch, DivisionByZero, ParseError
from src.fields import FieldSpec, Scalar
from src.linalg import Matrix, dot
from src.structural import SupportPattern

_logger = logging.getLogger(__name__)


# ---------- Commuting patterns -----------------------------------------------

@dataclass(frozen=True)
class SignPattern:
    n: int
    mask: tuple[tuple[bool, ...], ...]

    def __post_init__(self):
        if len(self.mask) != self.n or any(len(row) != self.n for row in self.mask):
            raise DimensionMismatch(f"sign pattern must be {self.n}x{self.n}")
        if not any(any(row) for row in self.mask):
            raise ParseError("sign pattern has no nonzero entry")

    @classmethod
    def from_array(cls, arr) -> "SignPattern":
        arr = np.asarray(arr, dtype=bool)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionMismatch(f"sign pattern must be square, got shape {arr.shape}")
        return cls(arr.shape[0], tuple(tuple(bool(v) for v in row) for row in arr))

    @classmethod
    def parse(cls, text: str) -> "SignPattern":
        """Same textual form as support patterns: "*0/0*"."""
        return cls.from_array(SupportPattern.parse(text).array)

    def positions(self) -> list[tuple[int, int]]:
        """Nonzero positions in row-major order; this fixes the variable order."""
        return [(i, j) for i in range(self.n) for j in range(self.n) if self.mask[i][j]]

    def __str__(self) -> str:
        return "/".join("".join("*" if v else "0" for v in row) for row in self.mask)


@dataclass(frozen=True)
class CommutingSystem:
    system: BilinearSystem
    y_positions: tuple[tuple[int, int], ...]   # entries of P
    x_positions: tuple[tuple[int, int], ...]   # entries of Q
    equation_positions: tuple[tuple[int, int], ...]


def commuting_bls(P: SignPattern, Q: SignPattern, f: FieldSpec | None = None) -> CommutingSystem:
    """Homogeneous system (PQ - QP)[i, j] = 0 with y = P's entries and x = Q's.

    Positions where both products are structurally zero emit no equation.
    Only totally nonzero solutions realize the patterns.
    """
    if P.n != Q.n:
        raise DimensionMismatch(f"patterns of side {P.n} and {Q.n} do not multiply")
    f = f or FieldSpec.rationals()
    n = P.n
    yp, xp = P.positions(), Q.positions()
    y_of = {pos: k for k, pos in enumerate(yp)}
    x_of = {pos: k for k, pos in enumerate(xp)}

    mats, where = [], []
    for i in range(n):
        for j in range(n):
            coeff = np.zeros((len(yp), len(xp)), dtype=np.int64)
            for k in range(n):
                if (i, k) in y_of and (k, j) in x_of:
                    coeff[y_of[(i, k)], x_of[(k, j)]] += 1
                if (i, k) in x_of and (k, j) in y_of:
                    coeff[y_of[(k, j)], x_of[(i, k)]] -= 1
            if coeff.any():
                mats.append(Matrix.from_rows(f, [[int(v) for v in row] for row in coeff]))
                where.append((i, j))

    _logger.debug("commuting: %d equation(s) in %d + %d unknowns", len(mats), len(yp), len(xp))
    sys = BilinearSystem(f, len(yp), len(xp), tuple(mats), (f.zero,) * len(mats))
    return CommutingSystem(sys, tuple(yp), tuple(xp), tuple(where))


def realize_commuting(cs: CommutingSystem, solution: SolutionPair, n: int) -> tuple[Matrix, Matrix]:
    """Concrete P and Q with the solution's values at the pattern positions."""
    f = cs.system.field
    p_rows = [[f.zero] * n for _ in range(n)]
    q_rows = [[f.zero] * n for _ in range(n)]
    for (i, j), v in zip(cs.y_positions, solution.y):
        p_rows[i][j] = v
    for (i, j), v in zip(cs.x_positions, solution.x):
        q_rows[i][j] = v
    return Matrix.from_rows(f, p_rows), Matrix.from_rows(f, q_rows)


# ---------- Quaternion pairs -------------------------------------------------

# (v x w)_k = v^T C_k w with the right-handed convention (v x w)_1 = v2 w3 - v3 w2.
_CROSS = (
    ((1, 2, 1), (2, 1, -1)),
    ((2, 0, 1), (0, 2, -1)),
    ((0, 1, 1), (1, 0, -1)),
)


def quaternion_bls(d0: Sequence, f: FieldSpec | None = None) -> BilinearSystem:
    """T(v, w) = d0 with v as y and w as x; p = q = 3, m = 4."""
    f = f or FieldSpec.rationals()
    if len(d0) != 4:
        raise DimensionMismatch(f"d0 has {len(d0)} entries, expected 4")
    mats = [Matrix.identity(f, 3)]
    for terms in _CROSS:
        rows = [[0] * 3 for _ in range(3)]
        for i, j, s in terms:
            rows[i][j] = s
        mats.append(Matrix.from_rows(f, rows))
    return BilinearSystem(f, 3, 3, tuple(mats), tuple(f(v) for v in d0))


def cross(v: Sequence[Scalar], w: Sequence[Scalar]) -> tuple[Scalar, ...]:
    return (v[1] * w[2] - v[2] * w[1], v[2] * w[0] - v[0] * w[2], v[0] * w[1] - v[1] * w[0])


def quaternion_map(v: Sequence[Scalar], w: Sequence[Scalar], f: FieldSpec) -> tuple[Scalar, ...]:
    return (dot(v, w, f), *cross(v, w))


def quaternion_pair(d0: Sequence, f: FieldSpec | None = None) -> SolutionPair:
    """Closed-form (w, v) with T(v, w) = d0.

    With c = d0[1:] nonzero take v orthogonal to c and
    w = (s v + c x v) / |v|^2; for c = 0 take v = e1, w = s e1.
    """
    f = f or FieldSpec.rationals()
    s, *c = (f(v) for v in d0)
    zero, one = f.zero, f.one
    if not any(c):
        return SolutionPair((s, zero, zero), (one, zero, zero))
    candidates = [(c[1], -c[0], zero), (zero, c[2], -c[1]), (c[2], zero, -c[0])]
    for v in candidates:
        norm = dot(v, v, f)
        if norm:
            cv = cross(c, v)
            w = tuple((s * a + b) / norm for a, b in zip(v, cv))
            return SolutionPair(w, v)
    raise DivisionByZero(f"every vector orthogonal to c is isotropic in {f}")
