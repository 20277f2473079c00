"""
Bilinear system model: y^T A_i x = g_i for i = 1..m, A_i in F^(p x q).

vec stacks columns (first column first), so entry k*p + r of vec(A) is
A[r, k]. Everything downstream (pencil z-coordinates, minor order) relies on
this ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from src.errors import DimensionMismatch, FieldMismatch
from src.fields import FieldSpec, Scalar, format_scalar
from src.linalg import Matrix, Vector, dot, vector

__all__ = [
    "Matrix", "Vector", "BilinearSystem", "SolutionPair", "SliceSet",
    "vec", "unvec", "evaluate", "slices", "assemble_Y", "assemble_X", "stack",
]


# ---------- Types ------------------------------------------------------------

@dataclass(frozen=True)
class BilinearSystem:
    field: FieldSpec
    p: int
    q: int
    matrices: tuple[Matrix, ...]
    rhs: tuple[Scalar, ...]

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise DimensionMismatch(f"p and q must be positive, got {self.p}x{self.q}")
        if len(self.rhs) != len(self.matrices):
            raise DimensionMismatch(f"{len(self.matrices)} matrices but {len(self.rhs)} right-hand sides")
        for k, a in enumerate(self.matrices, start=1):
            if a.shape != (self.p, self.q):
                raise DimensionMismatch(f"A_{k} is {a.rows}x{a.cols}, expected {self.p}x{self.q}")
            if a.field != self.field:
                raise FieldMismatch(f"A_{k} is over {a.field}, system over {self.field}")
        for g in self.rhs:
            if g.field != self.field:
                raise FieldMismatch(f"rhs entry over {g.field}, system over {self.field}")

    @classmethod
    def build(cls, f: FieldSpec, matrices: Iterable, rhs: Iterable) -> "BilinearSystem":
        mats = tuple(a if isinstance(a, Matrix) else Matrix.from_rows(f, a) for a in matrices)
        if not mats:
            raise DimensionMismatch("a system needs at least one matrix to fix p and q")
        return cls(f, mats[0].rows, mats[0].cols, mats, vector(f, rhs))

    @property
    def m(self) -> int:
        return len(self.matrices)

    @property
    def r(self) -> int:
        """pq - m; meaningful once the matrices are independent."""
        return self.p * self.q - self.m

    @property
    def is_homogeneous(self) -> bool:
        return not any(self.rhs)

    def with_rhs(self, rhs: Iterable) -> "BilinearSystem":
        return BilinearSystem(self.field, self.p, self.q, self.matrices, vector(self.field, rhs))

    def with_matrices(self, matrices: Sequence[Matrix], rhs: Sequence[Scalar]) -> "BilinearSystem":
        return BilinearSystem(self.field, self.p, self.q, tuple(matrices), tuple(rhs))


@dataclass(frozen=True)
class SolutionPair:
    x: Vector
    y: Vector

    @property
    def is_trivial(self) -> bool:
        return not any(self.x) or not any(self.y)

    @property
    def is_totally_nonzero(self) -> bool:
        return all(self.x) and all(self.y)

    def scaled(self, t: Scalar) -> "SolutionPair":
        """(t x, y / t): same point of the system."""
        return SolutionPair(tuple(t * a for a in self.x), tuple(b / t for b in self.y))

    def canonical(self) -> "SolutionPair":
        """Representative of the scaling class: first nonzero y entry is 1,
        or for y = 0 the first nonzero x entry is 1; (0, 0) if both vanish."""
        lead = next((b for b in self.y if b), None)
        if lead is not None:
            return self.scaled(lead)
        if not any(self.x):
            return self
        lead = next(a for a in self.x if a)
        return SolutionPair(tuple(a / lead for a in self.x), self.y)

    def sort_key(self) -> tuple:
        return (tuple(b.sort_key() for b in self.y), tuple(a.sort_key() for a in self.x))

    def solves(self, sys: BilinearSystem) -> bool:
        return not any(evaluate(sys, self))

    def __str__(self) -> str:
        xs = ", ".join(format_scalar(a) for a in self.x)
        ys = ", ".join(format_scalar(b) for b in self.y)
        return f"x=({xs}) y=({ys})"


@dataclass(frozen=True)
class SliceSet:
    row_slices: tuple[Matrix, ...]   # R_i, m x q
    col_slices: tuple[Matrix, ...]   # S_j, p x m


# ---------- Operations -------------------------------------------------------

def vec(a: Matrix) -> Vector:
    return tuple(a.entries[r][k] for k in range(a.cols) for r in range(a.rows))


def unvec(v: Sequence[Scalar], p: int, q: int, f: FieldSpec | None = None) -> Matrix:
    if len(v) != p * q:
        raise DimensionMismatch(f"vector of length {len(v)} cannot be a {p}x{q} matrix")
    if f is None:
        if not v:
            raise DimensionMismatch("cannot infer the field of an empty vector")
        f = v[0].field
    return Matrix(f, p, q, tuple(tuple(v[k * p + r] for k in range(q)) for r in range(p)))


def _check_pair(sys: BilinearSystem, s: SolutionPair):
    if len(s.x) != sys.q or len(s.y) != sys.p:
        raise DimensionMismatch(
            f"pair with |x|={len(s.x)}, |y|={len(s.y)} for a {sys.p}x{sys.q} system")
    for a in (*s.x, *s.y):
        if a.field != sys.field:
            raise FieldMismatch(f"{a.field} solution entry for a {sys.field} system")


def evaluate(sys: BilinearSystem, s: SolutionPair) -> Vector:
    """Residuals y^T A_i x - g_i."""
    _check_pair(sys, s)
    return tuple(dot(a.rapply(s.y), s.x, sys.field) - g for a, g in zip(sys.matrices, sys.rhs))


def slices(sys: BilinearSystem) -> SliceSet:
    f = sys.field
    rows = tuple(
        Matrix(f, sys.m, sys.q, tuple(a.row(i) for a in sys.matrices)) for i in range(sys.p)
    )
    cols = tuple(
        Matrix.from_columns(f, [a.col(j) for a in sys.matrices]) if sys.m else Matrix.zeros(f, sys.p, 0)
        for j in range(sys.q)
    )
    return SliceSet(rows, cols)


def assemble_Y(sys: BilinearSystem, y: Sequence[Scalar]) -> Matrix:
    """m x q matrix whose row i is y^T A_i, so Y x = g."""
    if len(y) != sys.p:
        raise DimensionMismatch(f"y has length {len(y)}, expected {sys.p}")
    return Matrix(sys.field, sys.m, sys.q, tuple(a.rapply(y) for a in sys.matrices))


def assemble_X(sys: BilinearSystem, x: Sequence[Scalar]) -> Matrix:
    """p x m matrix whose column i is A_i x, so y^T X = g^T."""
    if len(x) != sys.q:
        raise DimensionMismatch(f"x has length {len(x)}, expected {sys.q}")
    cols = [a.apply(x) for a in sys.matrices]
    return Matrix(sys.field, sys.p, sys.m, tuple(tuple(c[i] for c in cols) for i in range(sys.p)))


def stack(sys: BilinearSystem) -> Matrix:
    """pq x m matrix with column i equal to vec(A_i)."""
    columns = [vec(a) for a in sys.matrices]
    n = sys.p * sys.q
    return Matrix(sys.field, n, sys.m, tuple(tuple(c[k] for c in columns) for k in range(n)))
