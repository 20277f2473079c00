"""
Dense exact matrices and Gauss-Jordan elimination over any FieldSpec.

Elimination is deterministic: leftmost pivot column, first nonzero row below
the current position. Every row operation can be logged with its exact
coefficient so callers can replay it on other data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from src.errors import DimensionMismatch, FieldMismatch
from src.fields import FieldSpec, Scalar, format_scalar

Vector = tuple[Scalar, ...]


def vector(f: FieldSpec, values: Iterable) -> Vector:
    return tuple(f(v) for v in values)


def dot(a: Sequence[Scalar], b: Sequence[Scalar], f: FieldSpec) -> Scalar:
    if len(a) != len(b):
        raise DimensionMismatch(f"dot product of lengths {len(a)} and {len(b)}")
    acc = f.zero
    for u, v in zip(a, b):
        if u and v:
            acc = acc + u * v
    return acc


def is_zero_vector(v: Sequence[Scalar]) -> bool:
    return not any(v)


# ---------- Matrix -----------------------------------------------------------

@dataclass(frozen=True)
class Matrix:
    field: FieldSpec
    rows: int
    cols: int
    entries: tuple[tuple[Scalar, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise DimensionMismatch(f"entries do not form a {self.rows}x{self.cols} grid")
        for row in self.entries:
            for s in row:
                if s.field != self.field:
                    raise FieldMismatch(f"{s.field} entry in a {self.field} matrix")

    # ---- constructors ----
    @classmethod
    def from_rows(cls, f: FieldSpec, rows) -> "Matrix":
        grid = tuple(tuple(f(v) for v in row) for row in rows)
        ncols = len(grid[0]) if grid else 0
        return cls(f, len(grid), ncols, grid)

    @classmethod
    def zeros(cls, f: FieldSpec, rows: int, cols: int) -> "Matrix":
        z = f.zero
        return cls(f, rows, cols, tuple((z,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, f: FieldSpec, n: int) -> "Matrix":
        return cls.from_rows(f, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def unit(cls, f: FieldSpec, rows: int, cols: int, i: int, j: int) -> "Matrix":
        return cls.from_rows(f, [[1 if (a, b) == (i, j) else 0 for b in range(cols)] for a in range(rows)])

    @classmethod
    def from_columns(cls, f: FieldSpec, columns: Sequence[Sequence], rows: Optional[int] = None) -> "Matrix":
        if not columns:
            return cls.zeros(f, rows or 0, 0)
        n = len(columns[0])
        return cls.from_rows(f, [[col[i] for col in columns] for i in range(n)])

    @classmethod
    def outer(cls, f: FieldSpec, y: Sequence[Scalar], x: Sequence[Scalar]) -> "Matrix":
        return cls(f, len(y), len(x), tuple(tuple(a * b for b in x) for a in y))

    # ---- access ----
    def __getitem__(self, ij) -> Scalar:
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> Vector:
        return self.entries[i]

    def col(self, j: int) -> Vector:
        return tuple(r[j] for r in self.entries)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def T(self) -> "Matrix":
        return Matrix(self.field, self.cols, self.rows,
                      tuple(tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols)))

    @property
    def is_zero(self) -> bool:
        return not any(any(r) for r in self.entries)

    def support(self) -> np.ndarray:
        return np.array([[bool(s) for s in r] for r in self.entries], dtype=bool).reshape(self.rows, self.cols)

    # ---- algebra ----
    def _check_same(self, other: "Matrix"):
        if other.field != self.field:
            raise FieldMismatch(f"cannot combine {self.field} with {other.field} matrices")
        if other.shape != self.shape:
            raise DimensionMismatch(f"shapes {self.shape} and {other.shape} differ")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix(self.field, self.rows, self.cols,
                      tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix(self.field, self.rows, self.cols,
                      tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)))

    def __neg__(self) -> "Matrix":
        return self.scale(-self.field.one)

    def scale(self, c) -> "Matrix":
        c = self.field(c)
        return Matrix(self.field, self.rows, self.cols, tuple(tuple(c * a for a in r) for r in self.entries))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if other.field != self.field:
            raise FieldMismatch(f"cannot multiply {self.field} by {other.field} matrices")
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        cols = [other.col(j) for j in range(other.cols)]
        return Matrix(self.field, self.rows, other.cols,
                      tuple(tuple(dot(r, c, self.field) for c in cols) for r in self.entries))

    def apply(self, v: Sequence[Scalar]) -> Vector:
        if len(v) != self.cols:
            raise DimensionMismatch(f"{self.rows}x{self.cols} matrix applied to a length-{len(v)} vector")
        return tuple(dot(r, v, self.field) for r in self.entries)

    def rapply(self, v: Sequence[Scalar]) -> Vector:
        """v^T M as a tuple."""
        if len(v) != self.rows:
            raise DimensionMismatch(f"length-{len(v)} vector times a {self.rows}x{self.cols} matrix")
        return tuple(dot(v, self.col(j), self.field) for j in range(self.cols))

    def to_lists(self) -> list[list[str]]:
        return [[format_scalar(s) for s in r] for r in self.entries]

    def to_residues(self) -> np.ndarray:
        """Entries as an int64 array; GF(p) only."""
        return np.array([[s.residue for s in r] for r in self.entries], dtype=np.int64).reshape(self.rows, self.cols)

    def __str__(self) -> str:
        cells = self.to_lists()
        width = max((len(c) for r in cells for c in r), default=1)
        return "\n".join("  ".join(c.rjust(width) for c in r) for r in cells)


# ---------- Elimination ------------------------------------------------------

@dataclass(frozen=True)
class RowOp:
    """One elementary row operation.

    permute: swap rows ``target`` and ``source``.
    scale:   row[target] *= coeff.
    add:     row[target] += coeff * row[source].
    """
    kind: str
    target: int
    source: Optional[int] = None
    coeff: Optional[Scalar] = None

    def describe(self) -> str:
        if self.kind == "permute":
            return f"swap {self.target + 1} <-> {self.source + 1}"
        if self.kind == "scale":
            return f"row {self.target + 1} *= {format_scalar(self.coeff)}"
        return f"row {self.target + 1} += ({format_scalar(self.coeff)}) * row {self.source + 1}"


def apply_op(rows: list[list[Scalar]], op: RowOp) -> None:
    if op.kind == "permute":
        rows[op.target], rows[op.source] = rows[op.source], rows[op.target]
    elif op.kind == "scale":
        rows[op.target] = [op.coeff * a for a in rows[op.target]]
    elif op.kind == "add":
        src = rows[op.source]
        rows[op.target] = [a + op.coeff * b if b else a for a, b in zip(rows[op.target], src)]
    else:
        raise ValueError(f"unknown row operation {op.kind!r}")


def replay(ops: Sequence[RowOp], rows: Sequence[Sequence[Scalar]]) -> list[list[Scalar]]:
    out = [list(r) for r in rows]
    for op in ops:
        apply_op(out, op)
    return out


@dataclass
class Echelon:
    rows: list[list[Scalar]]
    pivots: list[int]
    ops: list[RowOp] = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.pivots)


def rref(rows: Sequence[Sequence[Scalar]], f: FieldSpec, pivot_limit: Optional[int] = None,
         record: bool = False) -> Echelon:
    """Reduced row echelon form. Pivots are searched only in columns < pivot_limit."""
    work = [list(r) for r in rows]
    ncols = len(work[0]) if work else 0
    limit = ncols if pivot_limit is None else pivot_limit
    ops: list[RowOp] = []
    pivots: list[int] = []

    def do(op: RowOp):
        apply_op(work, op)
        if record:
            ops.append(op)

    r = 0
    for c in range(limit):
        if r >= len(work):
            break
        found = next((i for i in range(r, len(work)) if work[i][c]), None)
        if found is None:
            continue
        if found != r:
            do(RowOp("permute", r, found))
        pivot = work[r][c]
        if pivot != pivot.field.one:
            do(RowOp("scale", r, coeff=pivot.inverse()))
        for i in range(len(work)):
            if i != r and work[i][c]:
                do(RowOp("add", i, r, -work[i][c]))
        pivots.append(c)
        r += 1
    return Echelon(work, pivots, ops)


def rank(m: Matrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    return rref(m.entries, m.field).rank


def nullspace(m: Matrix) -> list[Vector]:
    """Basis of {v : m v = 0}, one vector per free column in increasing order."""
    f = m.field
    ech = rref(m.entries, f) if m.rows else Echelon([], [])
    pivot_set = set(ech.pivots)
    basis = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        v = [f.zero] * m.cols
        v[free] = f.one
        for row, pc in zip(ech.rows, ech.pivots):
            if row[free]:
                v[pc] = -row[free]
        basis.append(tuple(v))
    return basis


def solve_linear(m: Matrix, b: Sequence[Scalar]) -> Optional[Vector]:
    """A particular solution of m v = b (free variables 0), or None."""
    if len(b) != m.rows:
        raise DimensionMismatch(f"{m.rows} equations but a length-{len(b)} right-hand side")
    f = m.field
    aug = [list(r) + [bi] for r, bi in zip(m.entries, b)]
    ech = rref(aug, f, pivot_limit=m.cols)
    for row in ech.rows[ech.rank:]:
        if row[-1]:
            return None
    v = [f.zero] * m.cols
    for row, pc in zip(ech.rows, ech.pivots):
        v[pc] = row[-1]
    return tuple(v)


def inverse(m: Matrix) -> Optional[Matrix]:
    if m.rows != m.cols:
        raise DimensionMismatch(f"non-square {m.shape} matrix has no inverse")
    f, n = m.field, m.rows
    ident = Matrix.identity(f, n)
    aug = [list(r) + list(e) for r, e in zip(m.entries, ident.entries)]
    ech = rref(aug, f, pivot_limit=n)
    if ech.rank < n:
        return None
    return Matrix(f, n, n, tuple(tuple(row[n:]) for row in ech.rows))


def in_span(vectors: Sequence[Sequence[Scalar]], v: Sequence[Scalar], f: FieldSpec) -> bool:
    if is_zero_vector(v):
        return True
    if not vectors:
        return False
    return rank(Matrix(f, len(vectors) + 1, len(v), tuple(tuple(x) for x in [*vectors, v]))) == \
        rank(Matrix(f, len(vectors), len(v), tuple(tuple(x) for x in vectors)))
