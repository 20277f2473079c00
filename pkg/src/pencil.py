"""
Affine pencil K(z) = K0 + z1 K1 + ... + zr Kr of all matrices K whose vec
solves A^T vec K = g, where A = (vec A_1, ..., vec A_m).

A pair (x, y) solves the bilinear system iff y x^T is a rank-one point of
the pencil (or K = 0 for the homogeneous case).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

from sympy import QQ

from src.bls_core import BilinearSystem, stack, unvec, vec
from src.errors import DimensionMismatch, FieldMismatch, NotReduced, SingularCompletion
from src.fields import FieldKind, FieldSpec, Scalar
from src.linalg import Matrix, in_span, inverse, rank, rref

_logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AffinePencil:
    field: FieldSpec
    p: int
    q: int
    K0: Matrix
    basis: tuple[Matrix, ...]
    # vec index of each free coordinate, when built by elimination
    free_positions: tuple[int, ...] = ()

    def __post_init__(self):
        for k, m in enumerate((self.K0, *self.basis)):
            if m.shape != (self.p, self.q):
                raise DimensionMismatch(f"pencil matrix {k} is {m.rows}x{m.cols}, expected {self.p}x{self.q}")
            if m.field != self.field:
                raise FieldMismatch(f"pencil matrix {k} is over {m.field}")

    @classmethod
    def from_matrices(cls, K0: Matrix, basis: Sequence[Matrix]) -> "AffinePencil":
        return cls(K0.field, K0.rows, K0.cols, K0, tuple(basis))

    @property
    def r(self) -> int:
        return len(self.basis)

    def __call__(self, z: Sequence) -> Matrix:
        return pencil_eval(self, z)

    def restrict(self, free_index: int, fixed: Sequence) -> "AffinePencil":
        """The r = 1 pencil in z_free_index with every other coordinate fixed.

        ``fixed`` lists values for the remaining r - 1 coordinates in order.
        """
        if len(fixed) != self.r - 1:
            raise DimensionMismatch(f"need {self.r - 1} fixed values, got {len(fixed)}")
        others = [k for k in range(self.r) if k != free_index]
        base = self.K0
        for k, value in zip(others, fixed):
            value = self.field(value)
            if value:
                base = base + self.basis[k].scale(value)
        return AffinePencil(self.field, self.p, self.q, base, (self.basis[free_index],))


# ---------- Construction -----------------------------------------------------

def build_pencil(sys: BilinearSystem) -> AffinePencil:
    """One RREF pass of [A^T | g]; free coordinates are ordered by vec index."""
    f, n = sys.field, sys.p * sys.q
    rows = [list(vec(a)) + [g] for a, g in zip(sys.matrices, sys.rhs)]
    if rows:
        ech = rref(rows, f, pivot_limit=n)
        if ech.rank < sys.m:
            raise NotReduced(f"matrices are linearly dependent (rank {ech.rank} < m = {sys.m})")
        reduced, pivots = ech.rows, ech.pivots
    else:
        reduced, pivots = [], []

    v0 = [f.zero] * n
    for row, pc in zip(reduced, pivots):
        v0[pc] = row[n]

    pivot_set = set(pivots)
    free = [j for j in range(n) if j not in pivot_set]
    basis = []
    for j in free:
        v = [f.zero] * n
        v[j] = f.one
        for row, pc in zip(reduced, pivots):
            if row[j]:
                v[pc] = -row[j]
        basis.append(unvec(v, sys.p, sys.q, f))

    _logger.debug("pencil: p=%d q=%d m=%d r=%d", sys.p, sys.q, sys.m, len(basis))
    return AffinePencil(f, sys.p, sys.q, unvec(v0, sys.p, sys.q, f), tuple(basis), tuple(free))


def default_completion(sys: BilinearSystem) -> list[tuple[Scalar, ...]]:
    """Standard basis vectors e_j for the non-pivot vec positions, increasing j."""
    f, n = sys.field, sys.p * sys.q
    pivots = rref([list(vec(a)) for a in sys.matrices], f).pivots if sys.m else []
    taken = set(pivots)
    return [tuple(f.one if k == j else f.zero for k in range(n)) for j in range(n) if j not in taken]


def build_pencil_completion(sys: BilinearSystem,
                            extra: Optional[Sequence[Sequence[Scalar]]] = None) -> AffinePencil:
    """vec K = (B^T)^-1 (g | z) with B = [A | extra] square and invertible."""
    f, n = sys.field, sys.p * sys.q
    if extra is None:
        extra = default_completion(sys)
    extra = [tuple(f(v) for v in col) for col in extra]
    if len(extra) != n - sys.m or any(len(c) != n for c in extra):
        raise DimensionMismatch(f"completion needs {n - sys.m} columns of length {n}")

    columns = [vec(a) for a in sys.matrices] + list(extra)
    bt = Matrix(f, n, n, tuple(tuple(c) for c in columns))  # rows of B^T are the columns of B
    bt_inv = inverse(bt)
    if bt_inv is None:
        raise SingularCompletion("extra columns do not complete A to an invertible matrix")

    v0 = bt_inv.apply(tuple(sys.rhs) + (f.zero,) * len(extra))
    basis = tuple(unvec(bt_inv.col(sys.m + k), sys.p, sys.q, f) for k in range(len(extra)))
    return AffinePencil(f, sys.p, sys.q, unvec(v0, sys.p, sys.q, f), basis)


# ---------- Evaluation -------------------------------------------------------

def pencil_eval(pencil: AffinePencil, z: Sequence) -> Matrix:
    if len(z) != pencil.r:
        raise DimensionMismatch(f"pencil has r={pencil.r} coordinates, got {len(z)}")
    out = pencil.K0
    for zi, k in zip(z, pencil.basis):
        zi = pencil.field(zi)
        if zi:
            out = out + k.scale(zi)
    return out


def pencil_spaces_equal(a: AffinePencil, b: AffinePencil) -> bool:
    """True iff both pencils describe the same affine set of matrices."""
    if (a.p, a.q, a.field) != (b.p, b.q, b.field):
        return False
    f, n = a.field, a.p * a.q
    va = [vec(k) for k in a.basis]
    vb = [vec(k) for k in b.basis]

    def span_rank(vs):
        return rank(Matrix(f, len(vs), n, tuple(vs))) if vs else 0

    ra, rb = span_rank(va), span_rank(vb)
    if ra != rb or span_rank(va + vb) != ra:
        return False
    diff = vec(a.K0 - b.K0)
    return in_span(va, diff, f)


def satisfies_system(pencil: AffinePencil, sys: BilinearSystem, z: Sequence) -> bool:
    """A^T vec K(z) == g."""
    k = vec(pencil_eval(pencil, z))
    return stack(sys).T.apply(k) == tuple(sys.rhs)


# ---------- Symbolic right-hand side -----------------------------------------

def symbolic_system(sys: BilinearSystem, prefix: str = "g") -> BilinearSystem:
    """The same matrices over Q(g1..gm) with right-hand side (g1, ..., gm)."""
    if sys.field.kind is not FieldKind.RATIONALS:
        raise FieldMismatch(f"symbolic right-hand sides need a system over Q, got {sys.field}")
    gf = FieldSpec.functions([f"{prefix}{i}" for i in range(1, sys.m + 1)])
    dom = gf.domain

    def lift(s: Scalar) -> Scalar:
        return Scalar(gf, dom.convert_from(s.value, QQ))

    mats = [Matrix(gf, a.rows, a.cols, tuple(tuple(lift(s) for s in r) for r in a.entries))
            for a in sys.matrices]
    return BilinearSystem(gf, sys.p, sys.q, tuple(mats), tuple(gf.gen(i) for i in range(sys.m)))


def symbolic_pencil(sys: BilinearSystem) -> AffinePencil:
    return build_pencil(symbolic_system(sys))
