"""
Brute-force ground truth over GF(p).

Every (x, y) in GF(p)^q x GF(p)^p is evaluated with numpy in chunks of y
vectors. Budgets count pair evaluations and are hard limits: an oracle
that samples is not an oracle.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from src import config
from src.bls_core import BilinearSystem, SolutionPair
from src.errors import BudgetExceeded, DimensionMismatch, InfiniteField
from src.fields import FieldSpec, Scalar
from src.linalg import Matrix
from src.rank_one import SolveMode

_logger = logging.getLogger(__name__)

_CHUNK = 1 << 20  # residues held in memory per equation


# ---------- Enumeration ------------------------------------------------------

def all_vectors(n_field: int, length: int) -> np.ndarray:
    """Every vector of GF(N)^length in lexicographic order, one per row."""
    if length == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*[np.arange(n_field, dtype=np.int64)] * length, indexing="ij")
    return np.stack(grids, axis=-1).reshape(-1, length)


def _leading_one(vs: np.ndarray) -> np.ndarray:
    """Rows whose first nonzero entry is 1."""
    nz = vs != 0
    has = nz.any(axis=1)
    first = np.argmax(nz, axis=1)
    return has & (vs[np.arange(len(vs)), first] == 1)


def _check_field(f: FieldSpec):
    if not f.is_finite:
        raise InfiniteField(f"the oracle enumerates finite fields only, got {f}")


def _check_budget(f: FieldSpec, p: int, q: int, budget: Optional[int]) -> int:
    budget = budget if budget is not None else config.default_oracle_budget()
    needed = f.modulus ** (p + q)
    if needed > budget:
        raise BudgetExceeded(needed, budget, "pair evaluations")
    return budget


@dataclass
class _Grid:
    xs: np.ndarray
    ys: np.ndarray
    mats: np.ndarray        # (m, p, q)
    modulus: int

    def chunks(self) -> Iterator[tuple[int, np.ndarray]]:
        """(offset, values) with values[k, a, b] = ys[offset + a]^T A_k xs[b] mod N."""
        step = max(1, _CHUNK // max(1, len(self.xs)))
        for lo in range(0, len(self.ys), step):
            ys = self.ys[lo:lo + step]
            vals = np.einsum("ai,kij,bj->kab", ys, self.mats, self.xs) % self.modulus
            yield lo, vals


def _grid(f: FieldSpec, p: int, q: int, matrices: Sequence[Matrix]) -> _Grid:
    n = f.modulus
    mats = np.stack([a.to_residues() for a in matrices]) if matrices else np.zeros((0, p, q), dtype=np.int64)
    return _Grid(all_vectors(n, q), all_vectors(n, p), mats, n)


def _mode_masks(grid: _Grid, mode: SolveMode) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(y-side, x-side) masks for the mode, and the canonical-representative masks."""
    xs, ys = grid.xs, grid.ys
    x_zero, y_zero = ~xs.any(axis=1), ~ys.any(axis=1)
    if mode is SolveMode.NONTRIVIAL:
        keep_y, keep_x = ~y_zero, ~x_zero
    elif mode is SolveMode.TOTALLY_NONZERO:
        keep_y, keep_x = ys.all(axis=1), xs.all(axis=1)
    else:
        keep_y, keep_x = np.ones(len(ys), bool), np.ones(len(xs), bool)
    return keep_y, keep_x, y_zero, x_zero


def _matches(vals: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    if vals.shape[0] == 0:
        return np.ones(vals.shape[1:], dtype=bool)
    return (vals == rhs[:, None, None]).all(axis=0)


# ---------- Solutions --------------------------------------------------------

def brute_force_solve(sys: BilinearSystem, mode: SolveMode = SolveMode.ANY,
                      budget: Optional[int] = None) -> list[SolutionPair]:
    """All solutions up to (t x, y / t), one canonical representative per class, sorted."""
    f = sys.field
    _check_field(f)
    _check_budget(f, sys.p, sys.q, budget)
    mode = SolveMode(mode)
    grid = _grid(f, sys.p, sys.q, sys.matrices)
    rhs = np.array([g.residue for g in sys.rhs], dtype=np.int64)
    keep_y, keep_x, y_zero, x_zero = _mode_masks(grid, mode)
    canon_y = _leading_one(grid.ys)
    canon_x = _leading_one(grid.xs) | x_zero

    out = []
    for lo, vals in grid.chunks():
        rows = slice(lo, lo + vals.shape[1])
        canon = canon_y[rows, None] | (y_zero[rows, None] & canon_x[None, :])
        hit = _matches(vals, rhs) & keep_y[rows, None] & keep_x[None, :] & canon
        for a, b in zip(*np.nonzero(hit)):
            x = tuple(f(int(v)) for v in grid.xs[b])
            y = tuple(f(int(v)) for v in grid.ys[lo + a])
            out.append(SolutionPair(x, y))
    _logger.debug("oracle: %d solution class(es) over %s, mode %s", len(out), f, mode.value)
    return sorted(out, key=SolutionPair.sort_key)


def count_raw_solutions(sys: BilinearSystem, mode: SolveMode = SolveMode.ANY,
                        budget: Optional[int] = None) -> int:
    """Number of (x, y) pairs, not classes, solving the system in the given mode."""
    f = sys.field
    _check_field(f)
    _check_budget(f, sys.p, sys.q, budget)
    grid = _grid(f, sys.p, sys.q, sys.matrices)
    rhs = np.array([g.residue for g in sys.rhs], dtype=np.int64)
    keep_y, keep_x, _, _ = _mode_masks(grid, SolveMode(mode))
    total = 0
    for lo, vals in grid.chunks():
        rows = slice(lo, lo + vals.shape[1])
        total += int((_matches(vals, rhs) & keep_y[rows, None] & keep_x[None, :]).sum())
    return total


# ---------- Image ------------------------------------------------------------

@dataclass(frozen=True)
class ImageReport:
    field_size: int
    p: int
    q: int
    m: int
    attained: int
    bound: int
    total: int
    violations: tuple[str, ...] = field(default=())

    @property
    def bound_applies(self) -> bool:
        return self.m >= self.p + self.q

    @property
    def surjective(self) -> bool:
        return self.attained == self.total


def _shape_of(matrices: Sequence[Matrix], f: Optional[FieldSpec]) -> tuple[FieldSpec, int, int]:
    if not matrices:
        raise DimensionMismatch("need at least one matrix")
    f = f or matrices[0].field
    p, q = matrices[0].shape
    if any(a.shape != (p, q) for a in matrices):
        raise DimensionMismatch("matrices differ in shape")
    return f, p, q


def _image_codes(f: FieldSpec, p: int, q: int, matrices: Sequence[Matrix]) -> np.ndarray:
    """Sorted distinct codes of F(x, y); g1 is the most significant digit."""
    grid = _grid(f, p, q, matrices)
    m = len(matrices)
    weights = f.modulus ** np.arange(m - 1, -1, -1, dtype=np.int64)
    seen = np.zeros(0, dtype=np.int64)
    for _, vals in grid.chunks():
        codes = np.tensordot(weights, vals, axes=1).ravel()
        seen = np.union1d(seen, codes)
    return seen


def image_cardinality(matrices: Sequence[Matrix], f: Optional[FieldSpec] = None,
                      budget: Optional[int] = None) -> ImageReport:
    f, p, q = _shape_of(matrices, f)
    _check_field(f)
    _check_budget(f, p, q, budget)
    n, m = f.modulus, len(matrices)
    attained = len(_image_codes(f, p, q, matrices))
    bound = (n ** q - 1) * (n ** p - 1) // (n - 1) + 1
    total = n ** m

    violations = []
    if m >= p + q:
        if attained > min(bound, total):
            violations.append(f"attained {attained} exceeds min(bound {bound}, total {total})")
        if attained >= total:
            violations.append(f"map is onto GF({n})^{m} although m >= p + q")
    if violations:
        _logger.error("image bound violated for p=%d q=%d m=%d over GF(%d): %s", p, q, m, n, violations)
    return ImageReport(n, p, q, m, attained, bound, total, tuple(violations))


def always_solvable_exhaustive(matrices: Sequence[Matrix], f: Optional[FieldSpec] = None,
                               budget: Optional[int] = None) -> tuple[bool, Optional[tuple[Scalar, ...]]]:
    """(True, None) if every g is attained, else (False, first unattained g in lexicographic order)."""
    f, p, q = _shape_of(matrices, f)
    _check_field(f)
    _check_budget(f, p, q, budget)
    n, m = f.modulus, len(matrices)
    codes = _image_codes(f, p, q, matrices)
    if len(codes) == n ** m:
        return True, None
    # codes is sorted and starts at 0, so the first gap is the first missing code
    gaps = np.flatnonzero(codes != np.arange(len(codes)))
    missing = int(gaps[0]) if len(gaps) else len(codes)
    digits = []
    for _ in range(m):
        missing, d = divmod(missing, n)
        digits.append(f(d))
    return False, tuple(reversed(digits))
