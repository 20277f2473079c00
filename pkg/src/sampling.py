"""
Random instances from a seeded numpy Generator. Same seed, same system.
"""

from __future__ import annotations

import logging
from typing import Optional, Sequence

import numpy as np

from src.bls_core import BilinearSystem, stack
from src.errors import DimensionMismatch
from src.fields import FieldKind, FieldSpec, Scalar
from src.linalg import Matrix, rank

_logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 1000


def random_scalar(f: FieldSpec, rng: np.random.Generator, bound: int = 3) -> Scalar:
    """Uniform over GF(p); integers (Gaussian integers) in [-bound, bound] otherwise."""
    if f.is_finite:
        return f(int(rng.integers(0, f.modulus)))
    if f.kind is FieldKind.GAUSSIAN:
        re, im = rng.integers(-bound, bound + 1, size=2)
        return f.gaussian_pair(int(re), int(im))
    return f(int(rng.integers(-bound, bound + 1)))


def random_vector(f: FieldSpec, n: int, rng: np.random.Generator, bound: int = 3) -> tuple[Scalar, ...]:
    return tuple(random_scalar(f, rng, bound) for _ in range(n))


def random_matrix(f: FieldSpec, p: int, q: int, rng: np.random.Generator, bound: int = 3,
                  support: Optional[np.ndarray] = None) -> Matrix:
    rows = []
    for i in range(p):
        rows.append([random_scalar(f, rng, bound) if support is None or support[i, j] else f.zero
                     for j in range(q)])
    return Matrix.from_rows(f, rows)


def random_system(f: FieldSpec, p: int, q: int, m: int, rng: np.random.Generator, bound: int = 3,
                  support: Optional[np.ndarray] = None, rhs: Optional[Sequence] = None,
                  homogeneous: bool = False) -> BilinearSystem:
    """m linearly independent p x q matrices, optionally inside a support mask.

    Draws are repeated until the matrices are independent.
    """
    slots = int(np.asarray(support, dtype=bool).sum()) if support is not None else p * q
    if m > slots:
        raise DimensionMismatch(f"{m} independent matrices do not fit in {slots} positions")
    if support is not None:
        support = np.asarray(support, dtype=bool)
    for attempt in range(MAX_ATTEMPTS):
        mats = tuple(random_matrix(f, p, q, rng, bound, support) for _ in range(m))
        sys = BilinearSystem(f, p, q, mats, (f.zero,) * m)
        if m == 0 or rank(stack(sys)) == m:
            break
    else:
        raise DimensionMismatch(f"no independent draw in {MAX_ATTEMPTS} attempts")
    if attempt:
        _logger.debug("sampling: %d redraw(s) for independence", attempt)
    if rhs is not None:
        return sys.with_rhs(rhs)
    if homogeneous:
        return sys
    return sys.with_rhs(random_vector(f, m, rng, bound))
