"""
Structural certificates for solvability with every right-hand side.

Sufficient witnesses: m <= 2, the 3-corner property of the collective
support, and a specialization of some variables to constants that leaves a
linear system of full row rank independent of g. Necessary: m <= p + q - 1.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Mapping, Optional, Sequence

import numpy as np
import sympy
from sympy import QQ
from sympy.polys.polyerrors import CoercionFailed

from src import config
from src.bls_core import BilinearSystem, SolutionPair, assemble_X, assemble_Y, evaluate, stack
from src.errors import (DependentMatrices, DimensionMismatch, NotThreeCorner, ParseError,
                        SingularAfterSpecialization, InternalInconsistency)
from src.fields import FieldKind, FieldSpec, Scalar, enumerate_field
from src.linalg import Matrix, in_span, nullspace, rank, solve_linear
from src.reduction import normalize_rhs

_logger = logging.getLogger(__name__)


# ---------- Support patterns -------------------------------------------------

@dataclass(frozen=True)
class SupportPattern:
    p: int
    q: int
    mask: tuple[tuple[bool, ...], ...]

    @classmethod
    def from_array(cls, arr) -> "SupportPattern":
        arr = np.asarray(arr, dtype=bool)
        return cls(arr.shape[0], arr.shape[1], tuple(tuple(bool(v) for v in row) for row in arr))

    @classmethod
    def parse(cls, text: str) -> "SupportPattern":
        """Rows separated by '/', '*' for nonzero and '0' for zero: "*0/0*"."""
        rows = [r.strip() for r in text.strip().split("/")]
        if not rows or any(len(r) != len(rows[0]) or set(r) - {"*", "0"} for r in rows):
            raise ParseError(f"bad pattern {text!r}; expected rows of '*' and '0' separated by '/'")
        return cls.from_array([[c == "*" for c in r] for r in rows])

    @property
    def array(self) -> np.ndarray:
        return np.array(self.mask, dtype=bool).reshape(self.p, self.q)

    @property
    def count(self) -> int:
        return int(self.array.sum())

    def positions(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.p) for j in range(self.q) if self.mask[i][j]]

    def permuted(self, rows: Sequence[int], cols: Sequence[int]) -> "SupportPattern":
        return SupportPattern.from_array(self.array[np.ix_(list(rows), list(cols))])

    def __str__(self) -> str:
        return "\n".join(" ".join("*" if v else "0" for v in row) for row in self.mask)


def collective_support(sys: BilinearSystem) -> SupportPattern:
    arr = np.zeros((sys.p, sys.q), dtype=bool)
    for a in sys.matrices:
        arr |= a.support()
    return SupportPattern.from_array(arr)


def has_three_corner_property(pat: SupportPattern) -> bool:
    """No 2x2 submask with 3 or 4 nonzero entries."""
    if pat.p < 2 or pat.q < 2:
        return True
    arr = pat.array.astype(np.int8)
    ia, ib = np.triu_indices(pat.p, 1)
    rows = arr[ia] + arr[ib]                         # (row pairs, q)
    ja, jb = np.triu_indices(pat.q, 1)
    corners = rows[:, ja] + rows[:, jb]              # (row pairs, column pairs)
    return not bool((corners >= 3).any())


@dataclass(frozen=True)
class ThreeCornerTerms:
    """Row terms y_i (sum x_j) and column terms x_j (sum y_i) covering the support."""
    row_terms: tuple[tuple[int, tuple[int, ...]], ...]
    col_terms: tuple[tuple[int, tuple[int, ...]], ...]


def three_corner_terms(pat: SupportPattern) -> ThreeCornerTerms:
    if not has_three_corner_property(pat):
        raise NotThreeCorner("support has a 2x2 subpattern with three nonzero entries")
    arr = pat.array
    row_n, col_n = arr.sum(axis=1), arr.sum(axis=0)
    row_terms, col_terms = [], []
    for i in range(pat.p):
        cols = tuple(int(j) for j in np.flatnonzero(arr[i]))
        # singleton positions are filed as row terms
        if row_n[i] >= 2 or (row_n[i] == 1 and col_n[cols[0]] == 1):
            row_terms.append((i, cols))
    for j in range(pat.q):
        if col_n[j] >= 2:
            col_terms.append((j, tuple(int(i) for i in np.flatnonzero(arr[:, j]))))
    return ThreeCornerTerms(tuple(row_terms), tuple(col_terms))


# ---------- Specialization ---------------------------------------------------

def variable_names(p: int, q: int) -> list[str]:
    return [f"x{j + 1}" for j in range(q)] + [f"y{i + 1}" for i in range(p)]


def _split_name(name: str) -> tuple[str, int]:
    kind, idx = name[0], int(name[1:]) - 1
    if kind not in "xy" or idx < 0:
        raise ValueError(f"bad variable name {name!r}")
    return kind, idx


@dataclass(frozen=True)
class LinearSpecialization:
    """C u + c = g in the unknowns left after fixing ``assignment``."""
    sys: BilinearSystem
    assignment: tuple[tuple[str, Scalar], ...]
    unknowns: tuple[str, ...]
    coefficient: Matrix
    constant: tuple[Scalar, ...]

    @property
    def full_row_rank(self) -> bool:
        return rank(self.coefficient) == self.sys.m if self.unknowns else self.sys.m == 0

    def solve(self, g: Optional[Sequence] = None) -> Optional[SolutionPair]:
        sys = self.sys
        f = sys.field
        g = sys.rhs if g is None else tuple(f(v) for v in g)
        if len(g) != sys.m:
            raise DimensionMismatch(f"{len(g)} right-hand sides for {sys.m} equations")
        target = tuple(gi - ci for gi, ci in zip(g, self.constant))
        if self.unknowns:
            u = solve_linear(self.coefficient, target)
        else:
            u = () if not any(target) else None
        if u is None:
            return None
        x, y = [f.zero] * sys.q, [f.zero] * sys.p
        for name, value in (*self.assignment, *zip(self.unknowns, u)):
            kind, idx = _split_name(name)
            (x if kind == "x" else y)[idx] = value
        return SolutionPair(tuple(x), tuple(y))


def specialize(sys: BilinearSystem, assignment: Mapping[str, object]) -> Optional[LinearSpecialization]:
    """Fix the named variables; None if some bilinear term survives."""
    f = sys.field
    fixed_x: dict[int, Scalar] = {}
    fixed_y: dict[int, Scalar] = {}
    for name, value in assignment.items():
        kind, idx = _split_name(name)
        if idx >= (sys.q if kind == "x" else sys.p):
            raise DimensionMismatch(f"{name} is out of range for a {sys.p}x{sys.q} system")
        (fixed_x if kind == "x" else fixed_y)[idx] = f(value)

    positions = collective_support(sys).positions()
    for i, j in positions:
        if i not in fixed_y and j not in fixed_x:
            return None

    free_x = sorted({j for i, j in positions if j not in fixed_x})
    free_y = sorted({i for i, j in positions if i not in fixed_y and j in fixed_x})
    unknowns = [f"x{j + 1}" for j in free_x] + [f"y{i + 1}" for i in free_y]
    col_of = {name: k for k, name in enumerate(unknowns)}

    rows, consts = [], []
    for a in sys.matrices:
        row = [f.zero] * len(unknowns)
        const = f.zero
        for i, j in positions:
            c = a[i, j]
            if not c:
                continue
            if i in fixed_y and j in fixed_x:
                const = const + c * fixed_y[i] * fixed_x[j]
            elif i in fixed_y:
                k = col_of[f"x{j + 1}"]
                row[k] = row[k] + c * fixed_y[i]
            else:
                k = col_of[f"y{i + 1}"]
                row[k] = row[k] + c * fixed_x[j]
        rows.append(tuple(row))
        consts.append(const)

    fixed = tuple(sorted(((f"x{j + 1}", v) for j, v in fixed_x.items())) +
                  sorted(((f"y{i + 1}", v) for i, v in fixed_y.items())))
    coeff = Matrix(f, sys.m, len(unknowns), tuple(rows))
    return LinearSpecialization(sys, fixed, tuple(unknowns), coeff, tuple(consts))


@dataclass(frozen=True)
class SpecializationHit:
    strategy: str                      # "y", "x" or "mixed"
    witness: LinearSpecialization
    always: bool                       # coefficient matrix independent of g with full row rank
    solution: Optional[SolutionPair]


def _candidate_vectors(f: FieldSpec, n: int) -> Iterator[tuple[Scalar, ...]]:
    if f.is_finite and f.modulus <= config.SMALL_FIELD:
        values = [f(k) for k in range(f.modulus)]
    else:
        values = list(dict.fromkeys(f(v) for v in config.SMALL_POOL))
    for combo in itertools.product(values, repeat=n):
        if any(combo):
            yield combo


def specialization_search(sys: BilinearSystem, budget: int = config.SPECIALIZATION_SUBSET,
                          max_trials: int = config.SPECIALIZATION_TRIALS,
                          strategies: Iterable[str] = ("y", "x", "mixed")) -> Optional[SpecializationHit]:
    """First g-independent witness found, else the first concrete-g solution.

    ``budget`` bounds the number of variables fixed to 1 in the mixed
    strategy; ``max_trials`` bounds candidate vectors per strategy.
    """
    strategies = tuple(strategies)
    concrete: Optional[SpecializationHit] = None

    def consider(hit: SpecializationHit) -> bool:
        nonlocal concrete
        if hit.always:
            return True
        if hit.solution is not None and concrete is None:
            concrete = hit
        return False

    if "y" in strategies and sys.m <= sys.q:
        for trial, y in enumerate(_candidate_vectors(sys.field, sys.p)):
            if trial >= max_trials:
                break
            if rank(assemble_Y(sys, y)) == sys.m:
                spec = specialize(sys, {f"y{i + 1}": v for i, v in enumerate(y)})
                hit = SpecializationHit("y", spec, True, spec.solve())
                _logger.debug("specialization: full-y witness y=%s", [str(v) for v in y])
                return hit

    if "x" in strategies and sys.m <= sys.p:
        for trial, x in enumerate(_candidate_vectors(sys.field, sys.q)):
            if trial >= max_trials:
                break
            if rank(assemble_X(sys, x)) == sys.m:
                spec = specialize(sys, {f"x{j + 1}": v for j, v in enumerate(x)})
                _logger.debug("specialization: full-x witness x=%s", [str(v) for v in x])
                return SpecializationHit("x", spec, True, spec.solve())

    if "mixed" in strategies:
        names = variable_names(sys.p, sys.q)
        trials = 0
        for size in range(1, budget + 1):
            for subset in itertools.combinations(names, size):
                trials += 1
                if trials > max_trials:
                    break
                spec = specialize(sys, {name: 1 for name in subset})
                if spec is None:
                    continue
                if consider(SpecializationHit("mixed", spec, spec.full_row_rank, spec.solve())):
                    _logger.debug("specialization: mixed witness %s", subset)
                    return SpecializationHit("mixed", spec, True, spec.solve())
    return concrete


# ---------- Constructive solvers ---------------------------------------------

def _check_solution(sys: BilinearSystem, s: SolutionPair, what: str) -> SolutionPair:
    if any(evaluate(sys, s)):
        raise InternalInconsistency(f"{what} produced a pair with nonzero residual")
    return s


def _with_rhs(sys: BilinearSystem, g) -> BilinearSystem:
    return sys if g is None else sys.with_rhs(g)


def three_corner_specialization(sys: BilinearSystem) -> LinearSpecialization:
    terms = three_corner_terms(collective_support(sys))
    assignment = {f"y{i + 1}": 1 for i, _ in terms.row_terms}
    assignment.update({f"x{j + 1}": 1 for j, _ in terms.col_terms})
    spec = specialize(sys, assignment)
    if spec is None:
        raise SingularAfterSpecialization("3-corner specialization left a bilinear term")
    return spec


def solve_three_corner(sys: BilinearSystem, g: Optional[Sequence] = None) -> SolutionPair:
    sys = _with_rhs(sys, g)
    spec = three_corner_specialization(sys)
    s = spec.solve()
    if s is None:
        raise SingularAfterSpecialization("3-corner specialization gave an unsolvable linear system")
    return _check_solution(sys, s, "solve_three_corner")


def _completion(vectors: list[tuple[Scalar, ...]], f: FieldSpec, n: int) -> list[tuple[Scalar, ...]]:
    chosen: list[tuple[Scalar, ...]] = []
    for j in range(n):
        e = tuple(f.one if k == j else f.zero for k in range(n))
        if not in_span(vectors + chosen, e, f):
            chosen.append(e)
    return chosen


def solve_m2(sys: BilinearSystem, g: Optional[Sequence] = None) -> SolutionPair:
    """Constructive solution for m <= 2 independent matrices, any g."""
    sys = _with_rhs(sys, g)
    f = sys.field
    if sys.m > 2:
        raise DependentMatrices(f"solve_m2 handles m <= 2, got m = {sys.m}")
    if sys.m and rank(stack(sys)) < sys.m:
        raise DependentMatrices("matrices are linearly dependent")

    if sys.m == 0:
        return SolutionPair((f.zero,) * sys.q, (f.zero,) * sys.p)
    if sys.m == 1:
        a, g1 = sys.matrices[0], sys.rhs[0]
        i, j = next((i, j) for i in range(sys.p) for j in range(sys.q) if a[i, j])
        x = tuple(g1 / a[i, j] if k == j else f.zero for k in range(sys.q))
        y = tuple(f.one if k == i else f.zero for k in range(sys.p))
        return _check_solution(sys, SolutionPair(x, y), "solve_m2")
    if sys.is_homogeneous:
        return SolutionPair((f.zero,) * sys.q, (f.zero,) * sys.p)

    norm = normalize_rhs(sys)
    b1, b2 = norm.matrices
    kernel = nullspace(b2)
    extra = _completion(list(kernel), f, sys.q)
    sums = [tuple(u + v for u, v in zip(a, b)) for a, b in itertools.combinations(extra, 2)]

    for x in itertools.chain(kernel, extra, sums):
        u1, u2 = b1.apply(x), b2.apply(x)
        if in_span([u2], u1, f):
            continue
        y = solve_linear(Matrix(f, 2, sys.p, (u2, u1)), (f.zero, f.one))
        if y is None:
            continue
        return _check_solution(sys, SolutionPair(tuple(x), y), "solve_m2")
    raise DependentMatrices("no x with A_1 x outside span(A_2 x); matrices must be dependent")


# ---------- Line search ------------------------------------------------------

def _transposed(sys: BilinearSystem) -> BilinearSystem:
    return BilinearSystem(sys.field, sys.q, sys.p, tuple(a.T for a in sys.matrices), sys.rhs)


def _field_roots(poly_expr, t: sympy.Symbol, f: FieldSpec) -> Optional[list[Scalar]]:
    """Roots of a univariate polynomial lying in f; None if it vanishes identically on f."""
    if f.kind is FieldKind.PRIME:
        poly = sympy.Poly(poly_expr, t, modulus=f.modulus)
        if poly.is_zero:
            return None
        _, factors = poly.factor_list()
        return [-f(int(g.nth(0))) / f(int(g.nth(1))) for g, _ in factors if g.degree() == 1]
    if sympy.expand(poly_expr) == 0:
        return None
    if f.kind is FieldKind.RATIONALS:
        found = sympy.Poly(poly_expr, t, domain=QQ).ground_roots()
    else:
        found = sympy.roots(poly_expr, t)
    out = []
    for root in found:
        try:
            out.append(f.from_expr(root))
        except (CoercionFailed, sympy.SympifyError, TypeError, ValueError):
            continue
    return out


def _line_search_y(sys: BilinearSystem, pool: Sequence[int], max_trials: int,
                   budget: int) -> Optional[SolutionPair]:
    """Fix all but one y coordinate; pick the last so that g lies in the column space of Y(y).

    At most ``budget`` linear solves are attempted.
    """
    f = sys.field
    values = list(dict.fromkeys(f(v) for v in pool))
    whole_field = f.is_finite and f.modulus <= config.SMALL_FIELD
    t = sympy.Symbol("t")
    trials = solves = 0
    for free in range(sys.p):
        for fixed in itertools.product(values, repeat=sys.p - 1):
            trials += 1
            if trials > max_trials:
                return None
            candidates = None
            if whole_field:
                candidates = list(enumerate_field(f))
            elif sys.m == sys.q + 1:
                y_expr = [v.as_expr() for v in fixed]
                y_expr.insert(free, t)
                rows = [[sum(a[r, c].as_expr() * y_expr[r] for r in range(sys.p)) for c in range(sys.q)]
                        + [g.as_expr()] for a, g in zip(sys.matrices, sys.rhs)]
                det = sympy.expand(sympy.Matrix(rows).det(method="berkowitz"))
                candidates = _field_roots(det, t, f)
            for value in values if candidates is None else candidates:
                solves += 1
                if solves > budget:
                    _logger.debug("line search: budget of %d linear solves reached", budget)
                    return None
                y = list(fixed)
                y.insert(free, value)
                x = solve_linear(assemble_Y(sys, y), sys.rhs)
                if x is not None and any(y):
                    return SolutionPair(x, tuple(y))
    return None


def line_search(sys: BilinearSystem, pool: Sequence[int] = config.SMALL_POOL,
                max_trials: int = config.SPECIALIZATION_TRIALS,
                budget: Optional[int] = None) -> Optional[SolutionPair]:
    """Concrete-g search for m <= max(p, q) + 1 by solving for one coordinate of y (or x) exactly.

    When m = q + 1 the free coordinate is a root of det[Y(y) | g]; the
    x-side search runs the same procedure on the transposed system. Prime
    fields up to SMALL_FIELD elements are enumerated; larger ones use the
    root of the determinant or the pool. ``budget`` bounds the linear solves
    of each side.
    """
    if sys.field.kind is FieldKind.FUNCTIONS or sys.m == 0:
        return None
    budget = config.default_budget() if budget is None else budget
    if sys.m <= sys.q + 1:
        s = _line_search_y(sys, pool, max_trials, budget)
        if s is not None:
            return _check_solution(sys, s, "line_search")
    if sys.m <= sys.p + 1:
        s = _line_search_y(_transposed(sys), pool, max_trials, budget)
        if s is not None:
            _logger.debug("line search: solved on the transposed system")
            return _check_solution(sys, SolutionPair(s.y, s.x), "line_search")
    return None


# ---------- Certificates -----------------------------------------------------

class Verdict(Enum):
    YES = "YES"
    VIOLATES_BOUND = "NO"
    UNKNOWN = "UNKNOWN"


class WitnessKind(Enum):
    MLE2 = "MLE2"
    THREE_CORNER = "ThreeCorner"
    SPECIALIZATION = "Specialization"


@dataclass(frozen=True)
class AlwaysSolvableCertificate:
    verdict: Verdict
    witness: Optional[WitnessKind] = None
    specialization: Optional[LinearSpecialization] = None
    sys: Optional[BilinearSystem] = None

    @property
    def summary(self) -> str:
        if self.verdict is Verdict.VIOLATES_BOUND:
            return "always solvable: NO (m ≥ p+q)"
        if self.verdict is Verdict.UNKNOWN:
            return "always solvable: UNKNOWN (no structural witness)"
        label = {
            WitnessKind.MLE2: "m ≤ 2",
            WitnessKind.THREE_CORNER: "3-corner property",
            WitnessKind.SPECIALIZATION: "specialization",
        }[self.witness]
        return f"always solvable: YES ({label})"

    def replay(self, g: Sequence) -> SolutionPair:
        """Solve the certified system for a concrete right-hand side."""
        if self.verdict is not Verdict.YES:
            raise ValueError(f"a {self.verdict.name} certificate has no witness to replay")
        target = self.sys.with_rhs(g)
        if self.witness is WitnessKind.MLE2:
            return solve_m2(target)
        if self.witness is WitnessKind.THREE_CORNER:
            return solve_three_corner(target)
        s = self.specialization.solve(target.rhs)
        if s is None:
            raise SingularAfterSpecialization("specialization witness failed on a concrete g")
        return _check_solution(target, s, "specialization witness")


def certify_always_solvable(sys: BilinearSystem, subset: int = config.SPECIALIZATION_SUBSET,
                            max_trials: int = config.SPECIALIZATION_TRIALS) -> AlwaysSolvableCertificate:
    if sys.m and rank(stack(sys)) < sys.m:
        raise DependentMatrices("certificates need linearly independent matrices; reduce first")
    if sys.m >= sys.p + sys.q:
        return AlwaysSolvableCertificate(Verdict.VIOLATES_BOUND, sys=sys)
    if sys.m <= 2:
        return AlwaysSolvableCertificate(Verdict.YES, WitnessKind.MLE2, sys=sys)
    if has_three_corner_property(collective_support(sys)):
        return AlwaysSolvableCertificate(Verdict.YES, WitnessKind.THREE_CORNER,
                                         three_corner_specialization(sys), sys)
    hit = specialization_search(sys, subset, max_trials)
    if hit is not None and hit.always:
        return AlwaysSolvableCertificate(Verdict.YES, WitnessKind.SPECIALIZATION, hit.witness, sys)
    return AlwaysSolvableCertificate(Verdict.UNKNOWN, sys=sys)
