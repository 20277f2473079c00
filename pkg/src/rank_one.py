"""
Rank-one completion of an affine pencil, and the solve() dispatcher.

A nonzero matrix has rank one iff every 2x2 minor vanishes. The minors of
K(z) are polynomials of degree <= 2 in z; for r <= 1 they are decided
exactly, over GF(p) the whole parameter space is enumerated when the budget
allows, and otherwise solve() falls back to constructive structural solvers
and a sweep over one-parameter sub-pencils.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np
import sympy

from src import config
from src.bls_core import BilinearSystem, SolutionPair, evaluate, vec
from src.errors import BudgetExceeded, DimensionMismatch, InternalInconsistency, NotRankOne
from src.fields import FieldSpec, Scalar, format_scalar, sqrt
from src.linalg import Matrix, in_span, rank
from src.pencil import AffinePencil, build_pencil, pencil_eval
from src.reduction import ReductionReport, reduce_system

_logger = logging.getLogger(__name__)


# ---------- Quadratic polynomials --------------------------------------------

@dataclass(frozen=True)
class QuadPoly:
    """c + sum_k b_k z_k + sum_{k<=l} a_kl z_k z_l, a stored upper-triangular."""
    field: FieldSpec
    r: int
    constant: Scalar
    linear: tuple[Scalar, ...]
    quadratic: tuple[tuple[Scalar, ...], ...]

    def evaluate(self, z: Sequence) -> Scalar:
        if len(z) != self.r:
            raise DimensionMismatch(f"polynomial in {self.r} variables evaluated at {len(z)} values")
        z = [self.field(v) for v in z]
        acc = self.constant
        for k in range(self.r):
            if self.linear[k] and z[k]:
                acc = acc + self.linear[k] * z[k]
            for l in range(k, self.r):
                if self.quadratic[k][l] and z[k] and z[l]:
                    acc = acc + self.quadratic[k][l] * z[k] * z[l]
        return acc

    @property
    def degree(self) -> int:
        if any(any(row) for row in self.quadratic):
            return 2
        if any(self.linear):
            return 1
        return 0 if self.constant else -1

    @property
    def is_zero(self) -> bool:
        return self.degree < 0

    def univariate(self) -> tuple[Scalar, Scalar, Scalar]:
        """(c, b, a) of c + b z + a z^2; r must be 1."""
        if self.r != 1:
            raise DimensionMismatch(f"polynomial has {self.r} variables, not 1")
        return self.constant, self.linear[0], self.quadratic[0][0]

    def as_expr(self, names: Optional[Sequence[str]] = None):
        zs = sympy.symbols(list(names) if names else [f"z{k + 1}" for k in range(self.r)])
        expr = self.constant.as_expr()
        for k in range(self.r):
            expr += self.linear[k].as_expr() * zs[k]
            for l in range(k, self.r):
                expr += self.quadratic[k][l].as_expr() * zs[k] * zs[l]
        return sympy.expand(expr)

    def __str__(self) -> str:
        return str(self.as_expr())


def _affine_entries(pencil: AffinePencil):
    return [[(pencil.K0[i, j], tuple(k[i, j] for k in pencil.basis)) for j in range(pencil.q)]
            for i in range(pencil.p)]


def _product(u, v, f: FieldSpec, r: int):
    u0, us = u
    v0, vs = v
    const = u0 * v0
    lin = [u0 * vs[k] + v0 * us[k] for k in range(r)]
    quad = [[f.zero] * r for _ in range(r)]
    for k in range(r):
        if not us[k] and not vs[k]:
            continue
        for l in range(k, r):
            if k == l:
                quad[k][k] = us[k] * vs[k]
            else:
                quad[k][l] = us[k] * vs[l] + us[l] * vs[k]
    return const, lin, quad


def minor_system(pencil: AffinePencil) -> list[QuadPoly]:
    """All 2x2 minors of K(z), ordered by (row pair, column pair)."""
    f, r = pencil.field, pencil.r
    entries = _affine_entries(pencil)
    out = []
    for a, b in itertools.combinations(range(pencil.p), 2):
        for c, d in itertools.combinations(range(pencil.q), 2):
            c1, l1, q1 = _product(entries[a][c], entries[b][d], f, r)
            c2, l2, q2 = _product(entries[a][d], entries[b][c], f, r)
            out.append(QuadPoly(
                f, r, c1 - c2,
                tuple(x - y for x, y in zip(l1, l2)),
                tuple(tuple(x - y for x, y in zip(r1, r2)) for r1, r2 in zip(q1, q2)),
            ))
    return out


def contiguous_minors(pencil: AffinePencil) -> list[QuadPoly]:
    """Only the minors on adjacent rows and adjacent columns."""
    keep = []
    idx = 0
    for a, b in itertools.combinations(range(pencil.p), 2):
        for c, d in itertools.combinations(range(pencil.q), 2):
            if b == a + 1 and d == c + 1:
                keep.append(idx)
            idx += 1
    polys = minor_system(pencil)
    return [polys[k] for k in keep]


# ---------- Rank and factoring -----------------------------------------------

def exact_rank(m: Matrix) -> int:
    return rank(m)


def factor_rank_one(k: Matrix) -> SolutionPair:
    """(x, y) with y x^T = K; y is the first nonzero column scaled to lead with 1."""
    if exact_rank(k) != 1:
        raise NotRankOne(f"matrix has rank {exact_rank(k)}")
    j0 = next(j for j in range(k.cols) if any(k.col(j)))
    col = k.col(j0)
    i0 = next(i for i, a in enumerate(col) if a)
    y = tuple(a / col[i0] for a in col)
    return SolutionPair(k.row(i0), y)


def _zero_pair(f: FieldSpec, p: int, q: int) -> SolutionPair:
    return SolutionPair((f.zero,) * q, (f.zero,) * p)


def _contains_zero(pencil: AffinePencil) -> bool:
    return in_span([vec(k) for k in pencil.basis], vec(pencil.K0), pencil.field)


# ---------- Outcomes ---------------------------------------------------------

class Status(Enum):
    SOLUTIONS = "Solutions"
    NO_SOLUTION = "NoSolution"
    UNDECIDED = "Undecided"


class SolveMode(Enum):
    ANY = "any"
    NONTRIVIAL = "nontrivial"
    TOTALLY_NONZERO = "totally_nonzero"

    def accepts(self, s: SolutionPair) -> bool:
        if self is SolveMode.NONTRIVIAL:
            return not s.is_trivial
        if self is SolveMode.TOTALLY_NONZERO:
            return s.is_totally_nonzero
        return True


class CertificateKind(Enum):
    INCONSISTENT_REDUCTION = "InconsistentReduction"
    R1_NO_COMMON_ROOT = "R1NoCommonRoot"
    CONSTANT_MINOR_NONZERO = "ConstantMinorNonzero"
    EXHAUSTED_FINITE_FIELD = "ExhaustedFiniteField"
    ONLY_TRIVIAL = "OnlyTrivialSolutions"
    NO_SOLUTION_IN_MODE = "NoSolutionInMode"


class UndecidedReason(Enum):
    GENERAL_R_TOO_LARGE = "GeneralRTooLarge"
    HEURISTICS_FAILED = "HeuristicsFailed"


@dataclass(frozen=True)
class Certificate:
    kind: CertificateKind
    detail: str
    pencil: Optional[AffinePencil] = None
    polys: tuple[QuadPoly, ...] = ()
    discriminants: tuple[Scalar, ...] = ()
    report: Optional[ReductionReport] = None

    def recheck(self, budget: Optional[int] = None) -> bool:
        """Re-derive the claim from the stored data."""
        if self.kind is CertificateKind.INCONSISTENT_REDUCTION:
            rep = self.report
            if rep is None or rep.inconsistent_row is None:
                return False
            from src.linalg import replay
            n = rep.original.p * rep.original.q
            rows = replay(rep.ops, [list(vec(a)) + [g] for a, g in zip(rep.original.matrices, rep.original.rhs)])
            row = rows[rep.inconsistent_row]
            return not any(row[:n]) and bool(row[n])
        if self.kind is CertificateKind.CONSTANT_MINOR_NONZERO:
            return any(p.degree == 0 for p in self.polys)
        if self.pencil is None:
            return False
        if self.kind is CertificateKind.R1_NO_COMMON_ROOT:
            return not _r1_analysis(self.pencil).points
        if self.kind is CertificateKind.EXHAUSTED_FINITE_FIELD:
            return not any(not s.is_trivial for s in _enumerate_gf(self.pencil, budget or config.default_budget()))
        return True


@dataclass(frozen=True)
class SolverOutcome:
    status: Status
    solutions: tuple[SolutionPair, ...] = ()
    certificate: Optional[Certificate] = None
    reason: Optional[UndecidedReason] = None
    notes: tuple[str, ...] = ()

    @classmethod
    def found(cls, solutions: Iterable[SolutionPair], notes=()) -> "SolverOutcome":
        sols = canonical_sorted(solutions)
        if not sols:
            raise InternalInconsistency("Solutions outcome without solutions")
        return cls(Status.SOLUTIONS, sols, notes=tuple(notes))

    @classmethod
    def none(cls, certificate: Certificate, notes=()) -> "SolverOutcome":
        return cls(Status.NO_SOLUTION, (), certificate, notes=tuple(notes))

    @classmethod
    def undecided(cls, reason: UndecidedReason, notes=()) -> "SolverOutcome":
        return cls(Status.UNDECIDED, (), None, reason, tuple(notes))

    @property
    def exit_code(self) -> int:
        return {Status.SOLUTIONS: 0, Status.NO_SOLUTION: 1, Status.UNDECIDED: 2}[self.status]


def canonical_sorted(pairs: Iterable[SolutionPair]) -> tuple[SolutionPair, ...]:
    return tuple(sorted({s.canonical() for s in pairs}, key=SolutionPair.sort_key))


# ---------- r = 0 ------------------------------------------------------------

def solve_complete(pencil: AffinePencil) -> SolverOutcome:
    if pencil.r != 0:
        raise DimensionMismatch(f"solve_complete needs r = 0, got r = {pencil.r}")
    k0 = pencil.K0
    if k0.is_zero:
        return SolverOutcome.found([_zero_pair(pencil.field, pencil.p, pencil.q)],
                                   notes=["K0 = 0: only trivial solutions"])
    rk = exact_rank(k0)
    if rk == 1:
        return SolverOutcome.found([factor_rank_one(k0)])
    polys = tuple(p for p in minor_system(pencil) if p.degree == 0)
    return SolverOutcome.none(Certificate(
        CertificateKind.CONSTANT_MINOR_NONZERO,
        f"complete system: K0 has rank {rk}; nonzero minor {polys[0]}",
        pencil, polys[:1]))


# ---------- r = 1 ------------------------------------------------------------

@dataclass
class _R1Analysis:
    points: list[Matrix] = field(default_factory=list)
    zero_seen: bool = False
    constant_violation: Optional[QuadPoly] = None
    discriminants: list[Scalar] = field(default_factory=list)
    exhaustive: bool = True
    notes: list[str] = field(default_factory=list)


def _univariate_roots(poly: QuadPoly, f: FieldSpec, out: _R1Analysis) -> list[Scalar]:
    c, b, a = poly.univariate()
    if not a:
        return [-c / b]
    if f.is_finite and f.modulus == 2:
        return [z for z in (f.zero, f.one) if poly.evaluate([z]).is_zero]
    disc = b * b - 4 * a * c
    out.discriminants.append(disc)
    s = sqrt(disc)
    if s is None:
        out.notes.append(f"discriminant {format_scalar(disc)} has no square root in {f}")
        return []
    roots = [(-b + s) / (2 * a), (-b - s) / (2 * a)]
    return list(dict.fromkeys(roots))


def _r1_analysis(pencil: AffinePencil, pool: Sequence[int] = config.SMALL_POOL,
                 limit: Optional[int] = None) -> _R1Analysis:
    """Rank-one points of an r = 1 pencil; fields larger than ``limit`` are sampled from ``pool``."""
    f = pencil.field
    out = _R1Analysis()
    polys = minor_system(pencil)

    for poly in polys:
        if poly.degree == 0:
            out.constant_violation = poly
            return out

    live = [p for p in polys if p.degree > 0]
    if not live:
        # every point has rank <= 1
        limit = config.default_budget() if limit is None else limit
        if f.is_finite and f.modulus <= limit:
            candidates = [f(k) for k in range(f.modulus)]
        else:
            candidates = list(dict.fromkeys(f(v) for v in pool))
            out.exhaustive = f.is_finite and len(candidates) == f.modulus
    else:
        gen = min(live, key=lambda p: p.degree)
        candidates = _univariate_roots(gen, f, out)

    for z in candidates:
        if any(not p.evaluate([z]).is_zero for p in live):
            continue
        k = pencil_eval(pencil, [z])
        if k.is_zero:
            out.zero_seen = True
        elif exact_rank(k) == 1:
            out.points.append(k)
    return out


def solve_r1(pencil: AffinePencil, budget: Optional[int] = None) -> SolverOutcome:
    return _solve_r1(pencil, budget)[0]


def _solve_r1(pencil: AffinePencil, budget: Optional[int] = None) -> tuple[SolverOutcome, bool]:
    """The outcome, and whether its solution list is complete."""
    if pencil.r != 1:
        raise DimensionMismatch(f"solve_r1 needs r = 1, got r = {pencil.r}")
    notes = []
    rg, rh = exact_rank(pencil.K0), exact_rank(pencil.basis[0])
    if abs(rg - rh) > 1:
        # z = 0 can still hit rank one when rank G = 1
        notes.append(f"rank screen: |rank G - rank H| = |{rg} - {rh}| > 1")

    res = _r1_analysis(pencil, limit=budget)
    notes.extend(res.notes)
    if res.constant_violation is not None:
        return SolverOutcome.none(Certificate(
            CertificateKind.CONSTANT_MINOR_NONZERO,
            f"minor {res.constant_violation} does not involve z and is nonzero",
            pencil, (res.constant_violation,)), notes), True

    pairs = [factor_rank_one(k) for k in res.points]
    if res.zero_seen or _contains_zero(pencil):
        pairs.append(_zero_pair(pencil.field, pencil.p, pencil.q))
    if pairs:
        if not res.exhaustive:
            notes.append("all minors vanish identically; listed points are a sample")
        return SolverOutcome.found(pairs, notes), res.exhaustive

    discs = ", ".join(format_scalar(d) for d in res.discriminants) or "none"
    return SolverOutcome.none(Certificate(
        CertificateKind.R1_NO_COMMON_ROOT,
        f"no common root of the minors in {pencil.field} (discriminants: {discs})",
        pencil, tuple(minor_system(pencil)), tuple(res.discriminants)), notes), True


# ---------- GF(p) enumeration ------------------------------------------------

_CHUNK = 1 << 15


def _factor_residues(k: np.ndarray, n: int, f: FieldSpec) -> SolutionPair:
    j0 = int(np.flatnonzero(k.any(axis=0))[0])
    col = k[:, j0]
    i0 = int(np.flatnonzero(col)[0])
    inv = pow(int(col[i0]), -1, n)
    y = tuple(f(int(v) * inv % n) for v in col)
    x = tuple(f(int(v)) for v in k[i0])
    return SolutionPair(x, y)


def _enumerate_gf(pencil: AffinePencil, budget: int) -> list[SolutionPair]:
    f = pencil.field
    n, r = f.modulus, pencil.r
    total = n ** r
    if total > budget:
        raise BudgetExceeded(total, budget, "pencil points")

    k0 = pencil.K0.to_residues()
    basis = np.stack([k.to_residues() for k in pencil.basis]) if r else np.zeros((0, pencil.p, pencil.q), np.int64)
    pairs = [(a, b, c, d)
             for a, b in itertools.combinations(range(pencil.p), 2)
             for c, d in itertools.combinations(range(pencil.q), 2)]
    found: list[SolutionPair] = []
    zero_seen = False
    powers = n ** np.arange(r, dtype=np.int64)

    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        z = (idx[:, None] // powers[None, :]) % n
        k = (k0[None, :, :] + np.einsum("nk,kij->nij", z, basis)) % n
        ok = np.ones(len(idx), dtype=bool)
        for a, b, c, d in pairs:
            minor = (k[:, a, c] * k[:, b, d] - k[:, a, d] * k[:, b, c]) % n
            ok &= minor == 0
        nonzero = k.reshape(len(idx), -1).any(axis=1)
        zero_seen = zero_seen or bool((ok & ~nonzero).any())
        for hit in np.flatnonzero(ok & nonzero):
            found.append(_factor_residues(k[hit], n, f))

    if zero_seen:
        found.append(_zero_pair(f, pencil.p, pencil.q))
    return found


def solve_finite_field(pencil: AffinePencil, budget: Optional[int] = None) -> SolverOutcome:
    """Every z in GF(p)^r; all rank-one points, factored."""
    f = pencil.field
    if not f.is_finite:
        raise DimensionMismatch(f"solve_finite_field needs a prime field, got {f}")
    budget = budget if budget is not None else config.default_budget()
    pairs = _enumerate_gf(pencil, budget)
    if pairs:
        return SolverOutcome.found(pairs)
    return SolverOutcome.none(Certificate(
        CertificateKind.EXHAUSTED_FINITE_FIELD,
        f"no rank-one point among all {f.modulus ** pencil.r} values of z in {f}^{pencil.r}",
        pencil))


# ---------- Sub-pencil sweep -------------------------------------------------

def _pool_for(f: FieldSpec, pool: Sequence[int]) -> list[Scalar]:
    return list(dict.fromkeys(f(v) for v in pool))


def sweep_subpencils(pencil: AffinePencil, mode: SolveMode = SolveMode.ANY,
                     pool: Sequence[int] = config.SMALL_POOL,
                     max_solutions: int = config.MAX_SOLUTIONS,
                     budget: int = config.SWEEP_BUDGET) -> list[SolutionPair]:
    """Free one coordinate, fix the rest from ``pool`` and solve each r = 1 piece.

    Assignments are visited level by level: level k uses the first 2k + 1
    pool values and skips tuples already seen at a lower level.
    """
    f, r = pencil.field, pencil.r
    values = _pool_for(f, pool)
    found: dict[SolutionPair, None] = {}
    visited = 0
    levels = sorted({min(len(values), 2 * k + 1) for k in range(len(values))})
    previous = 0
    for size in levels:
        level_values = values[:size]
        for free in range(r):
            for fixed in itertools.product(level_values, repeat=r - 1):
                if previous and all(v in values[:previous] for v in fixed):
                    continue
                visited += 1
                if visited > budget:
                    _logger.debug("sweep: budget of %d sub-pencils reached", budget)
                    return list(found)
                res = _r1_analysis(pencil.restrict(free, fixed), pool, limit=0)
                for k in res.points:
                    s = factor_rank_one(k).canonical()
                    if mode.accepts(s):
                        found.setdefault(s)
                if len(found) >= max_solutions:
                    return list(found)
        previous = size
    return list(found)


# ---------- Dispatcher -------------------------------------------------------

def _ones_pair(sys: BilinearSystem) -> SolutionPair:
    f = sys.field
    return SolutionPair((f.one,) * sys.q, (f.one,) * sys.p)


def _verify(sys: BilinearSystem, pairs: Iterable[SolutionPair]) -> list[SolutionPair]:
    checked = []
    for s in pairs:
        if any(evaluate(sys, s)):
            raise InternalInconsistency(f"candidate {s} does not solve the system")
        checked.append(s)
    return checked


def _structural_candidates(sys: BilinearSystem, budget: int) -> list[SolutionPair]:
    from src import structural

    out = []
    if sys.m <= 2:
        out.append(structural.solve_m2(sys))
    if structural.has_three_corner_property(structural.collective_support(sys)):
        out.append(structural.solve_three_corner(sys))
    trials = min(budget, config.SPECIALIZATION_TRIALS)
    hit = structural.specialization_search(sys, budget=config.SPECIALIZATION_SUBSET, max_trials=trials)
    if hit is not None and hit.solution is not None:
        out.append(hit.solution)
    s = structural.line_search(sys, budget=budget)
    if s is not None:
        out.append(s)
    return out


def solve(sys: BilinearSystem, budget: Optional[int] = None, mode: SolveMode = SolveMode.ANY,
          max_solutions: int = config.MAX_SOLUTIONS) -> SolverOutcome:
    budget = budget if budget is not None else config.default_budget()
    mode = SolveMode(mode)

    report = reduce_system(sys)
    if report.inconsistent:
        row = report.inconsistent_row
        return SolverOutcome.none(Certificate(
            CertificateKind.INCONSISTENT_REDUCTION,
            f"elimination leaves 0 = nonzero in row {row + 1}", report=report))
    red = report.reduced
    notes = []
    if report.dropped:
        notes.append(f"reduction dropped {report.dropped} dependent equation(s)")

    if red.m == 0:
        _logger.debug("solve: every equation reduced to 0 = 0")
        return SolverOutcome.found(_verify(sys, [_ones_pair(sys)]), notes)

    pencil = build_pencil(red)
    r = pencil.r
    exhaustive = True
    raw: Optional[SolverOutcome] = None
    f = red.field

    if r == 0:
        raw = solve_complete(pencil)
    elif r == 1:
        raw, exhaustive = _solve_r1(pencil, budget)
    elif (constant := next((p for p in minor_system(pencil) if p.degree == 0), None)) is not None:
        raw = SolverOutcome.none(Certificate(
            CertificateKind.CONSTANT_MINOR_NONZERO,
            f"minor {constant} does not involve z and is nonzero", pencil, (constant,)))
    elif f.is_finite and f.modulus ** r <= budget:
        raw = solve_finite_field(pencil, budget)
    else:
        exhaustive = False
        over_budget = f.is_finite
        if over_budget:
            _logger.warning("solve: %d^%d pencil points exceed budget %d; using heuristics",
                            f.modulus, r, budget)
            notes.append(f"enumeration of {f.modulus}^{r} points skipped (budget {budget})")
        candidates = [s for s in _structural_candidates(red, budget) if mode.accepts(s)]
        if mode is SolveMode.ANY and red.is_homogeneous:
            candidates.append(_zero_pair(f, red.p, red.q))
        candidates += sweep_subpencils(pencil, mode, max_solutions=max_solutions)
        if not candidates:
            reason = UndecidedReason.HEURISTICS_FAILED if over_budget else UndecidedReason.GENERAL_R_TOO_LARGE
            return SolverOutcome.undecided(reason, notes + [f"r = {r}: no rank-one point found"])
        return SolverOutcome.found(_verify(sys, candidates), notes + ["heuristic search; the list is not exhaustive"])

    notes.extend(raw.notes)
    if raw.status is not Status.SOLUTIONS:
        return SolverOutcome(raw.status, (), raw.certificate, raw.reason, tuple(notes))

    kept = [s for s in raw.solutions if mode.accepts(s)]
    if kept:
        return SolverOutcome.found(_verify(sys, kept), notes)
    if not exhaustive:
        return SolverOutcome.undecided(UndecidedReason.HEURISTICS_FAILED,
                                       notes + [f"no sampled point satisfies mode {mode.value}"])
    if all(s.is_trivial for s in raw.solutions):
        kind, detail = CertificateKind.ONLY_TRIVIAL, "the pencil contains no rank-one matrix"
    else:
        kind, detail = CertificateKind.NO_SOLUTION_IN_MODE, f"no solution is {mode.value.replace('_', ' ')}"
    return SolverOutcome.none(Certificate(kind, detail, pencil), notes)
