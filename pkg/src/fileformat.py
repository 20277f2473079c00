"""
Line-oriented system files.

    field Q            # Q | Q(i) | GF(p)
    size 2 3           # p q
    mode any           # optional: any | nontrivial | totally_nonzero
    equation 1         # rhs g_1
      0 1 0
      0 0 1

Everything after '#' is a comment. Scalars are exact: integers, a/b, and
for Q(i) forms like 1/2-3i. Errors carry 1-based line and column.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from src.bls_core import BilinearSystem
from src.errors import DimensionMismatch, ParseError
from src.fields import FieldSpec, format_scalar, parse_field, parse_scalar
from src.linalg import Matrix
from src.rank_one import SolveMode

_TOKEN = re.compile(r"\S+")


@dataclass(frozen=True)
class SystemFile:
    system: BilinearSystem
    mode: SolveMode = SolveMode.ANY


def _tokens(line: str) -> list[tuple[str, int]]:
    body = line.split("#", 1)[0]
    return [(m.group(0), m.start() + 1) for m in _TOKEN.finditer(body)]


def _scalar(f: FieldSpec, text: str, line: int, col: int):
    try:
        return parse_scalar(f, text)
    except ParseError as exc:
        raise exc.at(line, col) from None


def _int(text: str, line: int, col: int, what: str) -> int:
    if not text.isdigit() or int(text) < 1:
        raise ParseError(f"{what} must be a positive integer, got {text!r}", line, col)
    return int(text)


def parse_system(text: str, field_override: Optional[FieldSpec] = None) -> SystemFile:
    """Parse a system file; ``field_override`` reinterprets the entries over another field."""
    f: Optional[FieldSpec] = field_override
    size: Optional[tuple[int, int]] = None
    mode = SolveMode.ANY
    mats: list[Matrix] = []
    rhs = []
    pending: Optional[tuple[object, list, int]] = None  # (g, rows, line of the keyword)

    def close_equation():
        nonlocal pending
        if pending is None:
            return
        g, rows, at = pending
        if len(rows) != size[0]:
            raise ParseError(f"equation has {len(rows)} row(s), expected {size[0]}", at, 1)
        mats.append(Matrix.from_rows(f, rows))
        rhs.append(g)
        pending = None

    last = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last = lineno
        toks = _tokens(raw)
        if not toks:
            continue
        word, col = toks[0]
        key = word.lower()

        if key == "field":
            if len(toks) < 2:
                raise ParseError("field needs a value", lineno, col)
            if mats or pending:
                raise ParseError("field must come before the first equation", lineno, col)
            value = raw.split("#", 1)[0][toks[1][1] - 1:].strip()
            try:
                parsed = parse_field(value)
            except ParseError as exc:
                raise exc.at(lineno, toks[1][1]) from None
            if field_override is None:
                f = parsed
        elif key == "size":
            if len(toks) != 3:
                raise ParseError("size needs exactly two integers: p q", lineno, col)
            if mats or pending:
                raise ParseError("size must come before the first equation", lineno, col)
            size = (_int(toks[1][0], lineno, toks[1][1], "p"), _int(toks[2][0], lineno, toks[2][1], "q"))
        elif key == "mode":
            if len(toks) != 2:
                raise ParseError("mode needs one value", lineno, col)
            try:
                mode = SolveMode(toks[1][0].lower())
            except ValueError:
                raise ParseError(f"unknown mode {toks[1][0]!r}; expected any, nontrivial or totally_nonzero",
                                 lineno, toks[1][1]) from None
        elif key == "equation":
            if f is None:
                raise ParseError("missing 'field' line before the first equation", lineno, col)
            if size is None:
                raise ParseError("missing 'size' line before the first equation", lineno, col)
            if len(toks) != 2:
                raise ParseError("equation needs exactly one right-hand side", lineno, col)
            close_equation()
            pending = (_scalar(f, toks[1][0], lineno, toks[1][1]), [], lineno)
        else:
            if pending is None:
                raise ParseError(f"unexpected {word!r}; expected field, size, mode or equation", lineno, col)
            rows = pending[1]
            if len(rows) == size[0]:
                raise ParseError(f"equation already has {size[0]} row(s)", lineno, col)
            if len(toks) != size[1]:
                raise ParseError(f"row has {len(toks)} entries, expected {size[1]}", lineno, col)
            rows.append([_scalar(f, t, lineno, c) for t, c in toks])

    if size is None:
        raise ParseError("missing 'size' line", last or 1, 1)
    if f is None:
        raise ParseError("missing 'field' line", last or 1, 1)
    close_equation()
    try:
        sys = BilinearSystem(f, size[0], size[1], tuple(mats), tuple(rhs))
    except DimensionMismatch as exc:
        raise ParseError(str(exc), last or 1, 1) from None
    return SystemFile(sys, mode)


def load_system(path: Path | str, field_override: Optional[FieldSpec] = None) -> SystemFile:
    return parse_system(Path(path).read_text(encoding="utf-8"), field_override)


def emit_system(sys: BilinearSystem, mode: SolveMode = SolveMode.ANY, comment: Optional[str] = None) -> str:
    """Canonical text form; parse_system(emit_system(s)) gives back s."""
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines += [f"field {sys.field}", f"size {sys.p} {sys.q}", f"mode {SolveMode(mode).value}"]
    for a, g in zip(sys.matrices, sys.rhs):
        lines.append(f"equation {format_scalar(g)}")
        cells = a.to_lists()
        width = max(len(c) for r in cells for c in r)
        lines.extend("  " + " ".join(c.rjust(width) for c in r) for r in cells)
    return "\n".join(lines) + "\n"
