"""
Text and JSON rendering of solver outcomes, analyses, pencils and oracle
reports. Every renderer takes a plain dict so both formats share one shape.
"""

from __future__ import annotations

import json
from typing import Sequence

from src.bls_core import SolutionPair
from src.fields import format_scalar
from src.linalg import Matrix
from src.pencil import AffinePencil
from src.rank_one import SolverOutcome

INDENT = "  "
FORMATS = ("text", "json")


# ---------- Dict builders ----------------------------------------------------

def vector_strings(v) -> list[str]:
    return [format_scalar(a) for a in v]


def pair_dict(s: SolutionPair) -> dict:
    return {"x": vector_strings(s.x), "y": vector_strings(s.y)}


def outcome_dict(outcome: SolverOutcome) -> dict:
    out = {
        "status": outcome.status.value,
        "exit_code": outcome.exit_code,
        "solutions": [pair_dict(s) for s in outcome.solutions],
        "certificate": None,
        "reason": outcome.reason.value if outcome.reason else None,
        "notes": list(outcome.notes),
    }
    cert = outcome.certificate
    if cert is not None:
        out["certificate"] = {
            "kind": cert.kind.value,
            "detail": cert.detail,
            "polys": [str(p) for p in cert.polys],
            "discriminants": vector_strings(cert.discriminants),
        }
    return out


def matrix_dict(m: Matrix) -> list[list[str]]:
    return m.to_lists()


def pencil_dict(pencil: AffinePencil) -> dict:
    return {
        "field": str(pencil.field),
        "p": pencil.p,
        "q": pencil.q,
        "r": pencil.r,
        "K0": matrix_dict(pencil.K0),
        "basis": [matrix_dict(k) for k in pencil.basis],
    }


# ---------- Text -------------------------------------------------------------

def _matrix_lines(rows: Sequence[Sequence[str]], indent: str = INDENT) -> list[str]:
    width = max((len(c) for r in rows for c in r), default=1)
    return [indent + "  ".join(c.rjust(width) for c in r) for r in rows]


def _pair_line(p: dict) -> str:
    return f"x=({', '.join(p['x'])}) y=({', '.join(p['y'])})"


def outcome_text(d: dict) -> str:
    lines = []
    if d["status"] == "Undecided":
        lines.append(f"status: Undecided ({d['reason']})")
    else:
        lines.append(f"status: {d['status']}")
    if d["solutions"]:
        lines.append(f"solutions ({len(d['solutions'])}):")
        lines.extend(INDENT + _pair_line(p) for p in d["solutions"])
    cert = d["certificate"]
    if cert:
        lines.append(f"certificate: {cert['kind']}")
        lines.append(INDENT + cert["detail"])
        lines.extend(f"{INDENT}minor: {p}" for p in cert["polys"])
        lines.extend(f"{INDENT}discriminant: {g}" for g in cert["discriminants"])
    if d["notes"]:
        lines.append("notes:")
        lines.extend(INDENT + n for n in d["notes"])
    return "\n".join(lines)


def pencil_text(d: dict) -> str:
    lines = [f"pencil over {d['field']}: {d['p']}x{d['q']}, r={d['r']}", "K0:"]
    lines += _matrix_lines(d["K0"])
    for k, m in enumerate(d["basis"], start=1):
        lines.append(f"K{k}:")
        lines += _matrix_lines(m)
    if d.get("minors"):
        lines.append("2x2 minors:")
        lines.extend(INDENT + m for m in d["minors"])
    return "\n".join(lines)


def analysis_text(d: dict) -> str:
    lines = [
        f"system: {d['field']}, p={d['p']}, q={d['q']}, m={d['m']}",
        f"reduction: m̂={d['m_hat']}" + (f", dropped {d['dropped']}" if d["dropped"] else "")
        + (", INCONSISTENT" if d["inconsistent"] else ""),
    ]
    if d.get("r") is not None:
        lines.append(f"pencil dimension: r={d['r']}")
    lines.append("support:")
    lines.extend(INDENT + row for row in d["support"].splitlines())
    lines.append(f"3-corner property: {'yes' if d['three_corner'] else 'no'}")
    lines.append(d["always_solvable"])
    lines.append(f"bound m ≤ p+q-1: {'holds' if d['within_bound'] else 'violated'}")
    if d.get("witness"):
        lines.append("witness:")
        lines.extend(INDENT + w for w in d["witness"])
    return "\n".join(lines)


def oracle_text(d: dict) -> str:
    lines = [f"oracle over {d['field']} (mode {d['mode']})"]
    if "solutions" in d:
        lines.append(f"solution classes: {len(d['solutions'])}")
        lines.extend(INDENT + _pair_line(p) for p in d["solutions"])
    if "image" in d:
        im = d["image"]
        lines.append(f"image: attained {im['attained']} of {im['total']} (bound {im['bound']})")
        lines.extend(f"{INDENT}VIOLATION: {v}" for v in im["violations"])
    if "always_solvable" in d:
        verdict = "yes" if d["always_solvable"] else f"no, first unsolvable g = ({', '.join(d['witness'])})"
        lines.append(f"always solvable: {verdict}")
    return "\n".join(lines)


def history_text(d: dict) -> str:
    if "system" in d:
        lines = [f"{len(d['runs'])} run(s) of {d['system']}"]
    else:
        s = d["summary"]
        lines = [f"{s['n']} run(s) over {s['systems']} system(s): "
                 f"{s['solved']} solved, {s['refuted']} refuted, {s['undecided']} undecided"]
    for r in d["runs"]:
        lines.append(f"{INDENT}#{r['id']} {r['command']} {r['field']} {r['p']}x{r['q']} m={r['m']} "
                     f"{r['status']} ({r['elapsed_ms']} ms) {r['system_id'][:10]}")
        for sol in r.get("solutions", ()):
            lines.append(f"{INDENT * 2}x={sol['x']} y={sol['y']}")
    return "\n".join(lines)


# ---------- Dispatch ---------------------------------------------------------

_TEXT = {
    "outcome": outcome_text,
    "pencil": pencil_text,
    "analysis": analysis_text,
    "oracle": oracle_text,
    "history": history_text,
}


def render(kind: str, data: dict, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(data, indent=2, ensure_ascii=False)
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    return _TEXT[kind](data)
