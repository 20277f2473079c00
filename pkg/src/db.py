"""
Local SQLite run ledger for DYAD.

Records solve/oracle runs and the solutions they returned, keyed by the
sha1 of the canonical system text. Local-only. Default location is
~/.local/share/dyad/runs.db (overridable via DYAD_DB env var).
"""

from __future__ import annotations

import hashlib
import sqlite3
import time
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from src.bls_core import BilinearSystem, SolutionPair
from src.config import default_db_path
from src.fields import format_scalar


# ---------- Schema -----------------------------------------------------------

SCHEMA = """
CREATE TABLE IF NOT EXISTS runs (
    id          INTEGER PRIMARY KEY AUTOINCREMENT,
    system_id   TEXT NOT NULL,
    command     TEXT NOT NULL,           -- solve | oracle
    field       TEXT NOT NULL,
    p           INTEGER NOT NULL,
    q           INTEGER NOT NULL,
    m           INTEGER NOT NULL,
    status      TEXT NOT NULL,           -- Solutions | NoSolution | Undecided | Oracle
    detail      TEXT,
    started_at  INTEGER NOT NULL,
    elapsed_ms  INTEGER NOT NULL
);

CREATE INDEX IF NOT EXISTS idx_runs_system
    ON runs(system_id, started_at);

CREATE TABLE IF NOT EXISTS solutions (
    run_id  INTEGER NOT NULL REFERENCES runs(id),
    idx     INTEGER NOT NULL,
    x       TEXT NOT NULL,
    y       TEXT NOT NULL,
    PRIMARY KEY (run_id, idx)
);
"""


# ---------- Helpers ----------------------------------------------------------

def _hash_text(text: str) -> str:
    return hashlib.sha1(text.encode("utf-8")).hexdigest()


def _fmt(v) -> str:
    return "(" + ", ".join(format_scalar(a) for a in v) + ")"


# ---------- Store ------------------------------------------------------------

@dataclass
class RunRow:
    id: int
    system_id: str
    command: str
    field: str
    p: int
    q: int
    m: int
    status: str
    detail: Optional[str]
    started_at: int
    elapsed_ms: int


class Store:
    """Thin SQLite wrapper. One Store per CLI invocation."""

    def __init__(self, path: Optional[Path] = None):
        self.path = Path(path) if path else default_db_path()
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._conn = sqlite3.connect(str(self.path))
        self._conn.row_factory = sqlite3.Row
        self._conn.execute("PRAGMA journal_mode=WAL;")
        self._conn.execute("PRAGMA foreign_keys=ON;")
        self._conn.executescript(SCHEMA)
        self._conn.commit()

    # context-manager for atomic blocks
    @contextmanager
    def tx(self):
        try:
            yield self._conn
            self._conn.commit()
        except Exception:
            self._conn.rollback()
            raise

    # ---- runs ----
    def record_outcome(self, system_text: str, command: str, sys: BilinearSystem, status: str,
                       detail: Optional[str], elapsed_ms: int,
                       solutions: Iterable[SolutionPair] = ()) -> int:
        with self.tx() as c:
            cur = c.execute(
                "INSERT INTO runs (system_id, command, field, p, q, m, status, detail, started_at, elapsed_ms) "
                "VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
                (_hash_text(system_text), command, str(sys.field), sys.p, sys.q, sys.m,
                 status, detail, int(time.time()), int(elapsed_ms)),
            )
            run_id = int(cur.lastrowid)
            c.executemany(
                "INSERT INTO solutions (run_id, idx, x, y) VALUES (?, ?, ?, ?)",
                [(run_id, k, _fmt(s.x), _fmt(s.y)) for k, s in enumerate(solutions)],
            )
            return run_id

    def recent_runs(self, limit: int = 20) -> list[RunRow]:
        rows = self._conn.execute(
            "SELECT * FROM runs ORDER BY started_at DESC, id DESC LIMIT ?", (limit,)
        ).fetchall()
        return [RunRow(**dict(r)) for r in rows]

    def runs_for_system(self, system_text: str) -> list[RunRow]:
        rows = self._conn.execute(
            "SELECT * FROM runs WHERE system_id = ? ORDER BY started_at, id", (_hash_text(system_text),)
        ).fetchall()
        return [RunRow(**dict(r)) for r in rows]

    def solutions_for(self, run_id: int) -> list[tuple[str, str]]:
        rows = self._conn.execute(
            "SELECT x, y FROM solutions WHERE run_id = ? ORDER BY idx", (run_id,)
        ).fetchall()
        return [(r["x"], r["y"]) for r in rows]

    def summary(self) -> dict:
        r = self._conn.execute(
            """
            SELECT
              COUNT(*)                                              AS n,
              COUNT(DISTINCT system_id)                             AS systems,
              SUM(CASE WHEN status = 'Solutions'  THEN 1 ELSE 0 END) AS solved,
              SUM(CASE WHEN status = 'NoSolution' THEN 1 ELSE 0 END) AS refuted,
              SUM(CASE WHEN status = 'Undecided'  THEN 1 ELSE 0 END) AS undecided,
              CAST(AVG(elapsed_ms) AS INTEGER)                      AS avg_ms
            FROM runs
            """
        ).fetchone()
        out = dict(r) if r else {}
        return {k: (v or 0) for k, v in out.items()} or \
            {"n": 0, "systems": 0, "solved": 0, "refuted": 0, "undecided": 0, "avg_ms": 0}

    def file_size(self) -> int:
        try:
            return self.path.stat().st_size
        except OSError:
            return 0

    def close(self) -> None:
        self._conn.close()
