"""
Runtime configuration. Budgets and the ledger location come from the
environment (DYAD_BUDGET, DYAD_ORACLE_BUDGET, DYAD_DB); CLI flags override.
"""

from __future__ import annotations

import logging
import os
from pathlib import Path

_logger = logging.getLogger(__name__)


# ---------- Defaults ---------------------------------------------------------

DEFAULT_BUDGET = 10**7
DEFAULT_ORACLE_BUDGET = 10**8

# Candidate values for specialization and the sub-pencil sweep over Q / Q(i)
# and over prime fields larger than SMALL_FIELD.
SMALL_POOL = (0, 1, -1, 2, -2)
SPECIALIZATION_SUBSET = 2
SPECIALIZATION_TRIALS = 20000
MAX_SOLUTIONS = 32
SWEEP_BUDGET = 4000
SMALL_FIELD = 64


# ---------- Environment ------------------------------------------------------

def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw.strip())
    except ValueError:
        _logger.warning("ignoring %s=%r: not an integer", name, raw)
        return default
    if value <= 0:
        _logger.warning("ignoring %s=%r: must be positive", name, raw)
        return default
    return value


def default_budget() -> int:
    return _env_int("DYAD_BUDGET", DEFAULT_BUDGET)


def default_oracle_budget() -> int:
    return _env_int("DYAD_ORACLE_BUDGET", DEFAULT_ORACLE_BUDGET)


def default_db_path() -> Path:
    override = os.environ.get("DYAD_DB")
    if override:
        return Path(override).expanduser()
    base = os.environ.get("XDG_DATA_HOME") or str(Path.home() / ".local" / "share")
    return Path(base) / "dyad" / "runs.db"
