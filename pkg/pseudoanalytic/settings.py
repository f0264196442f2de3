"""Runtime configuration read from the environment (and an optional project ``.env``).

Every library routine takes explicit keyword arguments; the values here only
supply their defaults, so tests and callers can always override them.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

_PROJECT_DIR = Path(__file__).resolve().parent.parent
load_dotenv(_PROJECT_DIR / ".env")

logger = logging.getLogger("pseudoanalytic")


def _env(key: str, default: str = "") -> str:
    return (os.getenv(key) or default).strip()


def _env_float(key: str, default: float) -> float:
    raw = _env(key)
    if not raw:
        return default
    try:
        return float(raw)
    except ValueError:
        logger.warning("Ignoring %s=%r: not a number", key, raw)
        return default


def _env_int(key: str, default: int) -> int:
    raw = _env(key)
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning("Ignoring %s=%r: not an integer", key, raw)
        return default


@dataclass(frozen=True)
class Settings:
    eps_f: float = 1e-10
    exclude_boundary: int = 2
    potential_exclude: int = 4
    potential_max_nodes: int = 32**3
    potential_chunk: int = 512
    workers: int = 1
    precondition_tol: float = 0.05
    log_level: str = "INFO"

    @classmethod
    def from_env(cls) -> Settings:
        return cls(
            eps_f=_env_float("PSEUDOANALYTIC_EPS_F", cls.eps_f),
            exclude_boundary=_env_int("PSEUDOANALYTIC_EXCLUDE_BOUNDARY", cls.exclude_boundary),
            potential_exclude=_env_int("PSEUDOANALYTIC_POTENTIAL_EXCLUDE", cls.potential_exclude),
            potential_max_nodes=_env_int("PSEUDOANALYTIC_POTENTIAL_MAX_NODES", cls.potential_max_nodes),
            potential_chunk=max(1, _env_int("PSEUDOANALYTIC_POTENTIAL_CHUNK", cls.potential_chunk)),
            workers=max(1, _env_int("PSEUDOANALYTIC_WORKERS", cls.workers)),
            precondition_tol=_env_float("PSEUDOANALYTIC_PRECONDITION_TOL", cls.precondition_tol),
            log_level=_env("PSEUDOANALYTIC_LOG_LEVEL", cls.log_level).upper(),
        )


SETTINGS = Settings.from_env()
