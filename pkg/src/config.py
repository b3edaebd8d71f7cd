#!/usr/bin/env python3
"""
Laboratory Configuration

Reads tunables from the environment (and a local .env file) with typed
defaults. Command-line flags override everything returned here.
"""

import os
from typing import List, Optional

from dotenv import load_dotenv

from errors import InvalidParameter

# Load environment variables
load_dotenv()

DEFAULT_LEAF_BUDGET = 10_000_000
DEFAULT_BOUNDARY_TOL = 1e-12
DEFAULT_ZERO_TOL = 1e-9
DEFAULT_T_LADDER = (50.0, 100.0, 200.0)
DEFAULT_LOG_DOMAIN_THRESHOLD = 500.0


def _get_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        # accept 1e7 style as well as plain integers
        value = int(float(raw))
    except ValueError:
        raise InvalidParameter(f"{name} must be an integer, got {raw!r}")
    if value <= 0:
        raise InvalidParameter(f"{name} must be positive, got {value}")
    return value


def _get_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = float(raw)
    except ValueError:
        raise InvalidParameter(f"{name} must be a number, got {raw!r}")
    if value <= 0:
        raise InvalidParameter(f"{name} must be positive, got {value}")
    return value


def get_leaf_budget(override: Optional[int] = None) -> int:
    """
    Maximum number of leaves N_n a simulation may allocate

    Args:
        override: Value from a command-line flag (wins over the environment)

    Returns:
        Leaf budget
    """
    if override is not None:
        return int(override)
    return _get_int("GREM_LEAF_BUDGET", DEFAULT_LEAF_BUDGET)


def get_boundary_tol() -> float:
    """Tolerance on the defining expressions of phase boundaries"""
    return _get_float("GREM_BOUNDARY_TOL", DEFAULT_BOUNDARY_TOL)


def get_zero_tol() -> float:
    return _get_float("GREM_ZERO_TOL", DEFAULT_ZERO_TOL)


def get_threads(override: Optional[int] = None) -> int:
    """Worker cap; defaults to the available parallelism"""
    if override is not None:
        if override < 1:
            raise InvalidParameter(f"--threads must be >= 1, got {override}")
        return int(override)
    return _get_int("GREM_THREADS", os.cpu_count() or 1)


def get_t_ladder() -> List[float]:
    """Truncation ladder for cascade zeta evaluation"""
    raw = os.getenv("GREM_T_LADDER")
    if not raw:
        return list(DEFAULT_T_LADDER)
    try:
        ladder = sorted(float(x) for x in raw.split(",") if x.strip())
    except ValueError:
        raise InvalidParameter(f"GREM_T_LADDER must be a comma list of numbers, got {raw!r}")
    if not ladder or ladder[0] <= 0:
        raise InvalidParameter(f"GREM_T_LADDER must hold positive truncations, got {raw!r}")
    return ladder


def get_log_domain_threshold() -> float:
    """n*a*|beta|^2 above which partition functions are kept in log form"""
    return _get_float("GREM_LOG_DOMAIN_THRESHOLD", DEFAULT_LOG_DOMAIN_THRESHOLD)


def get_log_level() -> str:
    level = os.getenv("GREM_LOG_LEVEL", "INFO").upper()
    if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        raise InvalidParameter(f"GREM_LOG_LEVEL not recognised: {level}")
    return level


def get_run_db_path() -> str:
    """Location of the SQLite run registry"""
    return os.getenv("GREM_RUN_DB", "grem_runs.db")
