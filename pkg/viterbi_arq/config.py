"""
Configuration loader for simulation defaults.
Reads from a .env file (or real environment variables).

Variables:
  VA_SEED               : base seed for all random streams (default: 42)
  VA_TRIALS             : frames simulated per grid cell (default: 10000)
  VA_WORKERS            : worker threads for trial batches (default: 4)
  VA_KMAX               : optional; weight cap for transfer coefficients
                          (default: enumerate up to n_c*(H+m), no tail term)
  VA_STOP_AFTER_ERRORS  : optional; stop a cell after this many bit errors
  VA_OUTPUT_DIR         : directory for CSV output (default: ./output)
"""

import os
from pathlib import Path

try:
    from dotenv import load_dotenv
    _root = Path(__file__).resolve().parent.parent
    load_dotenv(_root / ".env")
except ImportError:
    pass


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name, "").strip()
    return int(raw) if raw else default


# ── Exported constants ────────────────────────────────────────────
SEED: int = _int_env("VA_SEED", 42)
TRIALS: int = _int_env("VA_TRIALS", 10_000)
WORKERS: int = max(1, _int_env("VA_WORKERS", 4))

_kmax = os.getenv("VA_KMAX", "").strip()
K_MAX: int | None = int(_kmax) if _kmax else None

_stop = os.getenv("VA_STOP_AFTER_ERRORS", "").strip()
STOP_AFTER_ERRORS: int | None = int(_stop) if _stop else None

OUTPUT_DIR: Path = Path(os.getenv("VA_OUTPUT_DIR", "./output"))
