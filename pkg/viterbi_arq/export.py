"""
CSV export with a commented metadata header.
"""

from pathlib import Path
from typing import Any

import pandas as pd


def write_csv(
    df: pd.DataFrame,
    path: Path | str,
    metadata: dict[str, Any] | None = None,
    *,
    quiet: bool = False,
) -> Path:
    """
    Write df as comma-separated values preceded by "# key: value" lines.
    Floats use Python's shortest round-trip repr; missing values are left empty.
    """
    filepath = Path(path)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    with filepath.open("w", encoding="utf-8", newline="") as fh:
        for key, value in (metadata or {}).items():
            fh.write(f"# {key}: {value}\n")
        df.to_csv(fh, index=False, na_rep="", lineterminator="\n")
    if not quiet:
        print(f"   💾 {filepath}")
    return filepath


def read_csv(path: Path | str) -> tuple[pd.DataFrame, dict[str, str]]:
    """Inverse of write_csv: the table plus its metadata header."""
    filepath = Path(path)
    metadata: dict[str, str] = {}
    with filepath.open(encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].partition(":")
            metadata[key.strip()] = value.strip()
    return pd.read_csv(filepath, comment="#", float_precision="round_trip"), metadata
