"""
Parsing helpers for CLI text: value grids, octal generators and flag lists.
"""

import math
import re
from typing import NamedTuple

# "start:step:stop", inclusive of stop
RANGE_PATTERN = re.compile(r"^\s*(-?[\d.]+)\s*:\s*(-?[\d.]+)\s*:\s*(-?[\d.]+)\s*$")
# "0.5u0", "u0", "0.9 u0"
FLAG_FRACTION_PATTERN = re.compile(r"^\s*([\d.]*)\s*u0\s*$", re.IGNORECASE)


class FlagValue(NamedTuple):
    """A Yamamoto-Itoh flag: absolute, or a fraction of d_f * sqrt(2 Ec/N0)."""

    value: float
    relative: bool = False

    def resolve(self, u_max: float) -> float:
        """Absolute flag for a cell whose flag ceiling d_f*sqrt(2Ec/N0) is u_max."""
        return self.value * u_max if self.relative else self.value

    def label(self) -> str:
        return f"{self.value:g}u0" if self.relative else f"{self.value:g}"


def parse_grid(text: str) -> list[float]:
    """
    Parse "0:2:20" (inclusive range) or "1,2,5" (explicit list) into floats.
    A single number yields a one-element grid.
    """
    match = RANGE_PATTERN.match(text)
    if match:
        start, step, stop = (float(g) for g in match.groups())
        if step <= 0:
            raise ValueError(f"Grid step must be positive in {text!r}")
        if stop < start:
            raise ValueError(f"Grid stop below start in {text!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(count)]
    values = [v.strip() for v in text.split(",") if v.strip()]
    if not values:
        raise ValueError(f"Empty grid: {text!r}")
    return [float(v) for v in values]


def parse_octal_generators(text: str) -> list[int]:
    """Parse "5,7" (octal) into integer bit masks."""
    tokens = [t.strip() for t in text.split(",") if t.strip()]
    if not tokens:
        raise ValueError(f"No generators in {text!r}")
    masks: list[int] = []
    for tok in tokens:
        if not re.fullmatch(r"[0-7]+", tok):
            raise ValueError(f"Generator {tok!r} is not an octal number")
        masks.append(int(tok, 8))
    return masks


def parse_flags(text: str) -> list[FlagValue]:
    """
    Parse a flag list such as "0,0.5u0,0.9u0,1.3".
    Tokens ending in "u0" are fractions of d_f * sqrt(2 Ec/N0), resolved per cell.
    """
    flags: list[FlagValue] = []
    for tok in (t.strip() for t in text.split(",")):
        if not tok:
            continue
        match = FLAG_FRACTION_PATTERN.match(tok)
        if match:
            frac = float(match.group(1)) if match.group(1) else 1.0
            flags.append(FlagValue(frac, relative=True))
        else:
            flags.append(FlagValue(float(tok)))
    if not flags:
        raise ValueError(f"Empty flag list: {text!r}")
    for flag in flags:
        if flag.value < 0:
            raise ValueError(f"Flag values must be nonnegative, got {flag.label()}")
    return flags
