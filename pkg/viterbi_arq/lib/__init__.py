"""
Shared pure helpers for numerics and CLI text parsing (no pandas/I/O).
"""

from viterbi_arq.lib.specfun import (
    INFINITY,
    QuadResult,
    QuadratureSettings,
    UpperLimit,
    bessel_i0,
    bessel_i0e,
    gaussian_q,
    gaussian_q_scaled,
    integrate,
    phi,
    rician_cdf,
    rician_pdf,
)
from viterbi_arq.lib.grid import FlagValue, parse_flags, parse_grid, parse_octal_generators

__all__ = [
    "INFINITY",
    "QuadResult",
    "QuadratureSettings",
    "UpperLimit",
    "bessel_i0",
    "bessel_i0e",
    "gaussian_q",
    "gaussian_q_scaled",
    "integrate",
    "phi",
    "rician_cdf",
    "rician_pdf",
    "FlagValue",
    "parse_flags",
    "parse_grid",
    "parse_octal_generators",
]
