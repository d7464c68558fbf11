"""
Special functions and quadrature (pure helpers, no I/O).

Gaussian Q, the modified Bessel function I0, the phi integral
    phi(P1, P2, z) = int_0^z a * exp(-P1 a^2 - P2 a) da
in closed form, the Rician envelope density, and an adaptive Simpson integrator.
"""

import math
from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from scipy import special

from viterbi_arq.constants import (
    BESSEL_I0_MAX_ARG,
    QUAD_ABS_TOL,
    QUAD_MAX_DEPTH,
    QUAD_REL_TOL,
)
from viterbi_arq.errors import ConvergenceError, SpecialFunctionRangeError

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)

# Adaptive Simpson never accepts an interval before this depth
_MIN_DEPTH = 3


class UpperLimit(Enum):
    """Non-numeric upper limits accepted by phi()."""

    INFINITY = "infinity"


INFINITY = UpperLimit.INFINITY


@dataclass(frozen=True, slots=True)
class QuadratureSettings:
    abs_tol: float = QUAD_ABS_TOL
    rel_tol: float = QUAD_REL_TOL
    max_depth: int = QUAD_MAX_DEPTH

    def __post_init__(self) -> None:
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError(f"Tolerances must be positive, got {self.abs_tol}, {self.rel_tol}")
        if self.max_depth < 1:
            raise ValueError(f"max_depth must be >= 1, got {self.max_depth}")


class QuadResult(NamedTuple):
    value: float
    error: float


def gaussian_q(x: float) -> float:
    """Q(x) = P(Z > x) for a standard normal Z."""
    return float(0.5 * special.erfc(x / _SQRT2))


def gaussian_q_scaled(x: float) -> float:
    """exp(x^2/2) * Q(x), finite for all x >= -37 even when either factor is not."""
    return float(0.5 * special.erfcx(x / _SQRT2))


def bessel_i0(x: float) -> float:
    """
    Modified Bessel function of the first kind, order 0, by its power series
    sum_k (x/2)^(2k) / (k!)^2. Valid for |x| <= 700; beyond that the value overflows
    a double and SpecialFunctionRangeError is raised.
    """
    ax = abs(x)
    if ax > BESSEL_I0_MAX_ARG:
        raise SpecialFunctionRangeError(
            f"bessel_i0 argument {x} outside [-{BESSEL_I0_MAX_ARG}, {BESSEL_I0_MAX_ARG}]"
        )
    quarter_sq = 0.25 * ax * ax
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        term *= quarter_sq / (k * k)
        total += term
        # Terms decrease once k > x/2; stop when negligible
        if term < 1e-17 * total and k > ax / 2:
            return total


def bessel_i0e(x: float) -> float:
    """exp(-|x|) * I0(x); past the series range scipy's scaled form takes over."""
    if abs(x) > BESSEL_I0_MAX_ARG:
        return float(special.i0e(x))
    return math.exp(-abs(x)) * bessel_i0(x)


def rician_pdf(alpha: float, s: float, sigma: float) -> float:
    """Rician envelope density with noncentrality s and scale sigma."""
    if alpha < 0:
        return 0.0
    var = sigma * sigma
    arg = alpha * s / var
    # exp(-(a^2 + s^2)/2v) * I0(a s / v) == exp(-(a - s)^2 / 2v) * i0e(a s / v)
    return alpha / var * math.exp(-((alpha - s) ** 2) / (2.0 * var)) * bessel_i0e(arg)


def rician_cdf(
    alpha: float, s: float, sigma: float, settings: QuadratureSettings | None = None
) -> float:
    """P(envelope <= alpha), by quadrature of the density."""
    if alpha <= 0:
        return 0.0
    result = integrate(lambda a: rician_pdf(a, s, sigma), 0.0, alpha, settings)
    return min(1.0, max(0.0, result.value))


def phi(p1: float, p2: float, z: float | UpperLimit) -> float:
    """
    phi(p1, p2, z) = int_0^z a exp(-p1 a^2 - p2 a) da, in closed form.

    z is a positive float or INFINITY. The result is nonnegative, and bounded by
    1/(2 p1) whenever p2 >= 0.
    """
    if p1 <= 0:
        raise ValueError(f"phi requires p1 > 0, got {p1}")
    t = p2 / math.sqrt(2.0 * p1)
    scale = 1.0 / (2.0 * p1)
    if z is UpperLimit.INFINITY:
        value = scale * (1.0 - t * _SQRT2PI * gaussian_q_scaled(t))
        return max(0.0, value)
    if not isinstance(z, (int, float)) or z <= 0:
        raise ValueError(f"phi upper limit must be positive or INFINITY, got {z!r}")
    w = math.sqrt(2.0 * p1) * z + t
    # exp(t^2/2) Q(w) = exp(-p1 z^2 - p2 z) * exp(w^2/2) Q(w)
    edge = math.exp(-p1 * z * z - p2 * z)
    bracket = gaussian_q_scaled(t) - edge * gaussian_q_scaled(w)
    value = scale * (1.0 - edge - t * _SQRT2PI * bracket)
    return max(0.0, value)


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    settings: QuadratureSettings | None = None,
) -> QuadResult:
    """
    Adaptive Simpson's rule with Richardson correction.

    Subdivides until each interval's error estimate is below its share of
    max(abs_tol, rel_tol * |estimate|). Raises ConvergenceError if any interval
    reaches settings.max_depth without meeting its tolerance.
    """
    cfg = settings or QuadratureSettings()
    if a > b:
        raise ValueError(f"integrate requires a <= b, got a={a}, b={b}")
    if a == b:
        return QuadResult(0.0, 0.0)

    def _simpson(fa: float, fm: float, fb: float, h: float) -> float:
        return h / 3.0 * (fa + 4.0 * fm + fb)

    def _adaptive(
        lo: float, hi: float, flo: float, fmid: float, fhi: float,
        whole: float, tol: float, depth: int,
    ) -> tuple[float, float]:
        mid = 0.5 * (lo + hi)
        h = 0.5 * (hi - lo)
        flm = f(0.5 * (lo + mid))
        frm = f(0.5 * (mid + hi))
        left = _simpson(flo, flm, fmid, 0.5 * h)
        right = _simpson(fmid, frm, fhi, 0.5 * h)
        delta = (left + right - whole) / 15.0
        if depth >= _MIN_DEPTH and abs(delta) <= tol:
            return left + right + delta, abs(delta)
        if depth >= cfg.max_depth:
            raise ConvergenceError(
                f"Quadrature on [{lo}, {hi}] missed tolerance {tol:.3g} at depth {depth} "
                f"(error estimate {abs(delta):.3g})"
            )
        lv, le = _adaptive(lo, mid, flo, flm, fmid, left, 0.5 * tol, depth + 1)
        rv, re_ = _adaptive(mid, hi, fmid, frm, fhi, right, 0.5 * tol, depth + 1)
        return lv + rv, le + re_

    fa, fb = f(a), f(b)
    fm = f(0.5 * (a + b))
    whole = _simpson(fa, fm, fb, 0.5 * (b - a))
    tol = max(cfg.abs_tol, cfg.rel_tol * abs(whole))
    value, error = _adaptive(a, b, fa, fm, fb, whole, tol, 1)
    return QuadResult(value, error)
