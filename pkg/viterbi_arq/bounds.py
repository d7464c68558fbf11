"""
Analytical error and retransmission bounds for Yamamoto-Itoh Viterbi decoding over an
ideally interleaved Rician channel.

Every bound is a power series in

    D(u) = E_alpha[ exp(-c^2 alpha^2 / 2) ],   c = sqrt(2 E_c/N0) + u/d_f,

evaluated by quadrature of Lambda(theta) over [0, pi] (the I0 integral swapped out of
the Rician density). P_e and P_b use D(u) with a_k and c_k, P_x uses D(-u) with a_k.
"""

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
from scipy import special

from viterbi_arq.channel import ChannelParams
from viterbi_arq.convcode import Trellis, TransferCoefficients, transfer_function
from viterbi_arq.errors import DivergenceError, PreconditionError
from viterbi_arq.lib.specfun import (
    INFINITY,
    QuadratureSettings,
    gaussian_q,
    integrate,
    phi,
)

_SQRT2PI = math.sqrt(2.0 * math.pi)

# Free distance of the (5,7) code whose transfer function is D^5 N / (1 - 2 D N)
CLOSED_FORM_D_F = 5


@dataclass(frozen=True, slots=True)
class BoundParams:
    """
    Inputs of one bound evaluation. u may be negative: mirrored() builds the -u set that
    retransmission bounds need.
    """

    ec_over_n0: float
    u: float
    d_f: int
    sigma: float
    s: float

    def __post_init__(self) -> None:
        if not self.ec_over_n0 > 0:
            raise ValueError(f"E_c/N0 must be positive, got {self.ec_over_n0}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.s < 0:
            raise ValueError(f"s must be >= 0, got {self.s}")
        if self.d_f < 1:
            raise ValueError(f"d_f must be >= 1, got {self.d_f}")

    @classmethod
    def from_channel(cls, channel: ChannelParams, u: float, d_f: int) -> "BoundParams":
        return cls(channel.ec_over_n0, u, d_f, channel.sigma, channel.s)

    @property
    def sigma2(self) -> float:
        return self.sigma * self.sigma

    @property
    def gamma(self) -> float:
        return self.s * self.s / (2.0 * self.sigma2)

    @property
    def flag_ceiling(self) -> float:
        """d_f * sqrt(2 E_c/N0): P_x bounds need u strictly below this."""
        return self.d_f * math.sqrt(2.0 * self.ec_over_n0)

    @property
    def amplitude(self) -> float:
        """c = sqrt(2 E_c/N0) + u/d_f."""
        return math.sqrt(2.0 * self.ec_over_n0) + self.u / self.d_f

    @property
    def A(self) -> float:
        return 0.5 * self.amplitude**2 + 1.0 / (2.0 * self.sigma2)

    @property
    def px_defined(self) -> bool:
        return abs(self.u) < self.flag_ceiling

    def B(self, theta: float) -> float:
        return -self.s * math.cos(theta) / self.sigma2

    def mirrored(self) -> "BoundParams":
        """The same point with u -> -u."""
        if not self.px_defined:
            raise PreconditionError(
                f"Retransmission bound needs u < d_f sqrt(2 Ec/N0) = {self.flag_ceiling:.6g}, "
                f"got u={self.u:.6g}"
            )
        return replace(self, u=-self.u)


@dataclass(frozen=True, slots=True)
class BoundReport:
    """Bound values are finite or None; None means not defined at this point."""

    d_tilde: float
    pe: float | None
    pb: float | None
    px: float | None
    truncation: tuple[int, int | None]
    convergence_flag: bool
    tail_k_max: int | None = None
    tail_term: float | None = 0.0
    tail_diverged: bool = False


class ExponentPrediction(NamedTuple):
    ebno_slope: float
    gamma_exponent_pb: float
    gamma_exponent_px: float | None


def lambda_theta(theta: float, params: BoundParams) -> float:
    """
    Lambda(theta) = (1/(2 A sigma^2)) [1 - t sqrt(2 pi) exp(t^2/2) Q(t)],  t = B/sqrt(2A),
    i.e. (1/sigma^2) * phi(A, B_theta, inf).
    """
    return phi(params.A, params.B(theta), INFINITY) / params.sigma2


def _lambda_times_exp_minus_gamma(theta: float, params: BoundParams) -> float:
    # exp(-gamma) * Lambda(theta) with exp(t^2/2 - gamma) Q(t) taken in log space
    A = params.A
    gamma = params.gamma
    t = params.B(theta) / math.sqrt(2.0 * A)
    q_term = math.exp(0.5 * t * t - gamma + float(special.log_ndtr(-t)))
    return (math.exp(-gamma) - t * _SQRT2PI * q_term) / (2.0 * A * params.sigma2)


def d_tilde(params: BoundParams, settings: QuadratureSettings | None = None) -> float:
    """
    D(u) = (exp(-gamma)/pi) * integral_0^pi Lambda(theta) d theta.

    The integrand peaks at theta = 0 and is integrated relative to that peak, so the
    quadrature tolerances act as relative tolerances even when D(u) is tiny.
    """
    peak = _lambda_times_exp_minus_gamma(0.0, params)
    if peak <= 0.0:
        return 0.0
    result = integrate(
        lambda th: _lambda_times_exp_minus_gamma(th, params) / peak, 0.0, math.pi, settings
    )
    return max(0.0, peak * result.value / math.pi)


def h_tilde(u: float, params: BoundParams) -> float:
    """1 - (1/sigma^2) [ (sqrt(2 E_c/N0) + u/d_f)^2 + 1/sigma^2 ]^-1."""
    c = math.sqrt(2.0 * params.ec_over_n0) + u / params.d_f
    if c <= 0:
        raise PreconditionError(
            f"h_tilde needs u > -d_f sqrt(2 Ec/N0) = {-params.flag_ceiling:.6g}, got u={u:.6g}"
        )
    return 1.0 - 1.0 / (params.sigma2 * (c * c + 1.0 / params.sigma2))


def exponent_predictions(params: BoundParams) -> ExponentPrediction:
    """Decay rate in E_b/N0 and the Rician-factor exponents of P_b and P_x."""
    px_exp = params.d_f * h_tilde(-params.u, params) if params.px_defined else None
    return ExponentPrediction(
        ebno_slope=-float(params.d_f),
        gamma_exponent_pb=params.d_f * h_tilde(params.u, params),
        gamma_exponent_px=px_exp,
    )


def _log_series_tail(log_d: float, k_lo: int, k_hi: int, weighted: bool) -> float | None:
    """
    sum_{k=k_lo}^{k_hi} (k if weighted) 4^k d^k, summed in log space. None when 4d >= 1,
    where the tail no longer bounds anything useful and its sum can overflow.
    """
    if k_lo > k_hi or log_d == -math.inf:
        return 0.0
    if math.log(4.0) + log_d >= 0.0:
        return None
    ks = np.arange(k_lo, k_hi + 1, dtype=float)
    logs = ks * (math.log(4.0) + log_d)
    if weighted:
        logs += np.log(ks)
    return float(np.exp(special.logsumexp(logs)))


def _series(log_coef: np.ndarray, ks: np.ndarray, log_d: float) -> float:
    """sum coef_k d^k from log coefficients, so counts past double range still combine."""
    if log_d == -math.inf or ks.size == 0:
        return 0.0
    logs = log_coef + ks * log_d
    if np.all(logs == -math.inf):
        return 0.0
    return float(np.exp(special.logsumexp(logs)))


def _log(d: float) -> float:
    return math.log(d) if d > 0 else -math.inf


def union_bounds(
    coeffs: TransferCoefficients,
    params: BoundParams,
    H: int,
    m: int,
    n_c: int,
    *,
    with_px: bool = True,
    settings: QuadratureSettings | None = None,
) -> BoundReport:
    """
    Finite union bounds over k = d_f .. n_c(H+m):
      pe = sum a_k D(u)^k,  pb = sum c_k D(u)^k,  px = sum a_k D(-u)^k.

    Weights above coeffs.k_max are covered by a_k <= 4^k and c_k <= k 4^k; that tail is
    included in the totals and pb's share is reported as tail_term. The tail needs
    4 D < 1: past that the affected bounds are None and tail_diverged is set.
    """
    if with_px and not params.px_defined:
        raise PreconditionError(
            f"P_x bound needs u < {params.flag_ceiling:.6g}, got u={params.u:.6g}"
        )
    k_hi = n_c * (H + m)
    ks, log_a, log_c = coeffs.log_arrays(k_hi)
    d = d_tilde(params, settings)
    log_d = _log(d)

    tail_from = coeffs.k_max + 1
    pe_tail = _log_series_tail(log_d, tail_from, k_hi, weighted=False)
    pb_tail = _log_series_tail(log_d, tail_from, k_hi, weighted=True)
    pe = None if pe_tail is None else _series(log_a, ks, log_d) + pe_tail
    pb = None if pb_tail is None else _series(log_c, ks, log_d) + pb_tail

    px: float | None = None
    px_diverged = False
    if with_px:
        log_dm = _log(d_tilde(params.mirrored(), settings))
        px_tail = _log_series_tail(log_dm, tail_from, k_hi, weighted=False)
        px_diverged = px_tail is None
        if px_tail is not None:
            px = _series(log_a, ks, log_dm) + px_tail

    has_tail = tail_from <= k_hi
    return BoundReport(
        d_tilde=d,
        pe=pe,
        pb=pb,
        px=px,
        truncation=(coeffs.d_f, min(coeffs.k_max, k_hi)),
        convergence_flag=False,
        tail_k_max=coeffs.k_max if has_tail else None,
        tail_term=pb_tail,
        tail_diverged=pb_tail is None or px_diverged,
    )


def closed_form_series(d: float) -> tuple[float, float]:
    """(T(d, 1), dT/dN at N = 1) for T(D, N) = D^5 N / (1 - 2 D N)."""
    if not 0.0 <= d < 0.5:
        raise DivergenceError(
            f"Closed form needs 2 D < 1, got D={d:.6g}; use union_bounds() instead"
        )
    d5 = d**5
    return d5 / (1.0 - 2.0 * d), d5 / (1.0 - 2.0 * d) ** 2


def closed_form_bounds(
    params: BoundParams, settings: QuadratureSettings | None = None
) -> BoundReport:
    """Infinite-length bounds for the (5,7) code from its transfer function."""
    if params.d_f != CLOSED_FORM_D_F:
        raise ValueError(f"Closed form is for the (5,7) code (d_f=5), got d_f={params.d_f}")
    d = d_tilde(params, settings)
    pe, pb = closed_form_series(d)
    px = None
    if params.px_defined:
        px, _ = closed_form_series(d_tilde(params.mirrored(), settings))
    return BoundReport(d, pe, pb, px, (CLOSED_FORM_D_F, None), convergence_flag=True)


def transfer_bounds(
    trellis: Trellis, params: BoundParams, settings: QuadratureSettings | None = None
) -> BoundReport:
    """Infinite-length bounds for any code via its numerically evaluated transfer function."""
    d = d_tilde(params, settings)
    pe, pb = transfer_function(trellis, d)
    px = None
    if params.px_defined:
        px, _ = transfer_function(trellis, d_tilde(params.mirrored(), settings))
    return BoundReport(d, pe, pb, px, (params.d_f, None), convergence_flag=True)


def pairwise_error(alpha: np.ndarray, params: BoundParams) -> float:
    """q_k(u) = Q(c * sqrt(sum alpha^2)) for the k envelopes where two paths differ."""
    energy = float(np.sum(np.square(np.asarray(alpha, dtype=float))))
    return gaussian_q(params.amplitude * math.sqrt(energy))


def retransmission_band(alpha: np.ndarray, params: BoundParams) -> float:
    """q_k(-u) - q_k(u): probability that the pairwise comparison lands inside the flag margin."""
    return pairwise_error(alpha, params.mirrored()) - pairwise_error(alpha, params)


def chernoff_factor(alpha: np.ndarray | float, params: BoundParams) -> np.ndarray | float:
    """exp(-c^2 alpha^2 / 2); its mean over the Rician law is d_tilde(params)."""
    c2 = params.amplitude**2
    return np.exp(-0.5 * c2 * np.square(alpha))


def flag_from_fraction(delta: float, ec_over_n0: float, d_f: int) -> float:
    """u0 = d_f (1 - delta) sqrt(2 E_c/N0)."""
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    return d_f * (1.0 - delta) * math.sqrt(2.0 * ec_over_n0)
