"""
Table builders for the analytical subcommands (coefficients, bounds, exponents).
"""

import itertools
import math
from collections.abc import Iterator, Sequence

import pandas as pd

from viterbi_arq.bounds import BoundParams, exponent_predictions, h_tilde, union_bounds
from viterbi_arq.channel import ChannelParams, db_to_linear, ebno_to_ecno
from viterbi_arq.constants import BOUND_COLUMNS, COEFFICIENT_COLUMNS, EXPONENT_COLUMNS
from viterbi_arq.convcode import CodeSpec, TransferCoefficients
from viterbi_arq.lib.grid import FlagValue


def coefficient_table(coeffs: TransferCoefficients) -> pd.DataFrame:
    """One row per weight d_f..k_max; a_k and c_k stay exact Python ints."""
    ks = range(coeffs.d_f, coeffs.k_max + 1)
    rows = [(k, coeffs.a_k(k), coeffs.c_k(k)) for k in ks]
    df = pd.DataFrame(rows, columns=COEFFICIENT_COLUMNS, dtype=object)
    return df.astype({"k": int})


def _grid_points(
    spec: CodeSpec,
    d_f: int,
    H: int,
    ebno_db: Sequence[float],
    gammas: Sequence[float],
    sigma2s: Sequence[float],
    flags: Sequence[FlagValue],
) -> Iterator[tuple[float, float, float, float, BoundParams]]:
    """(ebno_db, gamma, sigma2, u, BoundParams) in sigma^2, gamma, E_b/N0, flag order."""
    for sigma2, gamma, ebno in itertools.product(sigma2s, gammas, ebno_db):
        ec = ebno_to_ecno(db_to_linear(ebno), H, spec.m, spec.rate)
        channel = ChannelParams.from_gamma(ec, gamma, sigma2)
        ceiling = d_f * math.sqrt(2.0 * ec)
        for flag in flags:
            u = flag.resolve(ceiling)
            yield ebno, gamma, sigma2, u, BoundParams.from_channel(channel, u, d_f)


def bound_table(
    spec: CodeSpec,
    coeffs: TransferCoefficients,
    H: int,
    ebno_db: Sequence[float],
    gammas: Sequence[float],
    sigma2s: Sequence[float],
    flags: Sequence[FlagValue],
) -> pd.DataFrame:
    """
    Union bounds for every grid point. px_bound is empty where u >= d_f sqrt(2Ec/N0);
    with a capped k_max, bounds whose tail diverges (4 D >= 1) are empty and flagged.
    """
    rows = []
    for ebno, gamma, sigma2, u, bp in _grid_points(
        spec, coeffs.d_f, H, ebno_db, gammas, sigma2s, flags
    ):
        report = union_bounds(coeffs, bp, H, spec.m, spec.n_c, with_px=bp.px_defined)
        rows.append({
            "ebno_db": ebno,
            "gamma": gamma,
            "sigma2": sigma2,
            "u": u,
            "ec_over_n0": bp.ec_over_n0,
            "d_tilde": report.d_tilde,
            "pe_bound": report.pe,
            "pb_bound": report.pb,
            "px_bound": report.px,
            "tail_k_max": report.tail_k_max,
            "tail_term": report.tail_term,
            "tail_diverged": report.tail_diverged,
        })
    return pd.DataFrame(rows, columns=BOUND_COLUMNS)


def exponent_table(
    spec: CodeSpec,
    d_f: int,
    H: int,
    ebno_db: Sequence[float],
    gammas: Sequence[float],
    sigma2s: Sequence[float],
    flags: Sequence[FlagValue],
) -> pd.DataFrame:
    """h~(u), h~(-u) and the slope and exponent predictions for every grid point."""
    rows = []
    for ebno, gamma, sigma2, u, bp in _grid_points(
        spec, d_f, H, ebno_db, gammas, sigma2s, flags
    ):
        pred = exponent_predictions(bp)
        rows.append({
            "ebno_db": ebno,
            "gamma": gamma,
            "sigma2": sigma2,
            "u": u,
            "ec_over_n0": bp.ec_over_n0,
            "h_tilde_u": h_tilde(u, bp),
            "h_tilde_minus_u": h_tilde(-u, bp) if bp.px_defined else None,
            "ebno_slope": pred.ebno_slope,
            "gamma_exponent_pb": pred.gamma_exponent_pb,
            "gamma_exponent_px": pred.gamma_exponent_px,
        })
    return pd.DataFrame(rows, columns=EXPONENT_COLUMNS)
