import numpy as np
import pandas as pd
import pytest

from viterbi_arq.convcode import compute_transfer_coefficients
from viterbi_arq.lib.grid import FlagValue
from viterbi_arq.summary import bound_table, coefficient_table, exponent_table


def test_coefficient_table_keeps_exact_integers(trellis57):
    df = coefficient_table(compute_transfer_coefficients(trellis57, 80))
    last = df.iloc[-1]
    assert last["k"] == 80
    assert last["a_k"] == 2**75
    assert last["c_k"] == 76 * 2**75
    assert isinstance(last["c_k"], int)


def test_bound_table_grid_order(code57, trellis57):
    coeffs = compute_transfer_coefficients(trellis57, 24)
    df = bound_table(code57, coeffs, 10, [0.0, 10.0], [0.0, 5.0], [0.5],
                     [FlagValue(0.0), FlagValue(0.5, relative=True)])
    assert len(df) == 8
    assert df["gamma"].tolist() == [0.0] * 4 + [5.0] * 4
    assert df["ebno_db"].tolist()[:4] == [0.0, 0.0, 10.0, 10.0]
    assert (df.loc[df["u"] == 0.0, "px_bound"] == df.loc[df["u"] == 0.0, "pe_bound"]).all()


def test_exponent_table_beyond_flag_ceiling(code57):
    df = exponent_table(code57, 5, 100, [10.0], [0.0, 5.0], [0.5], [FlagValue(1.0, relative=True)])
    assert df["h_tilde_minus_u"].isna().all()
    assert df["gamma_exponent_px"].isna().all()
    assert df["gamma_exponent_pb"].tolist() == pytest.approx(
        (5 * df["h_tilde_u"]).tolist(), rel=1e-12
    )


def test_bound_table_flags_divergent_tail(code57, trellis57):
    coeffs = compute_transfer_coefficients(trellis57, 20)
    df = bound_table(code57, coeffs, 1000, [0.0, 20.0], [0.0], [0.5], [FlagValue(0.0)])
    assert df["tail_diverged"].tolist() == [True, False]
    low, high = df.iloc[0], df.iloc[1]
    for col in ("pe_bound", "pb_bound", "px_bound", "tail_term"):
        assert pd.isna(low[col])
        assert np.isfinite(high[col])
    assert high["pb_bound"] < 1e-6
