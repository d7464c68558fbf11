import math
from concurrent.futures import ThreadPoolExecutor

import pandas as pd
import pytest

from viterbi_arq import harness
from viterbi_arq.constants import RNG_ALGORITHM_ID
from viterbi_arq.convcode import CodeSpec, build_trellis, compute_transfer_coefficients
from viterbi_arq.errors import ConfigError, ObservationError, SweepCellError
from viterbi_arq.export import read_csv
from viterbi_arq.harness import (
    CellTally,
    Estimate,
    ExperimentConfig,
    SweepRow,
    TrialResult,
    estimate,
    run_point,
    run_sweep,
    sweep_columns,
)
from viterbi_arq.lib.grid import FlagValue

FLAGS = (FlagValue(0.0), FlagValue(0.5, relative=True), FlagValue(0.9, relative=True))


def _config(**overrides) -> ExperimentConfig:
    base = dict(
        code=CodeSpec.from_octal("5,7"),
        H=20,
        ebno_db=(3.0,),
        gammas=(0.0,),
        sigma2s=(0.5,),
        flags=FLAGS,
        trials=300,
        seed=7,
        fading="iid",
        k_max=None,
        stop_after_errors=None,
        workers=1,
        output=None,
        quiet=True,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


class TestEstimate:
    def test_no_successes(self):
        est = estimate(0, 100)
        z2 = 1.959963984540054**2
        assert est.p_hat == 0.0 and est.ci_low == 0.0
        assert est.ci_high == pytest.approx(z2 / (100 + z2), rel=1e-12)

    def test_all_successes(self):
        est = estimate(100, 100)
        assert est.p_hat == 1.0 and est.ci_high == 1.0
        assert est.ci_low == pytest.approx(100 / (100 + 1.959963984540054**2), rel=1e-12)

    def test_half(self):
        est = estimate(50, 100)
        assert est.p_hat == 0.5
        assert est.ci_low + est.ci_high == pytest.approx(1.0, abs=1e-12)
        assert est.ci_high - est.ci_low == pytest.approx(0.196, abs=0.005)

    @pytest.mark.parametrize("k, n", [(0, 0), (5, 4), (-1, 10)])
    def test_rejects(self, k, n):
        with pytest.raises(ValueError):
            estimate(k, n)

    def test_undefined_and_columns(self):
        undefined = Estimate.undefined()
        assert not undefined.defined and math.isnan(undefined.p_hat)
        cols = estimate(3, 10).columns("px_mc")
        assert cols == {
            "px_mc": 0.3,
            "px_mc_ci_low": cols["px_mc_ci_low"],
            "px_mc_ci_high": cols["px_mc_ci_high"],
            "px_mc_k": 3,
            "px_mc_n": 10,
        }


class TestConfig:
    @pytest.mark.parametrize(
        "overrides",
        [
            dict(trials=0),
            dict(H=0),
            dict(ebno_db=()),
            dict(flags=()),
            dict(gammas=(-1.0,)),
            dict(sigma2s=(0.0,)),
            dict(fading="burst"),
            dict(workers=0),
            dict(stop_after_errors=0),
        ],
    )
    def test_invalid(self, overrides):
        with pytest.raises(ConfigError):
            _config(**overrides)

    def test_cell_order(self):
        cfg = _config(ebno_db=(0.0, 10.0), gammas=(0.0, 5.0), sigma2s=(0.5, 2.0))
        cells = cfg.cells()
        assert [c.index for c in cells] == list(range(8))
        assert [(c.sigma2, c.gamma, c.ebno_db) for c in cells[:3]] == [
            (0.5, 0.0, 0.0), (0.5, 0.0, 10.0), (0.5, 5.0, 0.0)
        ]
        assert cfg.frame_symbols == 44


class TestTally:
    def test_counts_per_flag(self):
        tally = CellTally([0.0, 1.0, 2.0])
        tally.add(TrialResult(bit_errors=0, critical_flag=5.0))
        tally.add(TrialResult(bit_errors=3, critical_flag=1.5))
        tally.add(TrialResult(bit_errors=1, critical_flag=0.2))
        assert tally.frames == 3 and tally.all_errors == 4
        assert tally.accepted == [3, 2, 1]
        assert tally.accepted_errors == [4, 3, 0]
        assert [tally.rejected(i) for i in range(3)] == [0, 1, 2]

    def test_record_layout(self):
        row = SweepRow(1.0, 0.0, 0.5, 0.0, estimate(1, 10), estimate(0, 5),
                       estimate(1, 10), 1e-3, 2e-3, 3e-3, 5, 42)
        assert list(row.to_record()) == sweep_columns()
        assert row.to_record()["rng_algorithm_id"] == RNG_ALGORITHM_ID


class TestRunPoint:
    @pytest.fixture(scope="class")
    def setup(self):
        cfg = _config()
        trellis = build_trellis(cfg.code)
        coeffs = compute_transfer_coefficients(trellis, cfg.frame_symbols)
        return cfg, trellis, coeffs

    def test_paired_flags(self, setup):
        cfg, trellis, coeffs = setup
        rows = run_point(cfg, cfg.cells()[0], trellis, coeffs)
        zero = rows[0]
        assert zero.u == 0.0
        assert zero.px_mc.k == 0
        assert zero.pb_mc == zero.pb_all_mc
        assert zero.pb_mc.k > 0
        errors = [r.pb_mc.k for r in rows]
        retransmissions = [r.px_mc.k for r in rows]
        assert errors == sorted(errors, reverse=True)
        assert retransmissions == sorted(retransmissions)
        for r in rows:
            assert r.trials == 300
            assert r.px_bound is not None and r.pb_bound is not None

    def test_executor_does_not_change_counts(self, setup):
        cfg, trellis, coeffs = setup
        serial = run_point(cfg, cfg.cells()[0], trellis, coeffs)
        with ThreadPoolExecutor(max_workers=3) as pool:
            parallel = run_point(
                _config(workers=3), cfg.cells()[0], trellis, coeffs, executor=pool
            )
        assert [r.to_record() for r in serial] == [r.to_record() for r in parallel]

    def test_early_stop_at_batch_boundary(self, setup):
        _, trellis, coeffs = setup
        cfg = _config(ebno_db=(0.0,), trials=2500, stop_after_errors=1)
        rows = run_point(cfg, cfg.cells()[0], trellis, coeffs)
        assert rows[0].trials == 1000
        assert rows[0].px_mc.n == 1000


class TestRunSweep:
    def test_row_count_and_columns(self):
        cfg = _config(ebno_db=tuple(float(x) for x in range(0, 21, 2)), trials=2)
        df = run_sweep(cfg)
        assert len(df) == 33
        assert list(df.columns) == sweep_columns()
        assert (df["px_mc_k"][df["u"] == 0.0] == 0).all()

    def test_deterministic_across_worker_counts(self, tmp_path):
        one = _config(trials=250, workers=1, output=tmp_path / "one.csv")
        many = _config(trials=250, workers=4, output=tmp_path / "many.csv")
        df_one = run_sweep(one)
        df_many = run_sweep(many)
        pd.testing.assert_frame_equal(df_one, df_many)
        assert (tmp_path / "one.csv").read_bytes() == (tmp_path / "many.csv").read_bytes()

    def test_seed_changes_results(self):
        a = run_sweep(_config(trials=200, seed=1))
        b = run_sweep(_config(trials=200, seed=2))
        assert not a["pb_all_mc_k"].equals(b["pb_all_mc_k"]) or not a["px_mc_k"].equals(
            b["px_mc_k"]
        )

    def test_csv_metadata(self, tmp_path):
        path = tmp_path / "sim.csv"
        df = run_sweep(_config(trials=20, output=path))
        loaded, meta = read_csv(path)
        assert meta["seed"] == "7"
        assert meta["code"] == "5,7"
        assert meta["rng_algorithm_id"] == RNG_ALGORITHM_ID
        assert meta["flags"] == "0,0.5u0,0.9u0"
        assert meta["d_f"] == "5"
        assert list(loaded.columns) == sweep_columns()
        assert loaded["pb_bound"].tolist() == df["pb_bound"].tolist()

    def test_failing_cell_names_itself(self, monkeypatch):
        def boom(*args, **kwargs):
            raise ObservationError("bad frame")

        monkeypatch.setattr(harness, "run_point", boom)
        with pytest.raises(SweepCellError, match="Cell 0"):
            run_sweep(_config(trials=5))
