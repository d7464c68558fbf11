"""
Monte-Carlo engine: encode -> fade -> decode trials per grid cell, paired across flags.

One decode per frame answers every flag u in the cell (decoded bits never depend on u,
and DecodeOutcome.critical_flag gives the accept set). Trial i of cell c draws from
RandomStream.for_cell(seed, c).spawn(i), so counts do not depend on worker count or
completion order.
"""

import math
from concurrent.futures import Executor, ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, NamedTuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from viterbi_arq import config as env
from viterbi_arq.bounds import BoundParams, union_bounds
from viterbi_arq.channel import (
    ChannelParams,
    RandomStream,
    db_to_linear,
    ebno_to_ecno,
    transmit,
)
from viterbi_arq.constants import (
    ESTIMATE_SUFFIXES,
    FADING_MODES,
    RNG_ALGORITHM_ID,
    SWEEP_COLUMNS,
    TRIAL_BATCH,
    VERSION,
    WILSON_Z,
)
from viterbi_arq.convcode import (
    CodeSpec,
    TransferCoefficients,
    Trellis,
    build_trellis,
    compute_transfer_coefficients,
    encode,
)
from viterbi_arq.decoder import YIConfig, decode
from viterbi_arq.errors import ConfigError, SweepCellError, ViterbiArqError
from viterbi_arq.export import write_csv
from viterbi_arq.lib.grid import FlagValue

ESTIMATE_FIELDS = ("pb_mc", "px_mc", "pb_all_mc")


class Cell(NamedTuple):
    index: int
    ebno_db: float
    gamma: float
    sigma2: float

    def label(self) -> str:
        return f"Eb/N0={self.ebno_db:g} dB, γ={self.gamma:g}, σ²={self.sigma2:g}"


@dataclass(frozen=True)
class ExperimentConfig:
    code: CodeSpec
    H: int
    ebno_db: tuple[float, ...]
    gammas: tuple[float, ...]
    sigma2s: tuple[float, ...]
    flags: tuple[FlagValue, ...] = (FlagValue(0.0),)
    trials: int = env.TRIALS
    seed: int = env.SEED
    fading: str = "iid"
    k_max: int | None = env.K_MAX
    stop_after_errors: int | None = env.STOP_AFTER_ERRORS
    workers: int = env.WORKERS
    output: Path | None = None
    quiet: bool = False

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.H < 1:
            raise ConfigError(f"H must be >= 1, got {self.H}")
        for name in ("ebno_db", "gammas", "sigma2s", "flags"):
            if not getattr(self, name):
                raise ConfigError(f"Grid {name!r} is empty")
        if any(f.value < 0 for f in self.flags):
            raise ConfigError("Flags must be nonnegative")
        if any(g < 0 for g in self.gammas) or any(s <= 0 for s in self.sigma2s):
            raise ConfigError("Need gamma >= 0 and sigma^2 > 0 on every grid point")
        if self.fading not in FADING_MODES:
            raise ConfigError(f"Unknown fading mode {self.fading!r}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.stop_after_errors is not None and self.stop_after_errors < 1:
            raise ConfigError(f"stop_after_errors must be >= 1, got {self.stop_after_errors}")

    @property
    def frame_symbols(self) -> int:
        return self.code.n_c * (self.H + self.code.m)

    def cells(self) -> list[Cell]:
        """Grid cells in output order: sigma^2, then gamma, then E_b/N0."""
        out: list[Cell] = []
        for sigma2 in self.sigma2s:
            for gamma in self.gammas:
                for ebno in self.ebno_db:
                    out.append(Cell(len(out), ebno, gamma, sigma2))
        return out


@dataclass(frozen=True, slots=True)
class Estimate:
    p_hat: float
    ci_low: float
    ci_high: float
    k: int
    n: int

    @classmethod
    def undefined(cls) -> "Estimate":
        """Sentinel for a rate with no denominator (e.g. no accepted frames)."""
        return cls(math.nan, math.nan, math.nan, 0, 0)

    @property
    def defined(self) -> bool:
        return self.n > 0

    def columns(self, name: str) -> dict[str, float | int]:
        values = (self.p_hat, self.ci_low, self.ci_high, self.k, self.n)
        return {name + suffix: v for suffix, v in zip(ESTIMATE_SUFFIXES, values)}


def estimate(k: int, n: int) -> Estimate:
    """Point estimate k/n with a 95% Wilson interval, pinned to 0 (k=0) and 1 (k=n)."""
    if n < 1:
        raise ValueError(f"estimate needs n >= 1, got n={n}")
    if not 0 <= k <= n:
        raise ValueError(f"estimate needs 0 <= k <= n, got k={k}, n={n}")
    p = k / n
    z2 = WILSON_Z * WILSON_Z
    denom = 1.0 + z2 / n
    center = (p + z2 / (2.0 * n)) / denom
    half = WILSON_Z * math.sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom
    low = 0.0 if k == 0 else min(p, max(0.0, center - half))
    high = 1.0 if k == n else max(p, min(1.0, center + half))
    return Estimate(p, low, high, k, n)


@dataclass(frozen=True)
class SweepRow:
    ebno_db: float
    gamma: float
    sigma2: float
    u: float
    pb_mc: Estimate
    px_mc: Estimate
    pb_all_mc: Estimate
    pb_bound: float | None
    px_bound: float | None
    pe_bound: float | None
    trials: int
    seed: int
    rng_algorithm_id: str = RNG_ALGORITHM_ID

    def to_record(self) -> dict[str, Any]:
        """Flat CSV record; each Estimate spreads over five columns."""
        record: dict[str, Any] = {}
        for name in SWEEP_COLUMNS:
            value = getattr(self, name)
            if isinstance(value, Estimate):
                record.update(value.columns(name))
            else:
                record[name] = value
        return record


def sweep_columns() -> list[str]:
    cols: list[str] = []
    for name in SWEEP_COLUMNS:
        if name in ESTIMATE_FIELDS:
            cols.extend(name + suffix for suffix in ESTIMATE_SUFFIXES)
        else:
            cols.append(name)
    return cols


class TrialResult(NamedTuple):
    bit_errors: int
    critical_flag: float


@dataclass
class CellTally:
    """Commutative counters for one cell, one slot per flag."""

    flags: list[float]
    frames: int = 0
    all_errors: int = 0
    accepted: list[int] = field(init=False, default_factory=list)
    accepted_errors: list[int] = field(init=False, default_factory=list)

    def __post_init__(self) -> None:
        self.accepted = [0] * len(self.flags)
        self.accepted_errors = [0] * len(self.flags)

    def add(self, result: TrialResult) -> None:
        self.frames += 1
        self.all_errors += result.bit_errors
        for i, u in enumerate(self.flags):
            if u <= result.critical_flag:
                self.accepted[i] += 1
                self.accepted_errors[i] += result.bit_errors

    def rejected(self, i: int) -> int:
        return self.frames - self.accepted[i]


def run_trials(
    trellis: Trellis,
    d_f: int,
    channel: ChannelParams,
    fading: str,
    stream: RandomStream,
    H: int,
    start: int,
    stop: int,
) -> list[TrialResult]:
    """Trials start..stop-1 of one cell; trial i uses substream i."""
    cfg = YIConfig(0.0, d_f)
    results: list[TrialResult] = []
    for i in range(start, stop):
        rng = stream.spawn(i)
        info = rng.bits(H)
        obs = transmit(encode(trellis, info), channel, fading, rng, n_c=trellis.n_c)
        outcome = decode(trellis, obs, channel, cfg)
        errors = int(np.count_nonzero(outcome.bits != info))
        results.append(TrialResult(errors, outcome.critical_flag))
    return results


def _chunks(start: int, stop: int, parts: int) -> list[tuple[int, int]]:
    size = max(1, -(-(stop - start) // parts))
    return [(lo, min(lo + size, stop)) for lo in range(start, stop, size)]


def run_point(
    cfg: ExperimentConfig,
    cell: Cell,
    trellis: Trellis,
    coeffs: TransferCoefficients,
    executor: Executor | None = None,
) -> list[SweepRow]:
    """Simulate one grid cell and attach bounds; one SweepRow per flag."""
    spec = cfg.code
    ec = ebno_to_ecno(db_to_linear(cell.ebno_db), cfg.H, spec.m, spec.rate)
    channel = ChannelParams.from_gamma(ec, cell.gamma, cell.sigma2)
    ceiling = coeffs.d_f * math.sqrt(2.0 * ec)
    us = [f.resolve(ceiling) for f in cfg.flags]
    stream = RandomStream.for_cell(cfg.seed, cell.index)
    tally = CellTally(us)
    smallest = int(np.argmin(us))

    def _work(lo: int, hi: int) -> list[TrialResult]:
        return run_trials(trellis, coeffs.d_f, channel, cfg.fading, stream, cfg.H, lo, hi)

    with tqdm(total=cfg.trials, desc=cell.label(), unit="frame",
              disable=cfg.quiet, leave=False) as bar:
        for batch_lo in range(0, cfg.trials, TRIAL_BATCH):
            batch_hi = min(batch_lo + TRIAL_BATCH, cfg.trials)
            if executor is None:
                for r in _work(batch_lo, batch_hi):
                    tally.add(r)
                bar.update(batch_hi - batch_lo)
            else:
                futures = {
                    executor.submit(_work, lo, hi): (lo, hi)
                    for lo, hi in _chunks(batch_lo, batch_hi, cfg.workers)
                }
                for future in as_completed(futures):
                    lo, hi = futures[future]
                    for r in future.result():
                        tally.add(r)
                    bar.update(hi - lo)
            if (cfg.stop_after_errors is not None
                    and tally.accepted_errors[smallest] >= cfg.stop_after_errors):
                break

    rows: list[SweepRow] = []
    for i, u in enumerate(us):
        bp = BoundParams.from_channel(channel, u, coeffs.d_f)
        report = union_bounds(
            coeffs, bp, cfg.H, spec.m, spec.n_c, with_px=bp.px_defined
        )
        n_bits = tally.accepted[i] * cfg.H
        rows.append(SweepRow(
            ebno_db=cell.ebno_db,
            gamma=cell.gamma,
            sigma2=cell.sigma2,
            u=u,
            pb_mc=estimate(tally.accepted_errors[i], n_bits) if n_bits else Estimate.undefined(),
            px_mc=estimate(tally.rejected(i), tally.frames),
            pb_all_mc=estimate(tally.all_errors, tally.frames * cfg.H),
            pb_bound=report.pb,
            px_bound=report.px,
            pe_bound=report.pe,
            trials=tally.frames,
            seed=cfg.seed,
        ))
    return rows


def sweep_metadata(cfg: ExperimentConfig, d_f: int) -> dict[str, Any]:
    return {
        "seed": cfg.seed,
        "rng_algorithm_id": RNG_ALGORITHM_ID,
        "code": cfg.code.octal_label(),
        "H": cfg.H,
        "m": cfg.code.m,
        "d_f": d_f,
        "fading": cfg.fading,
        "trials": cfg.trials,
        "flags": ",".join(f.label() for f in cfg.flags),
        "version": VERSION,
    }


def run_sweep(cfg: ExperimentConfig) -> pd.DataFrame:
    """
    Run every cell of the grid, write the CSV when cfg.output is set, and return the
    rows as a DataFrame. A failing cell aborts the sweep with SweepCellError.
    """
    trellis = build_trellis(cfg.code)
    k_cap = cfg.k_max if cfg.k_max is not None else cfg.frame_symbols
    coeffs = compute_transfer_coefficients(trellis, k_cap)
    cells = cfg.cells()
    if not cfg.quiet:
        print(f"📄 Code ({cfg.code.octal_label()}), H={cfg.H}, m={cfg.code.m}, "
              f"{cfg.fading} fading")
        print(f"🔍 d_f={coeffs.d_f}, {len(cells)} cell(s) × {len(cfg.flags)} flag(s), "
              f"{cfg.trials} frames per cell")

    rows: list[SweepRow] = []
    with ThreadPoolExecutor(max_workers=cfg.workers) as executor:
        for cell in cells:
            try:
                cell_rows = run_point(cfg, cell, trellis, coeffs, executor)
            except ViterbiArqError as exc:
                raise SweepCellError(f"Cell {cell.index} ({cell.label()}) failed: {exc}") from exc
            rows.extend(cell_rows)
            if not cfg.quiet:
                head = cell_rows[0]
                print(f"   ✅ {cell.label()}: pb_mc={head.pb_mc.p_hat:.3e} "
                      f"(u={head.u:g}), {head.trials} frames")

    df = pd.DataFrame([r.to_record() for r in rows], columns=sweep_columns())
    if cfg.output is not None:
        write_csv(df, cfg.output, sweep_metadata(cfg, coeffs.d_f), quiet=cfg.quiet)
    return df
