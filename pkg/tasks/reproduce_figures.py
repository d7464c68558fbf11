#!/usr/bin/env python3
"""
Figure Data Sets for the (5,7) Code over Rician Fading
=======================================================
Runs the Monte-Carlo sweeps and bound evaluations behind the standard plots and
writes one CSV per plot. Plotting is left to whatever tool reads the CSVs.

Usage:
    python tasks/reproduce_figures.py
    python tasks/reproduce_figures.py --out output/figures --trials 100000 --workers 8

Output structure:
    <out>/
        pb_vs_ebno.csv        <- P_b(0) simulated and bounded vs E_b/N0 (gamma = 5)
        tradeoff_vs_ebno.csv  <- P_b(u), P_x(u) vs E_b/N0 for three flag settings
        pb_vs_flag.csv        <- P_b(u), P_x(u) vs u at a fixed E_b/N0
        pb_vs_gamma.csv       <- P_b(0) vs Rician factor at a fixed E_b/N0
        bounds_vs_ebno.csv    <- bounds only, E_b/N0 0..30 dB for several gamma
"""

import argparse
import sys
from pathlib import Path
from typing import Any

import numpy as np

# Make sure we can import the project's own modules regardless of CWD
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from viterbi_arq import config
from viterbi_arq.constants import VERSION
from viterbi_arq.convcode import CodeSpec, build_trellis, compute_transfer_coefficients
from viterbi_arq.errors import ViterbiArqError
from viterbi_arq.export import write_csv
from viterbi_arq.harness import ExperimentConfig, run_sweep
from viterbi_arq.lib.grid import FlagValue
from viterbi_arq.summary import bound_table

CODE = CodeSpec.from_octal("5,7")
H = 100
GAMMA = 5.0
SIGMA2 = 0.5
FLAG_FRACTIONS = (0.0, 0.5, 0.9)


# ── Helpers ───────────────────────────────────────────────────────

def _grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    return tuple(float(v) for v in np.round(np.arange(start, stop + step / 2, step), 10))


def _sweep(args: argparse.Namespace, name: str, **grid: Any) -> None:
    cfg = ExperimentConfig(
        code=CODE,
        H=H,
        trials=args.trials,
        seed=args.seed,
        workers=args.workers,
        output=args.out / name,
        quiet=args.quiet,
        **grid,
    )
    print(f"\n🔍 {name}: {len(cfg.cells())} cell(s) × {len(cfg.flags)} flag(s)")
    run_sweep(cfg)


# ── Figures ───────────────────────────────────────────────────────

def pb_vs_ebno(args: argparse.Namespace) -> None:
    _sweep(args, "pb_vs_ebno.csv", ebno_db=_grid(0.0, 14.0, 2.0),
           gammas=(GAMMA,), sigma2s=(SIGMA2,))


def tradeoff_vs_ebno(args: argparse.Namespace) -> None:
    flags = tuple(FlagValue(f, relative=True) for f in FLAG_FRACTIONS)
    _sweep(args, "tradeoff_vs_ebno.csv", ebno_db=_grid(0.0, 14.0, 2.0),
           gammas=(GAMMA,), sigma2s=(SIGMA2,), flags=flags)


def pb_vs_flag(args: argparse.Namespace) -> None:
    flags = tuple(FlagValue(f, relative=True) for f in _grid(0.0, 0.9, 0.1))
    _sweep(args, "pb_vs_flag.csv", ebno_db=(6.0,),
           gammas=(GAMMA,), sigma2s=(SIGMA2,), flags=flags)


def pb_vs_gamma(args: argparse.Namespace) -> None:
    _sweep(args, "pb_vs_gamma.csv", ebno_db=(6.0,),
           gammas=_grid(0.0, 10.0, 1.0), sigma2s=(SIGMA2,))


def bounds_vs_ebno(args: argparse.Namespace) -> None:
    coeffs = compute_transfer_coefficients(build_trellis(CODE), CODE.n_c * (H + CODE.m))
    flags = [FlagValue(f, relative=True) for f in FLAG_FRACTIONS]
    print(f"\n🔍 bounds_vs_ebno.csv: d_f={coeffs.d_f}, k_max={coeffs.k_max}")
    df = bound_table(CODE, coeffs, H, list(_grid(0.0, 30.0, 1.0)), [0.0, 2.0, 5.0, 10.0],
                     [SIGMA2], flags)
    write_csv(df, args.out / "bounds_vs_ebno.csv",
              {"code": CODE.octal_label(), "H": H, "m": CODE.m, "d_f": coeffs.d_f,
               "k_max": coeffs.k_max, "version": VERSION}, quiet=args.quiet)


FIGURES = {
    "ebno": pb_vs_ebno,
    "tradeoff": tradeoff_vs_ebno,
    "flag": pb_vs_flag,
    "gamma": pb_vs_gamma,
    "bounds": bounds_vs_ebno,
}


def main() -> None:
    parser = argparse.ArgumentParser(description="Write the figure data sets as CSVs")
    parser.add_argument("--out", type=Path, default=config.OUTPUT_DIR / "figures",
                        help=f"Output directory (default: {config.OUTPUT_DIR / 'figures'})")
    parser.add_argument("--trials", type=int, default=config.TRIALS,
                        help=f"Frames per grid cell (default: {config.TRIALS})")
    parser.add_argument("--seed", type=int, default=config.SEED,
                        help=f"Base seed (default: {config.SEED})")
    parser.add_argument("--workers", type=int, default=config.WORKERS,
                        help=f"Worker threads (default: {config.WORKERS})")
    parser.add_argument("--only", choices=sorted(FIGURES), action="append",
                        help="Restrict to one data set (repeatable)")
    parser.add_argument("--quiet", action="store_true", help="Only per-figure progress")
    args = parser.parse_args()

    selected = args.only or list(FIGURES)
    print("=" * 60)
    print(f"  Figure data sets: {', '.join(selected)} ({args.trials} frames per cell)")
    print("=" * 60)
    for name in selected:
        try:
            FIGURES[name](args)
        except (ViterbiArqError, OSError) as exc:
            print(f"❌ {name}: {exc}")
            sys.exit(1)

    print(f"\n✅ Done! CSVs saved to: {args.out.resolve()}")


if __name__ == "__main__":
    main()
