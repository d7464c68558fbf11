#!/usr/bin/env python3
"""
Viterbi ARQ over Rician fading: bounds and Monte-Carlo sweeps
==================================================
Convolutionally coded transmission over an interleaved Rician channel, decoded by
the Viterbi algorithm with the Yamamoto-Itoh reliability flag (one-bit ARQ).

Usage:
    python3 main.py coeffs --code 5,7 --kmax 20
    python3 main.py bound --code 5,7 --H 100 --gamma 5 --sigma2 0.5 --u 0 --ebno-db 0:1:25 --out bounds.csv
    python3 main.py simulate --code 5,7 --H 100 --gamma 5 --sigma2 0.5 --u 0,0.5u0,0.9u0 \\
        --ebno-db 0:2:14 --trials 100000 --seed 42 --fading iid --out sim.csv
    python3 main.py exponents --code 5,7 --gamma 0:2:30 --ebno-db 10 --sigma2 0.5 --u 0
"""

import argparse
import sys
from pathlib import Path

import pandas as pd

from viterbi_arq import config
from viterbi_arq.constants import FADING_MODES, RNG_ALGORITHM_ID, VERSION
from viterbi_arq.convcode import (
    CodeSpec,
    build_trellis,
    compute_transfer_coefficients,
    free_distance,
)
from viterbi_arq.errors import ViterbiArqError
from viterbi_arq.export import write_csv
from viterbi_arq.harness import ExperimentConfig, run_sweep
from viterbi_arq.lib.grid import parse_flags, parse_grid
from viterbi_arq.summary import bound_table, coefficient_table, exponent_table


def _add_code_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--code", default="5,7", help="Octal generators (default: 5,7)")


def _add_grid_args(p: argparse.ArgumentParser, ebno_default: str) -> None:
    p.add_argument("--H", type=int, default=100, help="Information bits per frame (default: 100)")
    p.add_argument("--ebno-db", default=ebno_default,
                   help=f"E_b/N0 grid in dB, 'start:step:stop' or list (default: {ebno_default})")
    p.add_argument("--gamma", default="5", help="Rician factor grid (default: 5)")
    p.add_argument("--sigma2", default="0.5", help="sigma^2 grid (default: 0.5)")
    p.add_argument("--u", default="0",
                   help="Flags: absolute values or '<frac>u0' = frac * d_f sqrt(2Ec/N0) (default: 0)")


def _show(df: pd.DataFrame, out: str | None, metadata: dict[str, object]) -> None:
    if out:
        write_csv(df, out, metadata)
    else:
        print(df.to_string(index=False))


def _cmd_coeffs(args: argparse.Namespace) -> None:
    spec = CodeSpec.from_octal(args.code)
    coeffs = compute_transfer_coefficients(build_trellis(spec), args.kmax)
    print(f"🔍 Code ({spec.octal_label()}): m={spec.m}, n_c={spec.n_c}, d_f={coeffs.d_f}")
    _show(coefficient_table(coeffs), args.out,
          {"code": spec.octal_label(), "k_max": args.kmax, "version": VERSION})


def _cmd_bound(args: argparse.Namespace) -> None:
    spec = CodeSpec.from_octal(args.code)
    k_max = args.kmax if args.kmax is not None else spec.n_c * (args.H + spec.m)
    coeffs = compute_transfer_coefficients(build_trellis(spec), k_max)
    print(f"📄 Bounds for code ({spec.octal_label()}), H={args.H}, d_f={coeffs.d_f}")
    df = bound_table(spec, coeffs, args.H, parse_grid(args.ebno_db), parse_grid(args.gamma),
                     parse_grid(args.sigma2), parse_flags(args.u))
    _show(df, args.out, {"code": spec.octal_label(), "H": args.H, "m": spec.m,
                         "d_f": coeffs.d_f, "k_max": k_max, "version": VERSION})


def _cmd_exponents(args: argparse.Namespace) -> None:
    spec = CodeSpec.from_octal(args.code)
    d_f = free_distance(build_trellis(spec), args.kmax)
    df = exponent_table(spec, d_f, args.H, parse_grid(args.ebno_db),
                        parse_grid(args.gamma), parse_grid(args.sigma2), parse_flags(args.u))
    _show(df, args.out, {"code": spec.octal_label(), "H": args.H, "d_f": d_f, "version": VERSION})


def _cmd_simulate(args: argparse.Namespace) -> None:
    out = Path(args.out) if args.out else config.OUTPUT_DIR / "sim.csv"
    cfg = ExperimentConfig(
        code=CodeSpec.from_octal(args.code),
        H=args.H,
        ebno_db=tuple(parse_grid(args.ebno_db)),
        gammas=tuple(parse_grid(args.gamma)),
        sigma2s=tuple(parse_grid(args.sigma2)),
        flags=tuple(parse_flags(args.u)),
        trials=args.trials,
        seed=args.seed,
        fading=args.fading,
        k_max=args.kmax,
        stop_after_errors=args.stop_after_errors,
        workers=args.workers,
        output=out,
        quiet=args.quiet,
    )
    print("=" * 60)
    print(f"  Monte-Carlo sweep (seed {cfg.seed}, {RNG_ALGORITHM_ID})")
    print("=" * 60)
    run_sweep(cfg)
    print(f"\n✅ Done! Results saved to: {out.resolve()}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Yamamoto-Itoh Viterbi decoding over Rician fading: bounds and simulation"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="Print d_f and the a_k, c_k table")
    _add_code_args(p)
    p.add_argument("--kmax", type=int, default=20, help="Largest weight k (default: 20)")
    p.add_argument("--out", help="Write CSV instead of printing")
    p.set_defaults(func=_cmd_coeffs)

    p = sub.add_parser("bound", help="Analytical union bounds only")
    _add_code_args(p)
    _add_grid_args(p, "0:1:25")
    p.add_argument("--kmax", type=int, default=config.K_MAX,
                   help="Coefficient weight cap (default: n_c*(H+m))")
    p.add_argument("--out", help="Write CSV instead of printing")
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("exponents", help="h~(u) and exponent predictions per cell")
    _add_code_args(p)
    _add_grid_args(p, "10")
    p.set_defaults(gamma="0:2:30")
    p.add_argument("--kmax", type=int, default=20, help="Free-distance search cap (default: 20)")
    p.add_argument("--out", help="Write CSV instead of printing")
    p.set_defaults(func=_cmd_exponents)

    p = sub.add_parser("simulate", help="Monte-Carlo sweep with bounds")
    _add_code_args(p)
    _add_grid_args(p, "0:2:14")
    p.add_argument("--trials", type=int, default=config.TRIALS,
                   help=f"Frames per grid cell (default: {config.TRIALS})")
    p.add_argument("--seed", type=int, default=config.SEED,
                   help=f"Base seed (default: {config.SEED})")
    p.add_argument("--fading", choices=FADING_MODES, default="iid",
                   help="Fading mode (default: iid)")
    p.add_argument("--kmax", type=int, default=config.K_MAX,
                   help="Coefficient weight cap for bounds (default: n_c*(H+m))")
    p.add_argument("--stop-after-errors", type=int, default=config.STOP_AFTER_ERRORS,
                   help="Stop a cell after this many bit errors at the smallest u")
    p.add_argument("--workers", type=int, default=config.WORKERS,
                   help=f"Worker threads (default: {config.WORKERS})")
    p.add_argument("--quiet", action="store_true", help="No progress output")
    p.add_argument("--out", help=f"CSV path (default: {config.OUTPUT_DIR / 'sim.csv'})")
    p.set_defaults(func=_cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> None:
    """CLI entry point."""
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ViterbiArqError, ValueError, OSError) as exc:
        print(f"❌ {exc}")
        sys.exit(1)


if __name__ == "__main__":
    main()
