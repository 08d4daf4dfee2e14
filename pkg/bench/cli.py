"""
Command line: python -m bench.cli {verify,tune,bench} [flags]

  verify  oracle sweeps, exit 1 on any tolerance breach
  tune    parameter search, printed and cached
  bench   explicit vs hybrid timings as CSV on stdout (progress on stderr)
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

from bench.bench import cmd_bench
from bench.sizes import padded_size, parse_ratio, parse_sizes
from bench.tune import cmd_tune
from bench.verify import run_verify, summarize
from dealias.plan import SYMMETRIES
from utils.envs import get_envs
from utils.log import EventLog

# Largest sizes whose direct-sum oracle stays fast, per dimension.
DEFAULT_MAX_L = {1: 48, 2: 12, 3: 6}

def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected an integer, got '{text}'") from e
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value

def _sizes(text: str) -> List[int]:
    try:
        return parse_sizes(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e

def _ratio(text: str) -> Fraction:
    try:
        return parse_ratio(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e

def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kind", choices=SYMMETRIES, default="complex")
    common.add_argument("--dims", type=int, choices=(1, 2, 3), default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--csv-header", choices=("on", "off"), default="on")
    common.add_argument("--threads", type=int, default=1, help="reserved; only 1 is supported")
    return common

def _sized(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--L", dest="L", type=_sizes, required=True, help="size n or inclusive range a..b")
    padding = parser.add_mutually_exclusive_group()
    padding.add_argument("--M", dest="M", type=_positive_int, help="padded length (single L only)")
    padding.add_argument("--ratio", type=_ratio, help="M/L as a decimal or fraction, e.g. 3/2")
    parser.add_argument("--budget", type=float, default=None, help="tuning budget in seconds per size")

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bench.cli", description="Hybrid dealiasing verification and benchmarks")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()

    verify = sub.add_parser("verify", parents=[common], help="oracle sweeps")
    verify.add_argument("--max-L", dest="max_L", type=_positive_int, default=None)
    verify.add_argument("--exhaustive", action="store_true", help="every FFT size m in 1..M")

    tune = sub.add_parser("tune", parents=[common], help="parameter search")
    _sized(tune)
    tune.add_argument("--placement", choices=("in-place", "out-of-place"), default=None)
    tune.add_argument("--show-space", action="store_true")
    tune.add_argument("--exhaustive", action="store_true", help="do not prune the search space")

    bench = sub.add_parser("bench", parents=[common], help="explicit vs hybrid timings")
    _sized(bench)
    bench.add_argument("--incremental", action="store_true", help="write each size's rows as soon as measured")
    return parser

def _padded(parser: argparse.ArgumentParser, args: argparse.Namespace) -> List[int]:
    if args.M is not None and len(args.L) > 1:
        parser.error("--M needs a single --L; use --ratio for ranges")
    try:
        return [padded_size(L, args.kind, M=args.M, ratio=args.ratio) for L in args.L]
    except ValueError as e:
        parser.error(str(e))

# ---- Main ----

def _verify(args: argparse.Namespace, log: EventLog) -> int:
    max_L = args.max_L or DEFAULT_MAX_L[args.dims]
    print(f"Verifying kind={args.kind} dims={args.dims} up to L={max_L} (seed {args.seed})")
    try:
        reports = run_verify(args.kind, args.dims, max_L, seed=args.seed, exhaustive=args.exhaustive, log=log)
    except ValueError as e:
        print(f"  ! error during verification: {e}")
        log.summary(status="error", error=str(e))
        return 1

    failures = [r for r in reports if not r.passed]
    for r in failures[:20]:
        print(f"  ! error kind={r.kind} dims={r.dims} L={r.L} M={r.M} m={r.m} D={r.D} seed={r.seed}: "
              f"error {r.error:.3e} > {r.tolerance:.0e}")
    for (kind, dims), worst in sorted(summarize(reports).items()):
        print(f"Worst error kind={kind} dims={dims}: {worst.error:.3e} (L={worst.L} M={worst.M} m={worst.m})")
    print(f"Checked {len(reports)} cases, {len(failures)} failures")
    log.summary(status="fail" if failures else "ok", cases=len(reports), failures=len(failures),
                worst={f"{k}-{d}": w.error for (k, d), w in summarize(reports).items()})
    return 1 if failures else 0

def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads != 1:
        parser.error(f"--threads {args.threads} is not supported; this build runs single-threaded")
    if args.command == "verify" and args.max_L is not None and args.dims > 1 and args.max_L > 2 * DEFAULT_MAX_L[args.dims]:
        parser.error(f"--max-L {args.max_L} is too large for the direct-sum oracle in {args.dims} dimensions")

    # stdout carries the CSV for bench
    envs = get_envs(log_envs=args.command != "bench")
    log = EventLog(args.command, log_dir=envs.log_dir)
    log.event("start", argv=list(argv) if argv is not None else sys.argv[1:])

    if args.command == "verify":
        return _verify(args, log)

    if args.budget is not None and args.budget <= 0:
        parser.error(f"--budget must be positive, got {args.budget}")
    Ms = _padded(parser, args)
    if args.command == "tune" and args.kind == "hermitian" and args.dims > 1:
        even = [L for L in args.L if L % 2 == 0]
        if even:
            parser.error(f"multidimensional Hermitian sizes must be odd, got --L {even[0]}")
    header = args.csv_header == "on"
    if args.command == "tune":
        status = cmd_tune(args.kind, args.dims, args.L, Ms, budget=args.budget, placement=args.placement,
                          show=args.show_space, exhaustive=args.exhaustive, log=log)
    else:
        status = cmd_bench(args.kind, args.dims, args.L, Ms, seed=args.seed, header=header,
                           incremental=args.incremental, budget=args.budget, log=log)
    log.summary(status="ok" if status == 0 else "fail", sizes=len(args.L))
    return status

if __name__ == "__main__":
    try:
        sys.exit(main())
    except Exception as e:
        print(f"  ! error during execution: {e}")
        raise
