"""
Timing sweeps: hybrid (tuned) against explicit dealiasing at the fastest measured
explicit size (in-place and out-of-place) and at the next power of two.
"""

from __future__ import annotations

import math
import sys
import time
from contextlib import redirect_stdout
from typing import Callable, Dict, List, Optional, Union

import numpy as np

from bench.verify import spot_check
from dealias.conv1d import Conv1dPlan, builtin_mult_product
from dealias.convnd import AxisSpec, ConvPlanND
from dealias.oracle import random_input
from dealias.plan import explicit_params, next_pow2
from dealias.tuner import tune_1d, tune_nd
from utils.csv import bench_rows_to_csv
from utils.log import EventLog

REPEATS = 5

Plan = Union[Conv1dPlan, ConvPlanND]

def _progress(msg: str) -> None:
    print(msg, file=sys.stderr)

def normalized(median_ns: int, L: int, dims: int) -> float:
    """median / (N log2 N) with N = L^dims."""
    N = L ** dims
    return median_ns / max(N * math.log2(N), 1.0)

def time_plan(plan: Plan, kind: str, *, repeats: int = REPEATS, seed: int = 0,
              timer: Callable[[], int] = time.perf_counter_ns) -> int:
    shape = plan.shape if isinstance(plan, ConvPlanND) else plan.input_shape
    rng = np.random.default_rng(seed)
    inputs = [random_input(rng, shape, kind) for _ in range(plan.A)]
    out = [np.empty(shape, dtype=complex) for _ in range(plan.B)]
    mult = builtin_mult_product(plan.A)
    plan.convolve(inputs, mult, out=out)
    samples = []
    for _ in range(repeats):
        start = timer()
        plan.convolve(inputs, mult, out=out)
        samples.append(timer() - start)
    return int(np.median(samples))

def explicit_plan(kind: str, dims: int, L: int, M: int, m: int, inplace: bool) -> Plan:
    if dims == 1:
        return Conv1dPlan(explicit_params(L, M, m, kind, inplace=inplace))
    return ConvPlanND([AxisSpec(L=L, M=M, m=m, inplace=inplace)] * dims, kind=kind)

def optimal_explicit_plan(kind: str, dims: int, L: int, M: int, inplace: bool, budget: Optional[float]) -> Plan:
    """Explicit plan whose FFT size is the fastest smooth size from M up to the next power of two."""
    placement = "in-place" if inplace else "out-of-place"
    if dims == 1:
        result = tune_1d(L, M, kind, 2, 1, budget, placement=placement, explicit_only=True, cache_path=False)
        return Conv1dPlan(result.params)
    return tune_nd([AxisSpec(L=L, M=M)] * dims, kind, 2, 1, budget, placement=placement, explicit_only=True,
                   cache_path=False)

def hybrid_plan(kind: str, dims: int, L: int, M: int, budget: Optional[float]) -> Plan:
    if dims == 1:
        return Conv1dPlan(tune_1d(L, M, kind, 2, 1, budget).params)
    return tune_nd([AxisSpec(L=L, M=M)] * dims, kind, 2, 1, budget)

def bench_rows(kind: str, dims: int, L: int, M: int, *, seed: int = 0, budget: Optional[float] = None,
               log: Optional[EventLog] = None) -> List[Dict]:
    builders: Dict[str, Callable[[], Plan]] = {
        "hybrid": lambda: hybrid_plan(kind, dims, L, M, budget),
        "explicit-ip": lambda: optimal_explicit_plan(kind, dims, L, M, True, budget),
        "explicit-op": lambda: optimal_explicit_plan(kind, dims, L, M, False, budget),
        "explicit-pow2": lambda: explicit_plan(kind, dims, L, M, next_pow2(M), True),
    }
    rows: List[Dict] = []
    for strategy, build in builders.items():
        try:
            # keep stdout for CSV rows
            with redirect_stdout(sys.stderr):
                plan = build()
            report = spot_check(plan, kind, seed)
            if not report.passed:
                _progress(f"  ! error {strategy} L={L} M={M}: spot check failed (error {report.error:.3e})")
                if log is not None:
                    log.event("spot_check_failure", strategy=strategy, **report.to_event())
                continue
            median_ns = time_plan(plan, kind, seed=seed)
        except MemoryError as e:
            _progress(f"  ! error {strategy} L={L} M={M}: allocation failed ({e})")
            if log is not None:
                log.event("allocation_failure", strategy=strategy, L=L, M=M, dims=dims)
            continue
        row = {"mode": kind, "dims": dims, "L": L, "M": M, "strategy": strategy, "threads": 1,
               "median_ns": median_ns, "normalized_ns": normalized(median_ns, L, dims)}
        rows.append(row)
        if log is not None:
            log.event("bench_row", **row)
    return rows

def cmd_bench(kind: str, dims: int, sizes: List[int], Ms: List[int], *, seed: int = 0, header: bool = True,
              incremental: bool = False, budget: Optional[float] = None, log: Optional[EventLog] = None) -> int:
    all_rows: List[Dict] = []
    for i, (L, M) in enumerate(zip(sizes, Ms)):
        if kind == "hermitian" and dims > 1 and L % 2 == 0:
            _progress(f"  WARNING: skipping L={L}: multidimensional Hermitian sizes must be odd")
            continue
        _progress(f"Benchmarking kind={kind} dims={dims} L={L} M={M} ({i + 1}/{len(sizes)})")
        rows = bench_rows(kind, dims, L, M, seed=seed, budget=budget, log=log)
        if incremental and rows:
            sys.stdout.write(bench_rows_to_csv(rows, header=header and not all_rows))
            sys.stdout.flush()
        all_rows.extend(rows)
    if not incremental:
        sys.stdout.write(bench_rows_to_csv(all_rows, header=header))
    return 0
