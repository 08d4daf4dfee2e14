from __future__ import annotations

from typing import List, Optional

from dealias.convnd import AxisSpec
from dealias.plan import PlanParams
from dealias.tuner import TimingRecord, TuneResult, build_search_space, tune_1d, tune_nd
from utils.log import EventLog

def describe(params: PlanParams) -> str:
    placement = "in-place" if params.inplace else "out-of-place"
    return (f"kind={params.symmetry} L={params.L} M={params.M} m={params.m} p={params.p} q={params.q} "
            f"n={params.n} D={params.D} {placement} regime={params.regime}")

def _print_record(record: TimingRecord) -> None:
    p = record.params
    placement = "ip" if p.inplace else "op"
    print(f"  m={p.m:<6} p={p.p:<4} q={p.q:<5} D={p.D:<4} {placement}  median={record.median_ns / 1e3:10.1f} us"
          f"  spread={record.spread_ns / 1e3:8.1f} us")

def show_space(L: int, M: int, kind: str, *, exhaustive: bool = False) -> None:
    space = build_search_space(L, M, kind, max_candidates=None if exhaustive else 64)
    print(f"Search space for kind={kind} L={L} M={M}: {len(space)} candidates")
    for p in space.candidates:
        print(f"  {describe(p)}")

def cmd_tune(kind: str, dims: int, sizes: List[int], Ms: List[int], *, A: int = 2, B: int = 1,
             budget: Optional[float] = None, placement: Optional[str] = None, show: bool = False,
             exhaustive: bool = False, log: Optional[EventLog] = None) -> int:
    max_candidates = None if exhaustive else 64
    for L, M in zip(sizes, Ms):
        if dims == 1:
            if show:
                show_space(L, M, kind, exhaustive=exhaustive)
            result: TuneResult = tune_1d(L, M, kind, A, B, budget, placement=placement,
                                         max_candidates=max_candidates, on_record=_print_record if show else None)
            print(f"Tuned {describe(result.params)} median={result.median_ns / 1e3:.1f} us "
                  f"cached={'true' if result.cached else 'false'}")
            if result.budget_exhausted:
                print("  WARNING: tuning budget exhausted, returning the best candidate measured so far")
            if log is not None:
                log.event("tune", dims=1, L=L, M=M, kind=kind, cached=result.cached,
                          budget_exhausted=result.budget_exhausted,
                          chosen={"m": result.params.m, "D": result.params.D, "inplace": result.params.inplace},
                          median_ns=result.median_ns, candidates=[r.to_event() for r in result.records])
            continue

        plan = tune_nd([AxisSpec(L=L, M=M)] * dims, kind, A, B, budget, placement=placement,
                       max_candidates=max_candidates)
        for axis, (params, result) in enumerate(zip(plan.per_axis_params(), plan.tune_results)):
            print(f"Tuned axis {axis}: {describe(params)} cached={'true' if result.cached else 'false'}")
        if plan.budget_exhausted:
            print("  WARNING: tuning budget exhausted, returning the best candidates measured so far")
        if log is not None:
            log.event("tune", dims=dims, L=L, M=M, kind=kind, budget_exhausted=plan.budget_exhausted,
                      axes=[{"m": p.m, "D": p.D, "inplace": p.inplace} for p in plan.per_axis_params()])
    return 0
