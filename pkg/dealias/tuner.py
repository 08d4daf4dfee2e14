"""
Empirical parameter search: time candidate (m, D, placement) choices and keep the fastest.

Every search space contains the explicit-dealiasing candidates (q = n = 1, at the
next smooth size and the next power of two >= M), so the chosen plan is never
slower than explicit padding on the same run. Results are cached on disk keyed by
(kind, L, M, A, B, C, S, placement).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from dealias.conv1d import Conv1dPlan, MultOperator, builtin_mult_product
from dealias.convnd import AxisSpec, ConvPlanND, resolve_axes
from dealias.plan import PlanParams, derive_params, explicit_params, is_smooth, next_pow2, next_smooth
from utils.csv import append_tune_records, find_tune_record, load_tune_cache
from utils.envs import get_envs

MAX_CANDIDATES = 64
MAX_CHUNKS = 64
MIN_REPEATS = 5
MAX_REPEATS = 25
PLACEMENTS = ("in-place", "out-of-place")

Timer = Callable[[], int]

@dataclass(frozen=True)
class SearchSpace:
    L: int
    M: int
    kind: str
    candidates: Tuple[PlanParams, ...]

    def __len__(self) -> int:
        return len(self.candidates)

@dataclass(frozen=True)
class TimingRecord:
    params: PlanParams
    median_ns: int
    repeats: int
    spread_ns: int

    def to_event(self) -> Dict:
        p = self.params
        return {"m": p.m, "p": p.p, "q": p.q, "n": p.n, "D": p.D, "inplace": p.inplace,
                "median_ns": self.median_ns, "repeats": self.repeats, "spread_ns": self.spread_ns}

@dataclass(frozen=True)
class TuneResult:
    params: PlanParams
    median_ns: int
    cached: bool = False
    budget_exhausted: bool = False
    records: Tuple[TimingRecord, ...] = field(default_factory=tuple)

# ----------------------------
# Search space
# ----------------------------

def _placement_flags(placement: Optional[str]) -> Tuple[bool, ...]:
    if placement is None:
        return (True, False)
    if placement not in PLACEMENTS:
        raise ValueError(f"Unsupported placement '{placement}', expected one of {PLACEMENTS}")
    return (placement == "in-place",)

def _cost(params: PlanParams) -> float:
    # transformed points times FFT depth
    return params.q * params.m * math.log2(max(params.m, 2)) + params.p * params.m

def build_search_space(L: int, M: int, kind: str = "complex", *, C: int = 1, S: int = 1,
                       placement: Optional[str] = None, max_candidates: Optional[int] = MAX_CANDIDATES,
                       explicit_only: bool = False) -> SearchSpace:
    """Smooth FFT sizes (radices 2, 3, 5, 7) from ceil(L/64) to M, plus m = L and the explicit sizes.

    `max_candidates=None` keeps the exhaustive list; otherwise the cheapest by a simple
    cost model are kept and the explicit candidates always survive. `explicit_only`
    searches every smooth explicit size from M to the next power of two instead.
    """
    if M < L:
        raise ValueError(f"M must be at least L, got L={L}, M={M}")
    flags = _placement_flags(placement)
    explicit_sizes = sorted({next_smooth(M), next_pow2(M)})
    if explicit_only:
        explicit_sizes = [m for m in range(M, next_pow2(M) + 1) if is_smooth(m)]
    if L == M:
        explicit_sizes = sorted(set(explicit_sizes) | {L})

    explicit: List[PlanParams] = []
    for m in explicit_sizes:
        for inplace in flags:
            explicit.append(explicit_params(L, M, m, kind, inplace=inplace, C=C, S=S))
    if L == M or explicit_only:
        return SearchSpace(L=L, M=M, kind=kind, candidates=tuple(explicit))

    sizes = sorted({m for m in range(max(1, -(-L // MAX_CHUNKS)), M + 1) if is_smooth(m)} | {L})

    hybrid: List[PlanParams] = []
    seen = {(p.m, p.D, p.inplace) for p in explicit}
    for m in sizes:
        base = derive_params(L, M, m, kind, C=C, S=S)
        for D in sorted({d for d in (1, 2, 4, base.n) if d <= base.n}):
            for inplace in flags:
                if (m, D, inplace) in seen:
                    continue
                seen.add((m, D, inplace))
                hybrid.append(base.with_blocking(D=D, inplace=inplace))

    hybrid.sort(key=lambda p: (_cost(p), p.m, p.D, p.inplace))
    if max_candidates is not None:
        hybrid = hybrid[:max(0, max_candidates - len(explicit))]
    return SearchSpace(L=L, M=M, kind=kind, candidates=tuple(explicit + hybrid))

# ----------------------------
# Timing
# ----------------------------

def timing_mult(A: int, B: int) -> MultOperator:
    """Operator used while timing: the product (or the single input) replicated to B outputs."""
    if A >= 2 and B == 1:
        return builtin_mult_product(A)
    product = builtin_mult_product(A) if A >= 2 else None

    def apply(xs):
        y = product(xs)[0] if product is not None else xs[0]
        return [y] * B

    return MultOperator(A=A, B=B, apply=apply)

def pass_through(A: int, B: int) -> MultOperator:
    """Operator that skips multiplication; used to time the transforms of outer axes."""
    return MultOperator(A=A, B=B, apply=lambda xs: [xs[b % A] for b in range(B)])

def measure(params: PlanParams, A: int, B: int, mult: MultOperator, *, timer: Timer = time.perf_counter_ns,
            repeats: int = MIN_REPEATS, batch_shape: Optional[Tuple[int, ...]] = None, seed: int = 0) -> TimingRecord:
    """One warmup, then the median of `repeats` timed convolutions."""
    repeats = max(repeats, MIN_REPEATS)
    plan = Conv1dPlan(params, A, B, batch_shape=batch_shape)
    rng = np.random.default_rng(seed)
    shape = plan.input_shape
    inputs = [rng.standard_normal(shape) + 1j * rng.standard_normal(shape) for _ in range(A)]
    if params.symmetry == "hermitian":
        for f in inputs:
            f[0] = f[0].real
    out = [np.empty(plan.input_shape, dtype=complex) for _ in range(B)]

    plan.convolve(inputs, mult, out=out)
    samples = []
    for _ in range(repeats):
        start = timer()
        plan.convolve(inputs, mult, out=out)
        samples.append(timer() - start)
    samples = np.sort(np.asarray(samples, dtype=np.int64))
    q1, q3 = np.percentile(samples, [25, 75])
    return TimingRecord(params=params, median_ns=int(np.median(samples)), repeats=repeats,
                        spread_ns=int(q3 - q1))

def adaptive_repeats(remaining_ns: int, candidates_left: int, estimate_ns: int) -> int:
    """Timed runs that fit one candidate's share of the remaining budget, within [MIN_REPEATS, MAX_REPEATS].

    `estimate_ns` is the expected time of one convolution; 0 means unknown.
    """
    if estimate_ns <= 0 or candidates_left <= 0:
        return MIN_REPEATS
    # one extra run for the warmup
    fit = remaining_ns // (candidates_left * estimate_ns) - 1
    return int(min(max(fit, MIN_REPEATS), MAX_REPEATS))

def select_best(records: Sequence[TimingRecord]) -> TimingRecord:
    """Fastest median; ties go to smaller m, then smaller D, then out-of-place."""
    if not records:
        raise ValueError("no timing records to select from")
    return min(records, key=lambda r: (r.median_ns, r.params.m, r.params.D, r.params.inplace))

# ----------------------------
# Cache
# ----------------------------

def _cache_key(kind: str, L: int, M: int, A: int, B: int, C: int, S: int, placement: Optional[str]) -> Dict:
    return {"kind": kind, "L": L, "M": M, "A": A, "B": B, "C": C, "S": S, "placement": placement or "any"}

def _from_cache(record: Dict, L: int, M: int, kind: str, C: int, S: int) -> Optional[PlanParams]:
    try:
        return derive_params(L, M, int(record["m"]), kind, D=int(record["D"]), C=C, S=S,
                             inplace=bool(record["inplace"]))
    except ValueError as e:
        print(f"  WARNING: ignoring invalid cached tune record {record}: {e}")
        return None

# ----------------------------
# Main entry points
# ----------------------------

def tune_1d(L: int, M: int, kind: str = "complex", A: int = 2, B: int = 1, budget: Optional[float] = None, *,
            C: int = 1, S: int = 1, placement: Optional[str] = None, mult: Optional[MultOperator] = None,
            timer: Timer = time.perf_counter_ns, cache_path: Optional[Union[Path, bool]] = None,
            max_candidates: Optional[int] = MAX_CANDIDATES, explicit_only: bool = False,
            on_record: Optional[Callable[[TimingRecord], None]] = None) -> TuneResult:
    """Fastest measured (m, D, placement) for a 1D convolution of A inputs into B outputs.

    `budget` is in seconds (default DEALIAS_TUNE_BUDGET). When it runs out the best
    candidate measured so far is returned with `budget_exhausted=True`. The number of
    timed runs per candidate follows the budget left, estimated from the previous
    candidate's median. Pass `cache_path=False` to skip the on-disk cache; `explicit_only`
    searches the explicit candidates and never touches it.
    """
    envs = get_envs()
    budget = envs.tune_budget if budget is None else budget
    if budget <= 0:
        raise ValueError(f"budget must be positive, got {budget}")

    path: Optional[Path] = None
    if cache_path is not False and not explicit_only:
        path = envs.tune_cache if cache_path in (None, True) else Path(cache_path)
    key = _cache_key(kind, L, M, A, B, C, S, placement)
    if path is not None and not envs.force_retune:
        hit = find_tune_record(load_tune_cache(path), key)
        if hit is not None:
            params = _from_cache(hit, L, M, kind, C, S)
            if params is not None:
                return TuneResult(params=params, median_ns=int(hit["median_ns"]), cached=True)

    space = build_search_space(L, M, kind, C=C, S=S, placement=placement, max_candidates=max_candidates,
                               explicit_only=explicit_only)
    mult = timing_mult(A, B) if mult is None else mult
    batch_shape = () if C == 1 else (C,)
    deadline = timer() + int(budget * 1e9)

    records: List[TimingRecord] = []
    exhausted = False
    for i, params in enumerate(space.candidates):
        now = timer()
        if records and now > deadline:
            exhausted = True
            break
        estimate = records[-1].median_ns if records else 0
        repeats = adaptive_repeats(deadline - now, len(space) - i, estimate)
        record = measure(params, A, B, mult, timer=timer, repeats=repeats, batch_shape=batch_shape)
        records.append(record)
        if on_record is not None:
            on_record(record)

    best = select_best(records)
    if path is not None and not exhausted:
        p = best.params
        append_tune_records(path, [{**key, "m": p.m, "D": p.D, "inplace": p.inplace, "median_ns": best.median_ns}])
    return TuneResult(params=best.params, median_ns=best.median_ns, cached=False,
                      budget_exhausted=exhausted, records=tuple(records))

def tune_nd(axes: Sequence[Union[AxisSpec, Tuple[int, int]]], kind: str = "complex", A: int = 2, B: int = 1,
            budget: Optional[float] = None, **kwargs) -> ConvPlanND:
    """Tune each axis independently and build the plan.

    Outer axes are timed with C = product of the inner stored extents and without the
    multiplication; the innermost axis is timed with it. The per-axis results are kept
    in `plan.tune_results`, and `plan.budget_exhausted` flags a best-so-far plan.
    """
    specs = resolve_axes(axes, kind)
    if len(specs) not in (2, 3):
        raise ValueError(f"tune_nd handles 2 or 3 dimensions, got {len(specs)}")
    budget = get_envs().tune_budget if budget is None else budget
    if budget <= 0:
        raise ValueError(f"budget must be positive, got {budget}")
    share = budget / len(specs)

    results: List[TuneResult] = []
    tuned: List[AxisSpec] = []
    for i, spec in enumerate(specs):
        C = int(np.prod([s.stored for s in specs[i + 1:]], dtype=np.int64))
        innermost = i == len(specs) - 1
        mult = None if innermost else pass_through(A, B)
        result = tune_1d(spec.L, spec.M, spec.symmetry, A, B, share, C=C, S=spec.S or 1, mult=mult, **kwargs)
        results.append(result)
        p = result.params
        tuned.append(AxisSpec(L=spec.L, M=spec.M, m=p.m, D=p.D, inplace=p.inplace, S=spec.S))

    plan = ConvPlanND(tuned, A, B, kind=kind)
    plan.tune_results = tuple(results)
    plan.budget_exhausted = any(r.budget_exhausted for r in results)
    return plan
