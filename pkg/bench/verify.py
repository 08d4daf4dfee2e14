"""
Oracle sweeps: hybrid convolutions against brute-force direct sums.

1D complex:  L <= max_L, M in {2L-1, 2L}
1D centered / Hermitian: L <= max_L, M = ceil(3L/2)
2D / 3D: square extents with M = 2L (complex) or ceil(3L/2) (centered, Hermitian;
Hermitian needs odd outer extents, so even L are skipped)
"""

from __future__ import annotations

import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from dealias.conv1d import Conv1dPlan, builtin_mult_product
from dealias.convnd import AxisSpec, ConvPlanND, axis_kinds, default_m
from dealias.oracle import OracleReport, direct_convolution, random_input, relative_error
from dealias.plan import PlanParams, derive_params
from utils.log import EventLog

TOLERANCE = 1e-11
SEEDS_PER_CASE = 3

# ----------------------------
# Case enumeration
# ----------------------------

def padded_sizes(L: int, kind: str) -> Tuple[int, ...]:
    if kind == "complex":
        return (2 * L - 1, 2 * L) if L > 1 else (1, 2)
    return (math.ceil(3 * L / 2),)

def fft_sizes(L: int, M: int, *, exhaustive: bool = False) -> List[int]:
    """FFT sizes covering every regime; all of 1..M when exhaustive."""
    if exhaustive:
        return list(range(1, M + 1))
    picks = {1, 2, 3, max(1, -(-L // 3)), max(1, -(-L // 2)), max(1, L - 1), L, M}
    return sorted(m for m in picks if 1 <= m <= M)

def blockings(params: PlanParams) -> List[PlanParams]:
    variants = [params.with_blocking(D=1, inplace=True)]
    if params.n >= 2:
        variants.append(params.with_blocking(D=2, inplace=False))
    if params.n >= 4:
        variants.append(params.with_blocking(D=params.n, inplace=True))
    return variants

def cases_1d(kind: str, max_L: int, *, exhaustive: bool = False) -> Iterable[PlanParams]:
    for L in range(1, max_L + 1):
        for M in padded_sizes(L, kind):
            for m in fft_sizes(L, M, exhaustive=exhaustive):
                yield from blockings(derive_params(L, M, m, kind))

def cases_nd(kind: str, dims: int, max_L: int) -> Iterable[List[AxisSpec]]:
    for L in range(1, max_L + 1):
        if kind == "hermitian" and L % 2 == 0:
            continue
        M = 2 * L if kind == "complex" else math.ceil(3 * L / 2)
        for third in (False, True):
            axes = []
            for i, sym in enumerate(axis_kinds(kind, dims)):
                m = max(1, -(-L // 3)) if third else default_m(L, sym)
                n = derive_params(L, M, m, sym).n
                # alternate D across axes to cover grouped residues
                axes.append(AxisSpec(L=L, M=M, m=m, D=min(1 if i % 2 else 2, n)))
            yield axes

# ----------------------------
# Checks
# ----------------------------

def check_1d(params: PlanParams, seed: int) -> OracleReport:
    plan = Conv1dPlan(params, 2, 1)
    rng = np.random.default_rng(seed)
    inputs = [random_input(rng, plan.input_shape, params.symmetry) for _ in range(2)]
    expected = direct_convolution(inputs, params.symmetry)
    (actual,) = plan.convolve(inputs, builtin_mult_product(2), out=[np.empty(plan.input_shape, dtype=complex)])
    return OracleReport(kind=params.symmetry, dims=1, L=params.L, M=params.M, m=params.m, D=params.D, seed=seed,
                        error=relative_error(actual, expected), tolerance=TOLERANCE)

def check_nd(axes: Sequence[AxisSpec], kind: str, seed: int) -> OracleReport:
    plan = ConvPlanND(axes, 2, 1, kind=kind)
    rng = np.random.default_rng(seed)
    inputs = [random_input(rng, plan.shape, kind) for _ in range(2)]
    expected = direct_convolution(inputs, kind)
    (actual,) = plan.convolve(inputs, builtin_mult_product(2), out=[np.empty(plan.shape, dtype=complex)])
    return OracleReport(kind=kind, dims=len(axes), L=axes[0].L, M=axes[0].M, m=plan.params.m, D=plan.params.D,
                        seed=seed, error=relative_error(actual, expected), tolerance=TOLERANCE)

# ----------------------------
# Sparse spot check
# ----------------------------

def _support_layout(kind_of_axis: str, L: int, radius: int) -> Tuple[int, np.ndarray, np.ndarray, np.ndarray]:
    """Small extent, logical positions of the small array, data mask, and big stored indices."""
    if kind_of_axis == "complex":
        s = max(1, min(radius + 1, L))
        E = 2 * s - 1
        logical = np.arange(E)
        big = logical
        mask = logical < s
    elif kind_of_axis == "centered":
        h = max(0, min(radius, L // 2, L - L // 2 - 1))
        E = 4 * h + 1
        logical = np.arange(E) - 2 * h
        big = logical + L // 2
        mask = np.abs(logical) <= h
    else:
        H = -(-L // 2)
        h = max(0, min(radius, H - 1))
        E = 2 * h + 1
        logical = np.arange(E)
        big = logical
        mask = logical <= h
    return E, logical, mask, big

def spot_check(plan: Union[Conv1dPlan, ConvPlanND], kind: str, seed: int, radius: int = 2) -> OracleReport:
    """Oracle check on data supported near the origin, so the direct sum stays small at any size."""
    if isinstance(plan, ConvPlanND):
        kinds = tuple(a.symmetry for a in plan.axes)
        logical_L = tuple(a.L for a in plan.axes)
        shape = plan.shape
        params = plan.params
    else:
        kinds = (plan.params.symmetry,)
        logical_L = (plan.params.L,)
        shape = plan.input_shape
        params = plan.params

    layouts = [_support_layout(k, L, radius) for k, L in zip(kinds, logical_L)]
    small_shape = tuple(E for E, _, _, _ in layouts)
    mask = np.ones(small_shape, dtype=bool)
    for axis, (_, _, axis_mask, _) in enumerate(layouts):
        view = [1] * len(layouts)
        view[axis] = axis_mask.size
        mask &= axis_mask.reshape(view)

    rng = np.random.default_rng(seed)
    small = [np.where(mask, random_input(rng, small_shape, kind), 0) for _ in range(2)]
    expected_small = direct_convolution(small, kind)

    keep = [(big >= 0) & (big < extent) for (_, _, _, big), extent in zip(layouts, shape)]
    src = np.ix_(*[np.nonzero(k)[0] for k in keep])
    dst = np.ix_(*[big[k] for (_, _, _, big), k in zip(layouts, keep)])
    inputs = []
    for f in small:
        g = np.zeros(shape, dtype=complex)
        g[dst] = f[src]
        inputs.append(g)
    expected = np.zeros(shape, dtype=complex)
    expected[dst] = expected_small[src]

    (actual,) = plan.convolve(inputs, builtin_mult_product(2), out=[np.empty(shape, dtype=complex)])
    return OracleReport(kind=kind, dims=len(shape), L=params.L, M=params.M, m=params.m, D=params.D, seed=seed,
                        error=relative_error(actual, expected), tolerance=TOLERANCE)

# ----------------------------
# Sweep
# ----------------------------

def run_verify(kind: str, dims: int, max_L: int, *, seed: int = 0, exhaustive: bool = False,
               log: Optional[EventLog] = None) -> List[OracleReport]:
    reports: List[OracleReport] = []
    if dims == 1:
        for params in cases_1d(kind, max_L, exhaustive=exhaustive):
            for s in range(seed, seed + SEEDS_PER_CASE):
                reports.append(check_1d(params, s))
    else:
        for axes in cases_nd(kind, dims, max_L):
            for s in range(seed, seed + SEEDS_PER_CASE):
                reports.append(check_nd(axes, kind, s))
    if log is not None:
        for r in reports:
            if not r.passed:
                log.event("verify_failure", **r.to_event())
    return reports

def summarize(reports: Sequence[OracleReport]) -> Dict[Tuple[str, int], OracleReport]:
    """Worst case per (kind, dims)."""
    worst: Dict[Tuple[str, int], OracleReport] = {}
    for r in reports:
        key = (r.kind, r.dims)
        if key not in worst or r.error > worst[key].error:
            worst[key] = r
    return worst
