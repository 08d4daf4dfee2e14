from __future__ import annotations

import itertools

import numpy as np
import pandas as pd
import pytest

from dealias.conv1d import Conv1dPlan, builtin_mult_product
from dealias.convnd import AxisSpec
from dealias.oracle import direct_convolution, random_input, relative_error
from dealias.plan import derive_params, validate_params
from dealias.tuner import (
    MAX_REPEATS,
    MIN_REPEATS,
    TimingRecord,
    adaptive_repeats,
    build_search_space,
    measure,
    pass_through,
    select_best,
    timing_mult,
    tune_1d,
    tune_nd,
)

class StepTimer:
    """Fake clock advancing a fixed number of nanoseconds per reading."""

    def __init__(self, step: int = 1) -> None:
        self.step = step
        self._ticks = itertools.count(0, step)
        self.calls = 0

    def __call__(self) -> int:
        self.calls += 1
        return next(self._ticks)

def _tie_break_winner(space):
    return min(space.candidates, key=lambda p: (p.m, p.D, p.inplace))

# ----------------------------
# Search space
# ----------------------------

@pytest.mark.parametrize("kind", ["complex", "centered", "hermitian"])
@pytest.mark.parametrize("L, M", [(6, 11), (16, 24), (100, 200), (64, 96)])
def test_candidates_are_valid(kind, L, M):
    space = build_search_space(L, M, kind)
    assert 0 < len(space) <= 64
    for params in space.candidates:
        validate_params(params)
        assert params.qm >= M
        assert params.symmetry == kind
    explicit = [p for p in space.candidates if p.is_explicit]
    assert explicit and all(p.m >= M for p in explicit)

def test_explicit_sizes_come_first():
    space = build_search_space(100, 200)
    assert [(p.m, p.inplace) for p in space.candidates[:4]] == [(200, True), (200, False), (256, True), (256, False)]

def test_exhaustive_space_is_larger():
    pruned = build_search_space(100, 200)
    full = build_search_space(100, 200, max_candidates=None)
    assert len(full) > len(pruned) == 64
    assert {(p.m, p.D, p.inplace) for p in pruned.candidates} <= {(p.m, p.D, p.inplace) for p in full.candidates}

def test_blocking_candidates():
    space = build_search_space(24, 240, max_candidates=None)
    base = derive_params(24, 240, 2)
    assert base.n == 10
    Ds = {p.D for p in space.candidates if p.m == 2}
    assert Ds == {1, 2, 4, base.n}

def test_placement_filter():
    assert all(p.inplace for p in build_search_space(20, 40, placement="in-place").candidates)
    assert not any(p.inplace for p in build_search_space(20, 40, placement="out-of-place").candidates)
    with pytest.raises(ValueError, match="placement"):
        build_search_space(20, 40, placement="sideways")

def test_unpadded_space_is_explicit_only():
    space = build_search_space(11, 11)
    assert {p.m for p in space.candidates} == {11, 12, 16}
    assert all(p.is_explicit and p.p == 1 for p in space.candidates)

def test_explicit_only_space_spans_smooth_sizes_to_power_of_two():
    space = build_search_space(12, 20, explicit_only=True, placement="in-place")
    assert [p.m for p in space.candidates] == [20, 21, 24, 25, 27, 28, 30, 32]
    assert all(p.is_explicit and p.inplace for p in space.candidates)

# ----------------------------
# Timing and selection
# ----------------------------

def _record(m, D, inplace, median):
    return TimingRecord(params=derive_params(12, 24, m).with_blocking(D=D, inplace=inplace),
                        median_ns=median, repeats=5, spread_ns=0)

def test_select_best_prefers_fastest():
    assert select_best([_record(4, 1, True, 30), _record(6, 1, True, 20)]).params.m == 6

def test_select_best_tie_break():
    records = [_record(6, 1, False, 10), _record(4, 2, True, 10), _record(4, 1, True, 10), _record(4, 1, False, 10)]
    best = select_best(records).params
    assert (best.m, best.D, best.inplace) == (4, 1, False)
    with pytest.raises(ValueError):
        select_best([])

def test_measure_uses_warmup_and_median():
    timer = StepTimer(7)
    record = measure(derive_params(8, 16, 4), 2, 1, timing_mult(2, 1), timer=timer, repeats=5)
    assert record.median_ns == 7
    assert record.repeats == 5
    assert record.spread_ns == 0
    assert timer.calls == 10

def test_measure_hermitian_and_batched():
    params = derive_params(7, 11, 2, "hermitian", C=3)
    record = measure(params, 2, 1, timing_mult(2, 1), timer=StepTimer(), batch_shape=(3,))
    assert record.params is params

def test_adaptive_repeats():
    assert adaptive_repeats(10 ** 6, 4, 0) == MIN_REPEATS
    assert adaptive_repeats(10 ** 6, 4, 1000) == MAX_REPEATS
    assert adaptive_repeats(4 * 11 * 1000, 4, 1000) == 10
    assert adaptive_repeats(100, 4, 1000) == MIN_REPEATS
    assert adaptive_repeats(-50, 4, 1000) == MIN_REPEATS

def test_timing_operators(rng):
    x, y = rng.standard_normal(4), rng.standard_normal(4)
    np.testing.assert_array_equal(timing_mult(2, 1)([x, y])[0], x * y)
    outs = timing_mult(2, 3)([x, y])
    assert len(outs) == 3
    np.testing.assert_array_equal(outs[2], x * y)
    np.testing.assert_array_equal(timing_mult(1, 2)([x])[1], x)
    assert [o is x for o in pass_through(2, 3)([x, y])] == [True, False, True]

# ----------------------------
# tune_1d
# ----------------------------

@pytest.mark.parametrize("kind", ["complex", "centered", "hermitian"])
def test_equal_timings_resolve_deterministically(kind):
    L, M = 6, 11
    result = tune_1d(L, M, kind, budget=1.0, timer=StepTimer(), cache_path=False)
    winner = _tie_break_winner(build_search_space(L, M, kind))
    assert result.params == winner
    assert not result.params.inplace
    assert not result.cached and not result.budget_exhausted
    assert len(result.records) == len(build_search_space(L, M, kind))
    again = tune_1d(L, M, kind, budget=1.0, timer=StepTimer(), cache_path=False)
    assert again.params == result.params

def test_unpadded_case_selects_explicit():
    result = tune_1d(8, 8, budget=1.0, timer=StepTimer(), cache_path=False)
    assert (result.params.p, result.params.q, result.params.m) == (1, 1, 8)

def test_real_timing_never_loses_to_explicit(rng):
    result = tune_1d(6, 11, budget=5.0, cache_path=False)
    validate_params(result.params)
    assert result.params.qm >= 11
    explicit = [r.median_ns for r in result.records if r.params.is_explicit]
    assert result.median_ns <= min(explicit)

    plan_params = result.params
    f, g = random_input(rng, (6,)), random_input(rng, (6,))
    (h,) = Conv1dPlan(plan_params).convolve([f.copy(), g.copy()], builtin_mult_product(2))
    assert relative_error(h, direct_convolution([f, g])) < 1e-11

def test_budget_exhaustion_returns_best_so_far(tmp_path):
    cache = tmp_path / "cache.csv"
    result = tune_1d(20, 40, budget=0.01, timer=StepTimer(10 ** 9), cache_path=cache)
    assert result.budget_exhausted
    assert len(result.records) == 1
    assert result.params.is_explicit
    assert not cache.exists()

def test_repeats_follow_the_budget():
    generous = tune_1d(6, 11, budget=1.0, timer=StepTimer(), cache_path=False)
    repeats = [r.repeats for r in generous.records]
    assert repeats[0] == MIN_REPEATS
    assert max(repeats) == MAX_REPEATS

    tight = tune_1d(6, 11, budget=1e-7, timer=StepTimer(), cache_path=False)
    assert {r.repeats for r in tight.records} == {MIN_REPEATS}

def test_explicit_only_tuning_skips_cache(tmp_path):
    cache = tmp_path / "cache.csv"
    result = tune_1d(12, 20, budget=1.0, timer=StepTimer(), cache_path=cache, explicit_only=True)
    assert all(r.params.is_explicit for r in result.records)
    assert len(result.records) == 2 * 8
    assert not result.cached
    assert not cache.exists()

def test_on_record_callback():
    seen = []
    tune_1d(6, 11, budget=1.0, timer=StepTimer(), cache_path=False, on_record=seen.append)
    assert len(seen) == len(build_search_space(6, 11))

def test_rejects_non_positive_budget():
    with pytest.raises(ValueError, match="budget"):
        tune_1d(6, 11, budget=0, cache_path=False)

def test_cache_roundtrip(tmp_path):
    first = tune_1d(6, 11, budget=1.0, timer=StepTimer())
    assert not first.cached
    second = tune_1d(6, 11, budget=1.0, timer=StepTimer())
    assert second.cached
    assert second.params == first.params
    assert second.records == ()

    df = pd.read_csv(tmp_path / "tune_cache.csv")
    assert len(df) == 1
    assert df.loc[0, "placement"] == "any"
    assert (df.loc[0, "m"], df.loc[0, "D"]) == (first.params.m, first.params.D)

def test_cache_key_separates_placements():
    tune_1d(6, 11, budget=1.0, timer=StepTimer())
    constrained = tune_1d(6, 11, budget=1.0, timer=StepTimer(), placement="in-place")
    assert not constrained.cached
    assert constrained.params.inplace

def test_force_retune(monkeypatch):
    tune_1d(6, 11, budget=1.0, timer=StepTimer())
    monkeypatch.setenv("DEALIAS_FORCE_RETUNE", "1")
    assert not tune_1d(6, 11, budget=1.0, timer=StepTimer()).cached

def test_invalid_cache_record_is_retuned(tmp_path, capsys):
    cache = tmp_path / "bad.csv"
    cache.write_text(
        "kind,L,M,A,B,C,S,placement,m,D,inplace,median_ns,created_at\n"
        f"complex,6,11,2,1,1,1,any,4,9,true,5,{int(pd.Timestamp.now().timestamp())}\n"
    )
    result = tune_1d(6, 11, budget=1.0, timer=StepTimer(), cache_path=cache)
    assert not result.cached
    assert "ignoring invalid cached tune record" in capsys.readouterr().out

# ----------------------------
# tune_nd
# ----------------------------

def test_tune_nd_builds_a_correct_plan(rng):
    plan = tune_nd([AxisSpec(L=5, M=10), AxisSpec(L=4, M=8)], budget=2.0, timer=StepTimer(), cache_path=False)
    assert len(plan.tune_results) == 2
    outer, inner = plan.per_axis_params()
    assert outer.C == 4 and inner.C == 1
    assert not plan.budget_exhausted

    f, g = random_input(rng, (5, 4)), random_input(rng, (5, 4))
    (h,) = plan.convolve([f.copy(), g.copy()], builtin_mult_product(2))
    assert relative_error(h, direct_convolution([f, g])) < 1e-11

def test_tune_nd_unpadded_axes_are_explicit():
    plan = tune_nd([(6, 6), (4, 4), (3, 3)], budget=3.0, timer=StepTimer(), cache_path=False)
    for params in plan.per_axis_params():
        assert params.is_explicit and params.p == 1

def test_tune_nd_hermitian(rng):
    plan = tune_nd([AxisSpec(L=5, M=8), AxisSpec(L=5, M=8)], kind="hermitian", budget=2.0, timer=StepTimer(),
                   cache_path=False)
    assert [p.symmetry for p in plan.per_axis_params()] == ["centered", "hermitian"]
    shape = plan.shape
    f, g = random_input(rng, shape, "hermitian"), random_input(rng, shape, "hermitian")
    (h,) = plan.convolve([f.copy(), g.copy()], builtin_mult_product(2))
    assert relative_error(h, direct_convolution([f, g], "hermitian")) < 1e-11

def test_tune_nd_budget_flag():
    plan = tune_nd([(16, 32), (16, 32)], budget=0.01, timer=StepTimer(10 ** 9), cache_path=False)
    assert plan.budget_exhausted
    assert all(r.budget_exhausted for r in plan.tune_results)

def test_tune_nd_dimension_check():
    with pytest.raises(ValueError, match="2 or 3 dimensions"):
        tune_nd([(4, 8)], budget=1.0, cache_path=False)
