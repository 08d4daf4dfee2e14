from __future__ import annotations

import numpy as np
import pytest

from bench import bench as bench_module
from bench.bench import bench_rows, explicit_plan, hybrid_plan, normalized, optimal_explicit_plan, time_plan
from bench.verify import cases_1d, cases_nd, check_1d, fft_sizes, spot_check, summarize
from dealias.conv1d import Conv1dPlan
from dealias.convnd import AxisSpec, ConvPlanND
from dealias.plan import derive_params, is_smooth, next_pow2, validate_params

def test_fft_sizes_cover_regimes():
    assert fft_sizes(6, 11) == [1, 2, 3, 5, 6, 11]
    assert fft_sizes(1, 2) == [1, 2]
    assert fft_sizes(4, 8, exhaustive=True) == list(range(1, 9))

@pytest.mark.parametrize("kind", ["complex", "centered", "hermitian"])
def test_cases_are_valid(kind):
    cases = list(cases_1d(kind, 8))
    assert cases
    for params in cases:
        validate_params(params)
    assert {p.D for p in cases} >= {1, 2}
    assert {p.inplace for p in cases} == {True, False}

def test_nd_cases_skip_even_hermitian_sizes():
    sizes = {axes[0].L for axes in cases_nd("hermitian", 2, 6)}
    assert sizes == {1, 3, 5}

def test_summarize_keeps_worst():
    reports = [check_1d(derive_params(L, 2 * L, 2), seed=0) for L in (3, 5, 8)]
    worst = summarize(reports)
    assert list(worst) == [("complex", 1)]
    assert worst[("complex", 1)].error == max(r.error for r in reports)

@pytest.mark.parametrize("build, kind", [
    (lambda: Conv1dPlan(derive_params(1000, 2000, 96)), "complex"),
    (lambda: Conv1dPlan(derive_params(999, 1500, 40, "centered")), "centered"),
    (lambda: Conv1dPlan(derive_params(999, 1500, 40, "hermitian")), "hermitian"),
    (lambda: ConvPlanND([AxisSpec(L=48, M=96, m=12), AxisSpec(L=48, M=96, m=16)]), "complex"),
    (lambda: ConvPlanND([AxisSpec(L=33, M=50, m=6), AxisSpec(L=33, M=50, m=9)], kind="hermitian"), "hermitian"),
    (lambda: ConvPlanND([AxisSpec(L=3, M=6)] * 3), "complex"),
])
def test_spot_check_passes_on_correct_plans(build, kind):
    report = spot_check(build(), kind, seed=5)
    assert report.passed, report

def test_spot_check_catches_wrong_results(monkeypatch):
    plan = Conv1dPlan(derive_params(64, 128, 8))
    monkeypatch.setattr(plan, "convolve", lambda inputs, mult, out=None: [np.zeros_like(inputs[0])])
    assert not spot_check(plan, "complex", seed=0).passed

def test_normalized():
    assert normalized(2400, 8, 1) == pytest.approx(100.0)
    assert normalized(2400, 4, 2) == pytest.approx(2400 / 64)
    assert normalized(50, 1, 1) == 50

def test_time_plan_with_fake_timer():
    ticks = iter(range(0, 10 ** 6, 3))
    plan = explicit_plan("complex", 1, 8, 16, 16, True)
    assert time_plan(plan, "complex", timer=lambda: next(ticks)) == 3

def test_hybrid_plan_is_tuned():
    plan = hybrid_plan("complex", 2, 6, 12, budget=20.0)
    assert isinstance(plan, ConvPlanND)
    assert len(plan.tune_results) == 2

def test_allocation_failure_skips_row(monkeypatch, capsys):
    def fail(*args, **kwargs):
        raise MemoryError("no room")

    monkeypatch.setattr(bench_module, "explicit_plan", fail)
    monkeypatch.setattr(bench_module, "optimal_explicit_plan", fail)
    rows = bench_rows("complex", 1, 8, 16, budget=20.0)
    assert [r["strategy"] for r in rows] == ["hybrid"]
    assert capsys.readouterr().err.count("allocation failed") == 3

@pytest.mark.slow
def test_hybrid_is_competitive_with_explicit():
    L, M = 2048, 4096
    hybrid = hybrid_plan("complex", 1, L, M, budget=30.0)
    explicit = explicit_plan("complex", 1, L, M, M, True)
    assert time_plan(hybrid, "complex", repeats=9) <= 2 * time_plan(explicit, "complex", repeats=9)

@pytest.mark.parametrize("inplace", [True, False])
def test_optimal_explicit_plan_times_explicit_sizes(inplace):
    plan = optimal_explicit_plan("complex", 1, 12, 20, inplace, budget=20.0)
    params = plan.params
    assert params.q == params.n == 1
    assert 20 <= params.m <= next_pow2(20) and is_smooth(params.m)
    assert params.inplace is inplace

def test_optimal_explicit_plan_nd():
    plan = optimal_explicit_plan("centered", 2, 5, 8, False, budget=20.0)
    assert isinstance(plan, ConvPlanND)
    for axis in plan.axes:
        assert axis.m >= 8 and not axis.inplace
    assert spot_check(plan, "centered", seed=2).passed

def _medians(rows):
    return {r["strategy"]: r["median_ns"] for r in rows}

@pytest.mark.slow
def test_hybrid_beats_power_of_two_explicit_in_3d():
    medians = _medians(bench_rows("complex", 3, 80, 160, budget=60.0))
    assert medians["hybrid"] <= medians["explicit-pow2"]

@pytest.mark.slow
def test_hybrid_close_to_best_explicit_in_3d():
    medians = _medians(bench_rows("complex", 3, 64, 128, budget=60.0))
    best_explicit = min(v for k, v in medians.items() if k != "hybrid")
    assert medians["hybrid"] <= 1.15 * best_explicit
