from __future__ import annotations

import json
import time
from pathlib import Path

import pytest

from bench.sizes import padded_size, parse_ratio, parse_sizes
from utils.cache import CACHE_TTL_SECONDS, locked
from utils.csv import (
    append_tune_records,
    bench_rows_to_csv,
    find_tune_record,
    load_tune_cache,
    parse_bench_csv,
)
from utils.envs import get_envs
from utils.log import EventLog, make_run_id

KEY = {"kind": "complex", "L": 6, "M": 11, "A": 2, "B": 1, "C": 1, "S": 1, "placement": "any"}

def _record(**overrides):
    return {**KEY, "m": 4, "D": 1, "inplace": True, "median_ns": 1000, **overrides}

# ----------------------------
# Environment
# ----------------------------

def test_env_defaults(monkeypatch, tmp_path):
    monkeypatch.delenv("DEALIAS_TUNE_BUDGET", raising=False)
    monkeypatch.delenv("DEALIAS_FFTLIB", raising=False)
    envs = get_envs()
    assert envs.tune_budget == 2.0
    assert envs.fftlib == "scipy"
    assert envs.force_retune is False
    assert envs.tune_cache == tmp_path / "tune_cache.csv"
    assert envs.run_id is None

def test_env_parsing(monkeypatch):
    monkeypatch.setenv("DEALIAS_FORCE_RETUNE", "yes")
    monkeypatch.setenv("DEALIAS_TUNE_BUDGET", " 0.5 ")
    monkeypatch.setenv("DEALIAS_FFTLIB", "numpy")
    monkeypatch.setenv("RUN_ID", "nightly")
    envs = get_envs()
    assert envs.force_retune is True
    assert envs.tune_budget == 0.5
    assert envs.fftlib == "numpy"
    assert envs.run_id == "nightly"

@pytest.mark.parametrize("name, value", [
    ("DEALIAS_TUNE_BUDGET", "fast"),
    ("DEALIAS_TUNE_BUDGET", "0"),
    ("DEALIAS_FORCE_RETUNE", "maybe"),
    ("DEALIAS_FFTLIB", "fftw"),
])
def test_env_validation(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ValueError):
        get_envs()

def test_required_envs(monkeypatch):
    monkeypatch.delenv("RUN_ID", raising=False)
    with pytest.raises(ValueError, match="Missing required"):
        get_envs(required_envs=["RUN_ID"])

def test_env_logging(monkeypatch, capsys):
    get_envs(log_envs=True)
    assert "DEALIAS_TUNE_BUDGET=" in capsys.readouterr().out

# ----------------------------
# Event log
# ----------------------------

def test_event_log_writes_jsonl(tmp_path):
    log = EventLog("verify", run_id="r1")
    assert log.path == tmp_path / "logs" / "verify_r1.jsonl"
    log.event("start", argv=["--max-L", "3"])
    assert not log.path.exists()
    log.summary(status="ok", path=Path("x"))
    events = [json.loads(line) for line in log.path.read_text().splitlines()]
    assert [e["action"] for e in events] == ["start", "summary"]
    assert all(e["run_id"] == "r1" for e in events)
    assert events[1]["path"] == "x"
    assert events[0]["ts"].endswith("Z")

def test_event_log_appends(tmp_path):
    for status in ("ok", "fail"):
        EventLog("bench", run_id="same").summary(status=status)
    lines = (tmp_path / "logs" / "bench_same.jsonl").read_text().splitlines()
    assert [json.loads(line)["status"] for line in lines] == ["ok", "fail"]

def test_run_id_from_environment(monkeypatch):
    monkeypatch.setenv("RUN_ID", "ci-42")
    assert EventLog("tune").run_id == "ci-42"
    assert make_run_id("tune").endswith("__tune")

# ----------------------------
# Tune cache
# ----------------------------

def test_tune_cache_roundtrip(tmp_path):
    path = tmp_path / "cache.csv"
    assert load_tune_cache(path).empty
    append_tune_records(path, [_record()])
    append_tune_records(path, [_record(m=6, created_at=int(time.time()) + 1)])
    df = load_tune_cache(path)
    assert len(df) == 2
    hit = find_tune_record(df, KEY)
    assert hit["m"] == 6
    assert hit["inplace"]
    assert find_tune_record(df, {**KEY, "L": 7}) is None

def test_tune_cache_expiry(tmp_path):
    path = tmp_path / "cache.csv"
    now = time.time()
    append_tune_records(path, [_record(created_at=int(now - CACHE_TTL_SECONDS - 10)), _record(m=3, created_at=int(now))])
    df = load_tune_cache(path, now=now)
    assert list(df["m"]) == [3]

def test_tune_cache_drops_malformed_rows(tmp_path):
    path = tmp_path / "cache.csv"
    append_tune_records(path, [_record()])
    now = int(time.time())
    with path.open("a") as fp:
        fp.write(f"complex,6,11,2,1,1,1,any,four,1,true,1000,{now}\n")
        fp.write(f"complex,6,11,2,1,1,1,any,4,1,perhaps,1000,{now}\n")
    assert len(load_tune_cache(path)) == 1

def test_tune_cache_ignores_foreign_files(tmp_path, capsys):
    path = tmp_path / "cache.csv"
    path.write_text("a,b\n1,2\n")
    assert load_tune_cache(path).empty
    assert "missing columns" in capsys.readouterr().out

def test_locked_creates_sidecar(tmp_path):
    path = tmp_path / "sub" / "cache.csv"
    with locked(path, exclusive=True):
        pass
    assert (tmp_path / "sub" / "cache.csv.lock").exists()

# ----------------------------
# Bench CSV
# ----------------------------

def _row(**overrides):
    return {"mode": "complex", "dims": 1, "L": 8, "M": 16, "strategy": "hybrid", "threads": 1,
            "median_ns": 12345, "normalized_ns": 514.375, **overrides}

def test_bench_csv_roundtrip():
    rows = [_row(), _row(strategy="explicit-pow2", normalized_ns=1.5e-3)]
    df = parse_bench_csv(bench_rows_to_csv(rows))
    assert df.to_dict("records") == rows

def test_bench_csv_without_header():
    text = bench_rows_to_csv([_row()], header=False)
    assert text.count("\n") == 1
    assert not text.startswith("mode")

@pytest.mark.parametrize("text, match", [
    ("mode,dims\ncomplex,1\n", "missing required columns"),
    ("mode,dims,L,M,strategy,threads,median_ns,normalized_ns\ncomplex,1,8,16,fastest,1,10,1.0\n", "unknown strategies"),
    ("mode,dims,L,M,strategy,threads,median_ns,normalized_ns\ncomplex,1,eight,16,hybrid,1,10,1.0\n", "invalid L"),
])
def test_bench_csv_validation(text, match):
    with pytest.raises(ValueError, match=match):
        parse_bench_csv(text)

# ----------------------------
# Sizes
# ----------------------------

def test_parse_sizes():
    assert parse_sizes("12") == [12]
    assert parse_sizes("80..83") == [80, 81, 82, 83]
    for bad in ("5..3", "0", "a..b", "x", "-2..4"):
        with pytest.raises(ValueError):
            parse_sizes(bad)

def test_ratios_and_padding():
    assert parse_ratio("3/2") == parse_ratio("1.5")
    with pytest.raises(ValueError):
        parse_ratio("0.5")
    with pytest.raises(ValueError):
        parse_ratio("two")
    assert padded_size(7, "complex") == 14
    assert padded_size(7, "hermitian") == 11
    assert padded_size(7, "centered", ratio=parse_ratio("2")) == 14
    assert padded_size(7, "complex", M=9) == 9
    with pytest.raises(ValueError):
        padded_size(7, "complex", M=6)
