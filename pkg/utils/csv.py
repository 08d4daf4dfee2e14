from __future__ import annotations

import io
import time
from pathlib import Path
from typing import Dict, Iterable, List, Sequence

import pandas as pd

from utils.cache import CACHE_TTL_SECONDS, locked

BENCH_COLUMNS = ["mode", "dims", "L", "M", "strategy", "threads", "median_ns", "normalized_ns"]
BENCH_STRATEGIES = ("explicit-ip", "explicit-op", "explicit-pow2", "hybrid")

TUNE_KEY_COLUMNS = ["kind", "L", "M", "A", "B", "C", "S", "placement"]
TUNE_COLUMNS = TUNE_KEY_COLUMNS + ["m", "D", "inplace", "median_ns", "created_at"]
_TUNE_INT_COLUMNS = ["L", "M", "A", "B", "C", "S", "m", "D", "median_ns"]

# ----------------------------
# Bench rows
# ----------------------------

def bench_rows_to_csv(rows: Iterable[Dict], *, header: bool = True) -> str:
    df = pd.DataFrame(list(rows), columns=BENCH_COLUMNS)
    return df.to_csv(index=False, header=header, float_format="%.6g", lineterminator="\n")

def validate_bench_frame(df: pd.DataFrame) -> pd.DataFrame:
    missing_columns = set(BENCH_COLUMNS) - set(df.columns)
    if missing_columns:
        raise ValueError(f"bench CSV is missing required columns: {sorted(missing_columns)}. Found columns: {list(df.columns)}")

    for column in ("dims", "L", "M", "threads", "median_ns"):
        df[column] = pd.to_numeric(df[column], errors="coerce")
        if df[column].isna().any():
            bad = df[df[column].isna()]
            raise ValueError(f"Found invalid {column} values in bench CSV: {bad}")
        df[column] = df[column].astype("int64")

    df["normalized_ns"] = pd.to_numeric(df["normalized_ns"], errors="coerce")
    if df["normalized_ns"].isna().any():
        bad = df[df["normalized_ns"].isna()]
        raise ValueError(f"Found invalid normalized_ns values in bench CSV: {bad}")

    bad_strategy = ~df["strategy"].isin(BENCH_STRATEGIES)
    if bad_strategy.any():
        raise ValueError(f"Found unknown strategies in bench CSV: {df[bad_strategy]}")
    return df[BENCH_COLUMNS]

def parse_bench_csv(text: str) -> pd.DataFrame:
    return validate_bench_frame(pd.read_csv(io.StringIO(text)))

# ----------------------------
# Tune cache
# ----------------------------

def _empty_tune_frame() -> pd.DataFrame:
    return pd.DataFrame(columns=TUNE_COLUMNS)

def load_tune_cache(path: Path, *, now: float | None = None) -> pd.DataFrame:
    """Fresh, well-formed cache records; malformed or expired rows are dropped."""
    if not path.exists():
        return _empty_tune_frame()
    with locked(path, exclusive=False):
        try:
            df = pd.read_csv(path, dtype={"kind": str, "placement": str})
        except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
            print(f"  WARNING: ignoring unreadable tune cache {path}: {e}")
            return _empty_tune_frame()

    missing_columns = set(TUNE_COLUMNS) - set(df.columns)
    if missing_columns:
        print(f"  WARNING: tune cache {path} is missing columns {sorted(missing_columns)}, ignoring it")
        return _empty_tune_frame()

    for column in _TUNE_INT_COLUMNS + ["created_at"]:
        df[column] = pd.to_numeric(df[column], errors="coerce")
    df["inplace"] = df["inplace"].astype(str).str.strip().str.lower().map({"true": True, "false": False, "1": True, "0": False})
    df = df.dropna(subset=_TUNE_INT_COLUMNS + ["created_at", "inplace"])

    now = time.time() if now is None else now
    df = df[now - df["created_at"] < CACHE_TTL_SECONDS]
    df = df.astype({c: "int64" for c in _TUNE_INT_COLUMNS})
    return df[TUNE_COLUMNS].reset_index(drop=True)

def find_tune_record(df: pd.DataFrame, key: Dict) -> Dict | None:
    if df.empty:
        return None
    mask = pd.Series(True, index=df.index)
    for column in TUNE_KEY_COLUMNS:
        mask &= df[column].astype(str) == str(key[column])
    hits = df[mask]
    if hits.empty:
        return None
    # latest record wins
    return hits.sort_values("created_at").iloc[-1].to_dict()

def append_tune_records(path: Path, records: Sequence[Dict]) -> None:
    if not records:
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    rows: List[Dict] = [{**r, "created_at": r.get("created_at", int(time.time()))} for r in records]
    df = pd.DataFrame(rows, columns=TUNE_COLUMNS)
    with locked(path, exclusive=True):
        write_header = not path.exists() or path.stat().st_size == 0
        df.to_csv(path, mode="a", index=False, header=write_header, lineterminator="\n")
