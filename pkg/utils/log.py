from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

from utils.envs import get_envs

def make_run_id(command: str) -> str:
    now = datetime.now(timezone.utc).strftime("%Y-%m-%d_%H-%M-%SZ")
    return f"{now}__{command}"

def utc_now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds").replace("+00:00", "Z")

def write_jsonl(path: Path, events: List[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("a", encoding="utf-8") as fp:
        for event in events:
            fp.write(json.dumps(event, ensure_ascii=False, default=str) + "\n")

class EventLog:
    """Buffers run events and appends them to `<log_dir>/<command>_<run_id>.jsonl`."""

    def __init__(self, command: str, *, log_dir: Optional[Path] = None, run_id: Optional[str] = None) -> None:
        envs = get_envs()
        self.command = command
        self.run_id = run_id or envs.run_id or make_run_id(command)
        self.path = (log_dir or envs.log_dir) / f"{command}_{self.run_id}.jsonl"
        self._events: List[dict] = []

    def event(self, action: str, **payload: Any) -> None:
        record: Dict[str, Any] = {"ts": utc_now_iso(), "run_id": self.run_id, "action": action}
        record.update(payload)
        self._events.append(record)

    def summary(self, **payload: Any) -> None:
        self.event("summary", **payload)
        self.flush()

    def flush(self) -> None:
        if not self._events:
            return
        write_jsonl(self.path, self._events)
        self._events = []
