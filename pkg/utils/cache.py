from __future__ import annotations

import fcntl
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator

CACHE_TTL_SECONDS = 60 * 60 * 24 * 30  # 30 days

@contextmanager
def locked(path: Path, *, exclusive: bool) -> Iterator[None]:
    """Advisory lock on a sidecar `.lock` file next to `path`."""
    path.parent.mkdir(parents=True, exist_ok=True)
    lock_path = path.with_suffix(path.suffix + ".lock")
    with lock_path.open("a+") as fp:
        fcntl.flock(fp.fileno(), fcntl.LOCK_EX if exclusive else fcntl.LOCK_SH)
        try:
            yield
        finally:
            fcntl.flock(fp.fileno(), fcntl.LOCK_UN)
