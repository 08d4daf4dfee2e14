from __future__ import annotations

from typing import Tuple

import numpy as np

class Workspace:
    """Allocator for plan-owned work buffers; tracks live and peak sizes in complex words."""

    def __init__(self, name: str = "work") -> None:
        self.name = name
        self.live_words = 0
        self.peak_words = 0
        self._children: list[Workspace] = []

    def zeros(self, shape: Tuple[int, ...], dtype=complex) -> np.ndarray:
        buf = np.zeros(shape, dtype=dtype)
        # Real buffers count as half a complex word per element.
        words = buf.size if np.iscomplexobj(buf) else -(-buf.size // 2)
        self.live_words += words
        self.peak_words = max(self.peak_words, self.live_words)
        return buf

    def child(self, name: str) -> "Workspace":
        ws = Workspace(f"{self.name}/{name}")
        self._children.append(ws)
        return ws

    @property
    def total_peak_words(self) -> int:
        return self.peak_words + sum(c.total_peak_words for c in self._children)

    def __repr__(self) -> str:
        return f"Workspace({self.name!r}, live={self.live_words}, peak={self.total_peak_words})"
