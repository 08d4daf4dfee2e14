from __future__ import annotations

import math
from fractions import Fraction
from typing import List, Optional

DEFAULT_RATIOS = {
    "complex": Fraction(2),
    "centered": Fraction(3, 2),
    "hermitian": Fraction(3, 2),
}

def parse_sizes(text: str) -> List[int]:
    """'n' or an inclusive range 'a..b'."""
    text = text.strip()
    if ".." in text:
        lo_text, hi_text = text.split("..", 1)
        try:
            lo, hi = int(lo_text), int(hi_text)
        except ValueError as e:
            raise ValueError(f"Invalid size range '{text}', expected a..b") from e
        if lo > hi:
            raise ValueError(f"Empty size range '{text}'")
        sizes = list(range(lo, hi + 1))
    else:
        try:
            sizes = [int(text)]
        except ValueError as e:
            raise ValueError(f"Invalid size '{text}', expected an integer or a..b") from e
    if not sizes or min(sizes) < 1:
        raise ValueError(f"Sizes must be positive, got '{text}'")
    return sizes

def parse_ratio(text: str) -> Fraction:
    """Padding ratio M/L as a decimal ('1.5') or a fraction ('3/2')."""
    try:
        ratio = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"Invalid ratio '{text}', expected a decimal or a fraction") from e
    if ratio < 1:
        raise ValueError(f"ratio must be at least 1, got {text}")
    return ratio

def padded_size(L: int, kind: str, *, M: Optional[int] = None, ratio: Optional[Fraction] = None) -> int:
    if M is not None:
        if M < L:
            raise ValueError(f"M must be at least L, got L={L}, M={M}")
        return M
    ratio = DEFAULT_RATIOS[kind] if ratio is None else ratio
    return math.ceil(ratio * L)
