from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Tuple, Union

import numpy as np

SYMMETRIES = ("complex", "centered", "hermitian")
REGIMES = ("p1", "p2", "inner")

@dataclass(frozen=True)
class TransformKind:
    symmetry: str
    regime: str

    def __post_init__(self) -> None:
        if self.symmetry not in SYMMETRIES:
            raise ValueError(f"Unsupported symmetry '{self.symmetry}', expected one of {SYMMETRIES}")
        if self.regime not in REGIMES:
            raise ValueError(f"Unsupported regime '{self.regime}', expected one of {REGIMES}")
        if self.symmetry != "complex" and self.regime == "p1":
            raise ValueError(f"{self.symmetry} transforms have no p1 regime")

@dataclass(frozen=True)
class PlanParams:
    L: int
    M: int
    m: int
    p: int
    q: int
    n: int
    D: int = 1
    C: int = 1
    S: int = 1
    inplace: bool = True
    symmetry: str = "complex"

    @property
    def kind(self) -> TransformKind:
        return TransformKind(self.symmetry, regime_for(self.symmetry, self.p))

    @property
    def regime(self) -> str:
        return self.kind.regime

    @property
    def qm(self) -> int:
        return self.q * self.m

    @property
    def p_hat(self) -> int:
        # Number of length-m chunks on each side of the origin (centered/Hermitian).
        return self.p // 2 if self.symmetry != "complex" else self.p

    @property
    def block_len(self) -> int:
        """Length of one residue block produced by a forward kernel."""
        if self.symmetry == "complex":
            return self.p * self.m if self.p > 2 else self.m
        return self.p_hat * self.m

    @property
    def is_explicit(self) -> bool:
        return self.q == 1 and self.n == 1

    def with_blocking(self, *, D: int | None = None, C: int | None = None, S: int | None = None,
                      inplace: bool | None = None) -> "PlanParams":
        out = replace(
            self,
            D=self.D if D is None else D,
            C=self.C if C is None else C,
            S=self.S if S is None else S,
            inplace=self.inplace if inplace is None else inplace,
        )
        validate_params(out)
        return out

def regime_for(symmetry: str, p: int) -> str:
    if symmetry == "complex" and p == 1:
        return "p1"
    if p <= 2:
        return "p2"
    return "inner"

def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)

def _symmetry_of(kind: Union[str, TransformKind]) -> str:
    if isinstance(kind, TransformKind):
        return kind.symmetry
    if kind not in SYMMETRIES:
        raise ValueError(f"Unsupported symmetry '{kind}', expected one of {SYMMETRIES}")
    return kind

def derive_params(L: int, M: int, m: int, kind: Union[str, TransformKind] = "complex", *,
                  D: int = 1, C: int = 1, S: int = 1, inplace: bool = True) -> PlanParams:
    """Hybrid-padding parameters for data of length L padded to at least M using size-m FFTs."""
    for name, value in (("L", L), ("M", M), ("m", m)):
        if int(value) != value or value <= 0:
            raise ValueError(f"{name} must be a positive integer, got {value}")
    if M < L:
        raise ValueError(f"M must be at least L, got L={L}, M={M}")

    symmetry = _symmetry_of(kind)
    if symmetry == "complex":
        p = _ceil_div(L, m)
        if p <= 2:
            n = _ceil_div(M, m)
            q = n
        else:
            n = _ceil_div(M, p * m)
            q = n * p
    else:
        p = 2 * _ceil_div(L, 2 * m)
        n = _ceil_div(2 * M, p * m)
        q = n * p // 2

    params = PlanParams(L=L, M=M, m=m, p=p, q=q, n=n, D=D, C=C, S=S, inplace=inplace, symmetry=symmetry)
    validate_params(params)
    return params

def explicit_params(L: int, M: int, m: int | None = None, kind: Union[str, TransformKind] = "complex", *,
                    inplace: bool = True, C: int = 1, S: int = 1) -> PlanParams:
    """Explicit dealiasing: one full-size FFT of length m >= M (q = n = 1)."""
    m = M if m is None else m
    if m < M:
        raise ValueError(f"explicit dealiasing needs m >= M, got m={m}, M={M}")
    return derive_params(L, M, m, kind, D=1, C=C, S=S, inplace=inplace)

def validate_params(params: PlanParams) -> None:
    L, M, m, p, q, n = params.L, params.M, params.m, params.p, params.q, params.n
    if min(L, M, m, p, q, n, params.C, params.S) <= 0:
        raise ValueError(f"all plan parameters must be positive: {params}")
    minimal_step = 1 if params.symmetry == "complex" else 2
    if p * m < L or (p - minimal_step) * m >= L:
        raise ValueError(f"p={p} is not the minimal chunk count for L={L}, m={m}")
    if q * m < M:
        raise ValueError(f"q*m={q * m} does not cover M={M}")
    if params.symmetry == "complex":
        if q < p:
            raise ValueError(f"q={q} must be at least p={p}")
        if p > 2 and q != n * p:
            raise ValueError(f"inner regime requires q = n*p, got q={q}, n={n}, p={p}")
    else:
        if p % 2:
            raise ValueError(f"{params.symmetry} transforms need even p, got p={p}")
        if q != n * p // 2:
            raise ValueError(f"{params.symmetry} transforms require q = n*p/2, got q={q}, n={n}, p={p}")
    if not 1 <= params.D <= n:
        raise ValueError(f"D must lie in [1, n={n}], got D={params.D}")

# ----------------------------
# Roots of unity
# ----------------------------

@dataclass(frozen=True)
class RootTable:
    modulus: int
    entries: np.ndarray

    def powers(self, k) -> np.ndarray:
        return self.entries[np.mod(k, self.modulus)]

@lru_cache(maxsize=256)
def make_root_table(N: int) -> RootTable:
    if N <= 0:
        raise ValueError(f"root table modulus must be positive, got {N}")
    entries = np.exp(2j * np.pi * np.arange(N) / N)
    entries[0] = 1.0
    entries.setflags(write=False)
    return RootTable(modulus=N, entries=entries)

def root(N: int, k: int) -> complex:
    """zeta_N^k = exp(2 pi i k / N), with k reduced modulo N."""
    if N <= 0:
        raise ValueError(f"N must be positive, got {N}")
    return complex(make_root_table(N).entries[k % N])

def twiddles(N: int, k) -> np.ndarray:
    return make_root_table(N).powers(np.asarray(k))

# ----------------------------
# Memory accounting
# ----------------------------

@dataclass(frozen=True)
class MemoryEstimate:
    implicit_words: int
    explicit_words: float

    @property
    def ratio(self) -> float:
        return self.implicit_words / self.explicit_words

def work_memory_words(params: PlanParams, A: int, B: int, d: int, L: int | None = None) -> MemoryEstimate:
    """Implicit work storage (A+B)*p*m*L^(d-1) versus the explicit buffer max(A,B)*(q/p)^d*L^d."""
    if A <= 0 or B <= 0:
        raise ValueError(f"A and B must be positive, got A={A}, B={B}")
    if d not in (1, 2, 3):
        raise ValueError(f"d must be 1, 2 or 3, got {d}")
    L = params.L if L is None else L
    implicit = (A + B) * params.p * params.m * L ** (d - 1)
    explicit = max(A, B) * (params.q / params.p) ** d * L ** d
    return MemoryEstimate(implicit_words=implicit, explicit_words=explicit)

def is_smooth(N: int, radices: Tuple[int, ...] = (2, 3, 5, 7)) -> bool:
    for r in radices:
        while N % r == 0 and N > 1:
            N //= r
    return N == 1

def next_pow2(N: int) -> int:
    return 1 << (N - 1).bit_length()

def next_smooth(N: int, radices: Tuple[int, ...] = (2, 3, 5, 7)) -> int:
    """Smallest N' >= N whose prime factors all lie in `radices`."""
    N = max(int(N), 1)
    while not is_smooth(N, radices):
        N += 1
    return N
