"""
Brute-force references for tests and `bench.verify`.

Nothing here calls the production kernels or the FFT engine: index arithmetic and
DFT sums are written out independently so agreement is actual evidence.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

MAX_DIRECT_WORK = 10 ** 8
MAX_NAIVE_SIZE = 4096
KINDS = ("complex", "centered", "hermitian")

@dataclass(frozen=True)
class OracleReport:
    kind: str
    dims: int
    L: int
    M: int
    m: int
    D: int
    seed: int
    error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.error <= self.tolerance)

    def to_event(self) -> Dict:
        event = asdict(self)
        event["passed"] = self.passed
        return event

def relative_error(actual, expected) -> float:
    """max|actual - expected| / max|expected| (absolute below 1e-300)."""
    actual = np.asarray(actual)
    expected = np.asarray(expected)
    if actual.shape != expected.shape:
        raise ValueError(f"shape mismatch: {actual.shape} vs {expected.shape}")
    if actual.size == 0:
        return 0.0
    diff = float(np.max(np.abs(actual - expected)))
    scale = float(np.max(np.abs(expected)))
    return diff if scale < 1e-300 else diff / scale

# ----------------------------
# Symmetrization
# ----------------------------

def symmetrize_hermitian(f) -> np.ndarray:
    """Full centered array from a stored half along the last axis.

    Outer axes are centered with odd extents; the last axis stores logical 0..H-1 and
    becomes [-(H-1), H-1] with g(-x) = conj(g(x)) over all axes.
    """
    f = np.asarray(f, dtype=complex)
    H = f.shape[-1]
    full = np.zeros(f.shape[:-1] + (2 * H - 1,), dtype=complex)
    full[..., H - 1:] = f
    for j in range(1, H):
        plane = f[..., j]
        # reverse every outer axis: logical x -> -x
        for axis in range(plane.ndim):
            plane = np.flip(plane, axis=axis)
        full[..., H - 1 - j] = np.conj(plane)
    return full

# ----------------------------
# Direct sums
# ----------------------------

def _linear(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Full linear convolution sum_i f_i g_{j-i} over all axes."""
    out = np.zeros(tuple(a + b - 1 for a, b in zip(f.shape, g.shape)), dtype=complex)
    for i in np.ndindex(*f.shape):
        window = tuple(slice(k, k + n) for k, n in zip(i, g.shape))
        out[window] += f[i] * g
    return out

def direct_convolution(inputs: Sequence, kind: str = "complex") -> np.ndarray:
    """Exact nested-sum product convolution of A >= 2 inputs, truncated to the retained window.

    complex:   window [0, L) per axis.
    centered:  stored index i is logical i - L//2; window is the input support.
    hermitian: inputs are stored halves; the result is the stored half of the
               convolution of the symmetrized inputs.
    """
    if kind not in KINDS:
        raise ValueError(f"Unsupported kind '{kind}', expected one of {KINDS}")
    fs = [np.asarray(f, dtype=complex) for f in inputs]
    if len(fs) < 2:
        raise ValueError(f"direct convolution needs at least 2 inputs, got {len(fs)}")
    shape = fs[0].shape
    if any(f.shape != shape for f in fs):
        raise ValueError("direct convolution needs equal-size inputs")
    if kind == "hermitian":
        fs = [symmetrize_hermitian(f) for f in fs]

    full_shape = fs[0].shape
    work = 0
    extent = full_shape
    for _ in fs[1:]:
        work += int(np.prod(extent)) * int(np.prod(full_shape))
        extent = tuple(a + b - 1 for a, b in zip(extent, full_shape))
    if work > MAX_DIRECT_WORK:
        raise ValueError(f"direct convolution needs {work} multiply-adds, limit is {MAX_DIRECT_WORK}")

    h = fs[0]
    for g in fs[1:]:
        h = _linear(h, g)

    A = len(fs)
    if kind == "complex":
        return h[tuple(slice(0, L) for L in shape)]
    if kind == "centered":
        # logical 0 of the A-fold product sits at A * (L//2)
        return h[tuple(slice((A - 1) * (L // 2), (A - 1) * (L // 2) + L) for L in shape)]
    window = [slice((A - 1) * (L // 2), (A - 1) * (L // 2) + L) for L in shape[:-1]]
    H = shape[-1]
    origin = A * (H - 1)
    window.append(slice(origin, origin + H))
    return h[tuple(window)]

# ----------------------------
# Naive padded DFTs
# ----------------------------

def _naive_axis(x: np.ndarray, positions: np.ndarray, k: np.ndarray, N: int, axis: int, sign: int) -> np.ndarray:
    # sum_j exp(sign * 2 pi i k * position_j / N) x_j along `axis`
    phase = np.mod(np.outer(k, positions), N)
    E = np.exp(sign * 2j * np.pi * phase / N)
    moved = np.moveaxis(x, axis, 0)
    return np.moveaxis(np.tensordot(E, moved, axes=(1, 0)), 0, axis)

def _logical_positions(length: int, kind: str) -> np.ndarray:
    if kind == "complex":
        return np.arange(length)
    return np.arange(length) - length // 2

def padded_dft_slice(f, qm: int, indices: Sequence[int], kind: str = "complex") -> np.ndarray:
    """F_k = sum_j zeta_qm^{kj} f_j of the zero-padded input, evaluated only at `indices` (axis 0)."""
    if kind not in KINDS:
        raise ValueError(f"Unsupported kind '{kind}', expected one of {KINDS}")
    if qm > MAX_NAIVE_SIZE:
        raise ValueError(f"naive DFT of size {qm} exceeds the limit {MAX_NAIVE_SIZE}")
    f = np.asarray(f, dtype=complex)
    if f.ndim == 0:
        f = f.reshape(1)
    if kind == "hermitian":
        H = f.shape[0]
        f = np.concatenate([np.conj(f[:0:-1]), f])
        positions = np.arange(-(H - 1), H)
    else:
        positions = _logical_positions(f.shape[0], kind)
    if positions.size and (positions.max() - positions.min()) >= qm:
        raise ValueError(f"input of length {f.shape[0]} does not fit a padded length of {qm}")
    return _naive_axis(f, positions, np.asarray(indices), qm, axis=0, sign=1)

def residue_indices(q: int, m: int, r: int) -> np.ndarray:
    """Spectral indices k = q*l + r for l < m."""
    return q * np.arange(m) + r

def block_indices(q: int, m: int, n: int, v: int, count: int) -> np.ndarray:
    """Spectral indices q*l + u*n + v ordered u-major (index u*m + l), u < count."""
    u = np.arange(count)[:, None]
    return (q * np.arange(m)[None, :] + u * n + v).reshape(-1)

# ----------------------------
# Spectral route
# ----------------------------

def spectral_convolution(inputs: Sequence, sizes: Sequence[int], kind: str = "complex") -> np.ndarray:
    """Product convolution by full naive DFTs of length sizes[i] per axis, then truncation.

    With sizes large enough to avoid aliasing this agrees with `direct_convolution`.
    """
    if kind not in KINDS:
        raise ValueError(f"Unsupported kind '{kind}', expected one of {KINDS}")
    fs = [np.asarray(f, dtype=complex) for f in inputs]
    stored = fs[0].shape
    if kind == "hermitian":
        fs = [symmetrize_hermitian(f) for f in fs]
    shape = fs[0].shape
    if len(sizes) != len(shape):
        raise ValueError(f"expected {len(shape)} sizes, got {len(sizes)}")
    if any(N > MAX_NAIVE_SIZE for N in sizes):
        raise ValueError(f"naive DFT sizes {tuple(sizes)} exceed the limit {MAX_NAIVE_SIZE}")

    axis_kind = "complex" if kind == "complex" else "centered"
    positions = [_logical_positions(L, axis_kind) for L in shape]

    product: Optional[np.ndarray] = None
    for f in fs:
        F = f
        for axis, N in enumerate(sizes):
            F = _naive_axis(F, positions[axis], np.arange(N), N, axis, sign=1)
        product = F if product is None else product * F

    # Inverse evaluated directly at the retained logical positions.
    window: List[np.ndarray] = [_logical_positions(L, axis_kind) for L in stored]
    if kind == "hermitian":
        window[-1] = np.arange(stored[-1])
    h = product
    for axis, N in enumerate(sizes):
        h = _naive_axis(h, np.arange(N), window[axis], N, axis, sign=-1)
    return h / float(np.prod(sizes))

def random_input(rng: np.random.Generator, shape: Tuple[int, ...], kind: str = "complex") -> np.ndarray:
    """Random test data admissible for `kind` (Hermitian data is symmetric on the index-0 plane)."""
    f = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    if kind != "hermitian":
        return f
    P = f[..., 0]
    mirrored = np.conj(P)
    for axis in range(P.ndim):
        mirrored = np.flip(mirrored, axis=axis)
    f[..., 0] = (P + mirrored) / 2
    return f
