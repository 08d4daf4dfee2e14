"""
DFT engine used by every padded-FFT kernel.

Sign convention: the forward transform is F_k = sum_j exp(+2 pi i jk/N) f_j and the
backward transform uses exp(-2 pi i jk/N). Neither direction is normalized; the
single 1/(qm) factor is applied by the convolution drivers.

The engine is pluggable (`set_fftlib`): "scipy" (default), "numpy", or "naive",
the O(N^2) reference used as the oracle everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np
import scipy.fft

from utils.envs import get_envs

FORWARD = 1
BACKWARD = -1

REALNESS = ("c2c", "c2r", "r2c")
PLACEMENTS = ("in-place", "out-of-place")

# ----------------------------
# Naive reference
# ----------------------------

def _dft_matrix(N: int, sign: int) -> np.ndarray:
    k = np.arange(N)
    # Reduce kj mod N before exponentiating to keep the phases exact.
    phase = np.mod(np.outer(k, k), N)
    return np.exp(sign * 2j * np.pi * phase / N)

def naive_dft(x, sign: int = FORWARD, axis: int = 0) -> np.ndarray:
    """Literal O(N^2) evaluation of sum_j zeta_N^{sign*kj} x_j along `axis`."""
    if sign not in (FORWARD, BACKWARD):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    x = np.asarray(x, dtype=complex)
    N = x.shape[axis]
    if N < 1:
        raise ValueError("naive_dft needs at least one sample")
    moved = np.moveaxis(x, axis, 0)
    out = np.tensordot(_dft_matrix(N, sign), moved, axes=(1, 0))
    return np.moveaxis(out, 0, axis)

def _hermitian_extension(w: np.ndarray, n: int, axis: int) -> np.ndarray:
    w = np.moveaxis(np.asarray(w, dtype=complex), axis, 0)
    full = np.zeros((n,) + w.shape[1:], dtype=complex)
    e = n // 2 + 1
    full[:e] = w[:e]
    s = np.arange(e, n)
    full[s] = np.conj(w[n - s])
    return full

# ----------------------------
# Backends
# ----------------------------

@dataclass(frozen=True)
class _Backend:
    name: str
    forward: Callable[..., np.ndarray]
    backward: Callable[..., np.ndarray]
    c2r: Callable[..., np.ndarray]
    r2c: Callable[..., np.ndarray]

def _scipy_backend() -> _Backend:
    return _Backend(
        name="scipy",
        forward=lambda x, axis, overwrite: scipy.fft.ifft(x, axis=axis, norm="forward", overwrite_x=overwrite),
        backward=lambda x, axis, overwrite: scipy.fft.fft(x, axis=axis, overwrite_x=overwrite),
        c2r=lambda w, n, axis: scipy.fft.irfft(w, n=n, axis=axis, norm="forward"),
        r2c=lambda x, axis: scipy.fft.rfft(x, axis=axis),
    )

def _numpy_backend() -> _Backend:
    return _Backend(
        name="numpy",
        forward=lambda x, axis, overwrite: np.fft.ifft(x, axis=axis, norm="forward"),
        backward=lambda x, axis, overwrite: np.fft.fft(x, axis=axis),
        c2r=lambda w, n, axis: np.fft.irfft(w, n=n, axis=axis, norm="forward"),
        r2c=lambda x, axis: np.fft.rfft(x, axis=axis),
    )

def _naive_backend() -> _Backend:
    def c2r(w, n, axis):
        full = _hermitian_extension(w, n, axis)
        return np.moveaxis(naive_dft(full, FORWARD, axis=0).real, 0, axis)

    def r2c(x, axis):
        x = np.asarray(x, dtype=float)
        out = naive_dft(x, BACKWARD, axis=axis)
        e = x.shape[axis] // 2 + 1
        return np.take(out, np.arange(e), axis=axis)

    return _Backend(
        name="naive",
        forward=lambda x, axis, overwrite: naive_dft(x, FORWARD, axis=axis),
        backward=lambda x, axis, overwrite: naive_dft(x, BACKWARD, axis=axis),
        c2r=c2r,
        r2c=r2c,
    )

_BACKEND_FACTORIES: Dict[str, Callable[[], _Backend]] = {
    "scipy": _scipy_backend,
    "numpy": _numpy_backend,
    "naive": _naive_backend,
}

_active: Optional[_Backend] = None

def set_fftlib(name: str) -> None:
    global _active
    if name not in _BACKEND_FACTORIES:
        raise ValueError(f"Unknown fftlib '{name}', expected one of {sorted(_BACKEND_FACTORIES)}")
    _active = _BACKEND_FACTORIES[name]()

def get_fftlib() -> str:
    return _backend().name

def _backend() -> _Backend:
    if _active is None:
        set_fftlib(get_envs().fftlib)
    return _active

def forward(x: np.ndarray, axis: int = 0, overwrite: bool = False) -> np.ndarray:
    return _backend().forward(x, axis, overwrite)

def backward(x: np.ndarray, axis: int = 0, overwrite: bool = False) -> np.ndarray:
    return _backend().backward(x, axis, overwrite)

def c2r(w: np.ndarray, n: int, axis: int = 0) -> np.ndarray:
    """Real length-n forward transform of a Hermitian sequence given by its first n//2+1 entries."""
    return _backend().c2r(w, n, axis)

def r2c(x: np.ndarray, axis: int = 0) -> np.ndarray:
    """First n//2+1 entries of the backward transform of real data."""
    return _backend().r2c(x, axis)

# ----------------------------
# Planned executors
# ----------------------------

@dataclass(frozen=True)
class DftRequest:
    size: int
    count: int = 1
    stride: int = 1
    distance: int = 0
    realness: str = "c2c"
    placement: str = "out-of-place"
    sign: int = FORWARD

    @property
    def input_length(self) -> int:
        return self.size // 2 + 1 if self.realness == "c2r" else self.size

    @property
    def output_length(self) -> int:
        return self.size // 2 + 1 if self.realness == "r2c" else self.size

class DftExecutor:
    """Executes a batch of `count` transforms laid out in a flat buffer with the request's stride and distance."""

    def __init__(self, req: DftRequest) -> None:
        self.req = req

    def _view(self, buffer: np.ndarray, length: int) -> np.ndarray:
        req = self.req
        distance = req.distance or length * req.stride
        needed = (req.count - 1) * distance + (length - 1) * req.stride + 1
        if buffer.ndim != 1 or buffer.size < needed:
            raise ValueError(f"buffer of size {buffer.size} cannot hold {req.count} transforms of length {length} "
                             f"(stride {req.stride}, distance {distance})")
        item = buffer.itemsize
        return np.lib.stride_tricks.as_strided(
            buffer, shape=(req.count, length), strides=(distance * item, req.stride * item), writeable=True
        )

    def __call__(self, buffer: np.ndarray, out: Optional[np.ndarray] = None) -> np.ndarray:
        req = self.req
        view = self._view(buffer, req.input_length)
        if req.realness == "c2c":
            fn = forward if req.sign == FORWARD else backward
            result = fn(view, axis=1, overwrite=req.placement == "in-place")
        elif req.realness == "c2r":
            result = c2r(view, req.size, axis=1)
        else:
            if np.iscomplexobj(view) and np.any(view.imag):
                raise ValueError("r2c input has a nonzero imaginary part")
            result = r2c(view.real, axis=1)

        if req.placement == "in-place":
            view[...] = result
            return view
        if out is not None:
            out_view = self._view(out, req.output_length) if out.ndim == 1 else out
            out_view[...] = result
            return out_view
        return result

def plan_dft(req: DftRequest) -> DftExecutor:
    if req.size < 1:
        raise ValueError(f"DFT size must be positive, got {req.size}")
    if req.count < 1 or req.stride < 1 or req.distance < 0:
        raise ValueError(f"invalid batch layout: count={req.count}, stride={req.stride}, distance={req.distance}")
    if req.realness not in REALNESS:
        raise ValueError(f"Unsupported realness '{req.realness}', expected one of {REALNESS}")
    if req.placement not in PLACEMENTS:
        raise ValueError(f"Unsupported placement '{req.placement}', expected one of {PLACEMENTS}")
    if req.realness != "c2c" and req.placement == "in-place":
        raise ValueError(f"{req.realness} transforms are only supported out of place")
    if req.sign not in (FORWARD, BACKWARD):
        raise ValueError(f"sign must be +1 or -1, got {req.sign}")
    if req.realness == "c2r" and req.sign != FORWARD or req.realness == "r2c" and req.sign != BACKWARD:
        raise ValueError(f"{req.realness} transforms have a fixed direction")
    return DftExecutor(req)
