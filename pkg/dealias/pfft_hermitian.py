"""
Padded FFT kernels for Hermitian-symmetric centered data.

Only the non-negative logical indices 0..H-1 are stored, H = ceil(L/2); f_{-j} = conj(f_j)
is implied, so the symmetrized array lives on [-(H-1), H-1]. Its DFT is real, so each
residue contribution is produced by a complex-to-real transform of the first
floor(m/2)+1 pre-processed values.
"""

from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

from dealias import fftprovider
from dealias.pfft_centered import centered_weights, split_halves
from dealias.pfft_complex import add_to, check_acc, check_residue, col, finish
from dealias.plan import PlanParams, twiddles

ORIGIN_RTOL = 1e-10

def stored_length(L: int) -> int:
    return -(-L // 2)

def _check_hermitian(params: PlanParams, regimes: Tuple[str, ...]) -> None:
    if params.symmetry != "hermitian":
        raise ValueError(f"Hermitian kernel called with {params.symmetry} parameters")
    if params.regime not in regimes:
        raise ValueError(f"kernel supports regimes {regimes}, parameters are in regime {params.regime}")

def as_hermitian_input(f, params: PlanParams) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    if f.ndim == 0:
        f = f.reshape(1)
    H = stored_length(params.L)
    if f.shape[0] != H:
        raise ValueError(f"expected {H} stored Hermitian values along axis 0, got {f.shape[0]}")
    check_origin_real(f)
    return f

def check_origin_real(f: np.ndarray, rtol: float = ORIGIN_RTOL) -> None:
    scale = max(float(np.max(np.abs(f))) if f.size else 0.0, 1e-300)
    worst = float(np.max(np.abs(f[0].imag)))
    if worst > rtol * scale:
        raise ValueError(f"Hermitian input has non-real origin value (|Im f_0| = {worst:.3e})")

def symmetrize(f: np.ndarray) -> np.ndarray:
    """Full centered array on [-(H-1), H-1] from the stored half; origin at index H-1."""
    f = np.asarray(f, dtype=complex)
    return np.concatenate([np.conj(f[:0:-1]), f])

def hermitian_buffer(f: np.ndarray, params: PlanParams, work: Optional[np.ndarray] = None) -> np.ndarray:
    """Logical pm-point buffer (index j + pm/2 holds logical j) with the conjugate side filled in."""
    half = params.p_hat * params.m
    shape = (2 * half,) + f.shape[1:]
    H = f.shape[0]
    if work is not None and not params.inplace:
        if work.shape != shape:
            raise ValueError(f"work buffer has shape {work.shape}, expected {shape}")
        buf = work
    else:
        buf = np.zeros(shape, dtype=complex)
    buf[half:half + H] = f
    buf[half - H + 1:half] = np.conj(f[:0:-1])
    return buf

def prestage_weights(f, params: PlanParams, v: int, columns: Optional[int] = None) -> np.ndarray:
    """w_{un+v, s} before the length-m transforms, shape (p/2, columns, ...); all m columns by default."""
    f = as_hermitian_input(f, params)
    neg, pos = split_halves(hermitian_buffer(f, params), params)
    e = params.m if columns is None else columns
    P = centered_weights(neg[:, :e], pos[:, :e], params, v)
    X = fftprovider.forward(P, axis=0, overwrite=True)
    u = np.arange(params.p_hat)
    return X * col(twiddles(params.qm, np.outer(u * params.n + v, np.arange(e))), X.ndim)

def _forward(f, params: PlanParams, v: int, out: Optional[np.ndarray], work: Optional[np.ndarray]) -> np.ndarray:
    f = as_hermitian_input(f, params)
    m = params.m
    e = m // 2 + 1
    neg, pos = split_halves(hermitian_buffer(f, params, work), params)
    P = centered_weights(neg[:, :e], pos[:, :e], params, v)
    X = fftprovider.forward(P, axis=0, overwrite=True)
    u = np.arange(params.p_hat)
    X *= col(twiddles(params.qm, np.outer(u * params.n + v, np.arange(e))), X.ndim)
    V = fftprovider.c2r(X, m, axis=1)
    return finish(V.reshape((params.block_len,) + f.shape[1:]), out)

def _backward(F, params: PlanParams, v: int, acc: Optional[np.ndarray]) -> np.ndarray:
    ph, m, n = params.p_hat, params.m, params.n
    F = np.asarray(F, dtype=float)
    if F.shape[0] != params.block_len:
        raise ValueError(f"expected {params.block_len} real values along axis 0, got {F.shape[0]}")
    batch = F.shape[1:]
    e = m // 2 + 1
    check_acc(acc, (stored_length(params.L),) + batch)
    X = fftprovider.r2c(F.reshape((ph, m) + batch), axis=1)
    u = np.arange(ph)
    X *= col(twiddles(params.qm, -np.outer(u * n + v, np.arange(e))), X.ndim)
    T = fftprovider.backward(X, axis=0, overwrite=True)
    t = np.arange(ph)
    T *= col(twiddles(params.q, -v * t), T.ndim)

    # Each v-term is itself Hermitian, so columns s >= e come from the mirrored negative side.
    j = np.arange(stored_length(params.L))
    tj, sj = j // m, j % m
    direct = sj < e
    term = np.zeros((j.size,) + batch, dtype=complex) if acc is None else acc
    term[direct] += T[tj[direct], sj[direct]]
    mirrored = ~direct
    if mirrored.any():
        tm = ph - 1 - tj[mirrored]
        term[mirrored] += np.conj(twiddles(n, v) * T[tm, m - sj[mirrored]])
    return term

# ----------------------------
# p = 2
# ----------------------------

def forward2H(f, params: PlanParams, r: int, *, out: Optional[np.ndarray] = None,
              work: Optional[np.ndarray] = None) -> np.ndarray:
    """Residue r of the real length-qm DFT of the symmetrized array; m real values."""
    _check_hermitian(params, ("p2",))
    check_residue(r, params.q)
    return _forward(f, params, r, out, work)

def backward2H(F, params: PlanParams, r: int, *, acc: Optional[np.ndarray] = None) -> np.ndarray:
    """r-term of the inverse transform on logical indices 0..H-1 (unnormalized)."""
    _check_hermitian(params, ("p2",))
    check_residue(r, params.q)
    F = np.asarray(F, dtype=float)
    if F.shape[0] != params.m:
        raise ValueError(f"expected {params.m} real values along axis 0, got {F.shape[0]}")
    m, e = params.m, params.m // 2 + 1
    check_acc(acc, (stored_length(params.L),) + F.shape[1:])
    W = fftprovider.r2c(F, axis=0)
    j = np.arange(stored_length(params.L))
    mirrored = j >= e
    Wj = np.empty((j.size,) + F.shape[1:], dtype=complex)
    Wj[~mirrored] = W[j[~mirrored]]
    Wj[mirrored] = np.conj(W[m - j[mirrored]])
    Wj *= col(twiddles(params.qm, -r * j), Wj.ndim)
    return add_to(Wj, acc)

# ----------------------------
# p > 2: inner loop
# ----------------------------

def forwardInnerH(f, params: PlanParams, v: int, *, out: Optional[np.ndarray] = None,
                  work: Optional[np.ndarray] = None) -> np.ndarray:
    _check_hermitian(params, ("inner",))
    check_residue(v, params.n, "v")
    return _forward(f, params, v, out, work)

def backwardInnerH(F, params: PlanParams, v: int, *, acc: Optional[np.ndarray] = None) -> np.ndarray:
    _check_hermitian(params, ("inner",))
    check_residue(v, params.n, "v")
    return _backward(F, params, v, acc)
