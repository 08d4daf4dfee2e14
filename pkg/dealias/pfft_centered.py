"""
Padded FFT kernels for data centered about the origin.

Storage convention: stored index i holds logical index i - H with H = floor(L/2), so the
logical support is [-H, L-H-1]. The transform is F_k = sum_j zeta_qm^{kj} f_j over logical j,
with the shift built into the pre-processing rather than applied to the output.
"""

from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

from dealias import fftprovider
from dealias.pfft_complex import add_to, as_input, check_acc, check_residue, col, finish, outer_stage
from dealias.plan import PlanParams, twiddles

def origin(L: int) -> int:
    return L // 2

def _check_centered(params: PlanParams, regimes: Tuple[str, ...]) -> None:
    if params.symmetry != "centered":
        raise ValueError(f"centered kernel called with {params.symmetry} parameters")
    if params.regime not in regimes:
        raise ValueError(f"kernel supports regimes {regimes}, parameters are in regime {params.regime}")

def logical_buffer(f: np.ndarray, params: PlanParams, work: Optional[np.ndarray] = None) -> np.ndarray:
    """Explicitly pad f to the pm-point centered buffer; index j + pm/2 holds logical j.

    A persistent out-of-place work buffer keeps its zero padding from allocation.
    """
    half = params.p_hat * params.m
    shape = (2 * half,) + f.shape[1:]
    start = half - origin(params.L)
    if work is not None and not params.inplace:
        if work.shape != shape:
            raise ValueError(f"work buffer has shape {work.shape}, expected {shape}")
        buf = work
    else:
        buf = np.zeros(shape, dtype=complex)
    buf[start:start + params.L] = f
    return buf

def split_halves(buf: np.ndarray, params: PlanParams) -> Tuple[np.ndarray, np.ndarray]:
    """(negative, non-negative) halves reshaped to (p/2, m, ...), indexed by (t, s)."""
    half = params.p_hat * params.m
    shape = (params.p_hat, params.m) + buf.shape[1:]
    return buf[:half].reshape(shape), buf[half:].reshape(shape)

def scatter_logical(pos: np.ndarray, neg: np.ndarray, params: PlanParams) -> np.ndarray:
    """Gather stored outputs from per-(t, s) values on both sides of the origin."""
    half = params.p_hat * params.m
    batch = pos.shape[2:]
    logical = np.concatenate([neg.reshape((half,) + batch), pos.reshape((half,) + batch)])
    start = half - origin(params.L)
    return logical[start:start + params.L]

# ----------------------------
# p = 2
# ----------------------------

def forward2C(f, params: PlanParams, r: int, *, out: Optional[np.ndarray] = None,
              work: Optional[np.ndarray] = None) -> np.ndarray:
    """Residue r of the centered length-qm DFT, {F_{q*l+r}}, l < m."""
    _check_centered(params, ("p2",))
    check_residue(r, params.q)
    f = as_input(f, params)
    neg, pos = split_halves(logical_buffer(f, params, work), params)
    m, q = params.m, params.q
    W = pos[0] + twiddles(q, -r) * neg[0]
    W *= col(twiddles(params.qm, r * np.arange(m)), W.ndim)
    return finish(fftprovider.forward(W, axis=0, overwrite=True), out)

def backward2C(F, params: PlanParams, r: int, *, acc: Optional[np.ndarray] = None) -> np.ndarray:
    """r-term of the inverse transform scattered to centered storage (unnormalized)."""
    _check_centered(params, ("p2",))
    check_residue(r, params.q)
    F = as_input(F, params, params.m)
    check_acc(acc, (params.L,) + F.shape[1:])
    W = fftprovider.backward(F, axis=0)
    j = np.arange(params.L) - origin(params.L)
    V = W[np.mod(j, params.m)]
    V *= col(twiddles(params.qm, -r * j), V.ndim)
    return add_to(V, acc)

# ----------------------------
# p > 2: inner loop
# ----------------------------

def centered_weights(neg: np.ndarray, pos: np.ndarray, params: PlanParams, v: int) -> np.ndarray:
    """Pre-stage zeta_q^{vt} (f_{tm+s} + zeta_n^{-v} f_{tm+s-pm/2}), indexed by (t, s)."""
    t = np.arange(params.p_hat)
    shift = twiddles(params.n, -v)
    return col(twiddles(params.q, v * t), pos.ndim) * (pos + shift * neg)

def forwardInnerC(f, params: PlanParams, v: int, *, out: Optional[np.ndarray] = None,
                  work: Optional[np.ndarray] = None) -> np.ndarray:
    """Residue block v: F_{q*l + u*n + v} at index u*m + l, for u < p/2, l < m."""
    _check_centered(params, ("inner",))
    check_residue(v, params.n, "v")
    f = as_input(f, params)
    neg, pos = split_halves(logical_buffer(f, params, work), params)
    P = centered_weights(neg, pos, params, v)
    X = fftprovider.forward(P, axis=0, overwrite=True)
    Y = outer_stage(X, params, np.arange(params.p_hat) * params.n + v)
    return finish(Y.reshape((params.block_len,) + f.shape[1:]), out)

def inverse_prestage(F: np.ndarray, params: PlanParams, v: int) -> np.ndarray:
    """Shared by the centered inner inverse: m-point inverses, twiddles, then p/2-point inverses."""
    ph, m, n = params.p_hat, params.m, params.n
    batch = F.shape[1:]
    X = fftprovider.backward(F.reshape((ph, m) + batch), axis=1)
    u = np.arange(ph)
    X *= col(twiddles(params.qm, -np.outer(u * n + v, np.arange(m))), X.ndim)
    return fftprovider.backward(X, axis=0, overwrite=True)

def backwardInnerC(F, params: PlanParams, v: int, *, acc: Optional[np.ndarray] = None) -> np.ndarray:
    _check_centered(params, ("inner",))
    check_residue(v, params.n, "v")
    F = as_input(F, params, params.block_len)
    check_acc(acc, (params.L,) + F.shape[1:])
    pos = inverse_prestage(F, params, v)
    pos *= col(twiddles(params.q, -v * np.arange(params.p_hat)), pos.ndim)
    neg = twiddles(params.n, v) * pos
    return add_to(scatter_logical(pos, neg, params), acc)
