"""
Padded/unpadded FFT kernels for uncentered complex data, one residue (or residue block) at a time.

Every kernel transforms along axis 0; trailing axes are independent copies. Inputs
are explicitly padded only up to p*m: indices >= L are treated as zero, so no
buffer of length q*m is ever formed.

Backward kernels take an optional `acc`: the r-term is added into it in place
instead of being returned as a new array.
"""

from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

from dealias import fftprovider
from dealias.plan import PlanParams, twiddles

# ----------------------------
# Shared helpers
# ----------------------------

def col(v: np.ndarray, ndim: int) -> np.ndarray:
    """Reshape a 1D (or 2D) table so it broadcasts against arrays with `ndim` dimensions."""
    return v.reshape(v.shape + (1,) * (ndim - v.ndim))

def as_input(f, params: PlanParams, length: Optional[int] = None) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    if f.ndim == 0:
        f = f.reshape(1)
    expected = params.L if length is None else length
    if f.shape[0] != expected:
        raise ValueError(f"expected {expected} input values along axis 0, got {f.shape[0]}")
    return f

def check_residue(index: int, count: int, label: str = "r") -> None:
    if not 0 <= index < count:
        raise ValueError(f"{label}={index} out of range [0, {count})")

def check_acc(acc: Optional[np.ndarray], shape: Tuple[int, ...]) -> None:
    if acc is not None and acc.shape != shape:
        raise ValueError(f"accumulator has shape {acc.shape}, expected {shape}")

def add_to(term: np.ndarray, acc: Optional[np.ndarray]) -> np.ndarray:
    if acc is None:
        return term
    acc += term
    return acc

def prestage(shape: Tuple[int, ...], params: PlanParams, out: Optional[np.ndarray],
             work: Optional[np.ndarray]) -> Tuple[np.ndarray, bool]:
    """Pick the pre-processing buffer; returns it and whether its padding must be rewritten.

    Out-of-place plans keep a persistent scratch whose explicit zero padding is
    written once at allocation. In-place plans build the pre-stage inside the output
    block, which the FFT then overwrites, so the padding is rewritten per call.
    """
    if work is not None and not params.inplace:
        if work.shape != shape:
            raise ValueError(f"work buffer has shape {work.shape}, expected {shape}")
        return work, False
    if out is not None and params.inplace and out.shape == shape:
        return out, True
    return np.empty(shape, dtype=complex), True

def finish(result: np.ndarray, out: Optional[np.ndarray]) -> np.ndarray:
    if out is None:
        return result
    out[...] = result
    return out

def _check_complex(params: PlanParams, regimes: Tuple[str, ...]) -> None:
    if params.symmetry != "complex":
        raise ValueError(f"complex kernel called with {params.symmetry} parameters")
    if params.regime not in regimes:
        raise ValueError(f"kernel supports regimes {regimes}, parameters are in regime {params.regime}")

def _untwiddle(W: np.ndarray, params: PlanParams, r: int, acc: Optional[np.ndarray]) -> np.ndarray:
    # V_j = zeta_qm^{-rj} W_{j mod m}, j < L <= 2m; W is overwritten.
    L, m = params.L, params.m
    check_acc(acc, (L,) + W.shape[1:])
    if acc is None:
        acc = np.zeros((L,) + W.shape[1:], dtype=complex)
    head = W[:min(L, m)]
    head *= col(twiddles(params.qm, -r * np.arange(head.shape[0])), W.ndim)
    acc[:head.shape[0]] += head
    if L > m:
        # zeta_qm^{-r(m+s)} = zeta_qm^{-rs} zeta_q^{-r}
        tail = W[:L - m]
        tail *= twiddles(params.q, -r)
        acc[m:L] += tail
    return acc

# ----------------------------
# p = 1
# ----------------------------

def forward1(f, params: PlanParams, r: int, *, out: Optional[np.ndarray] = None,
             work: Optional[np.ndarray] = None) -> np.ndarray:
    """Residue r of the length-qm DFT of f zero-padded to qm, i.e. {F_{q*l+r}}, l < m."""
    _check_complex(params, ("p1",))
    check_residue(r, params.q)
    f = as_input(f, params)
    L, m = params.L, params.m
    W, rezero = prestage((m,) + f.shape[1:], params, out, work)
    np.multiply(f, col(twiddles(params.qm, r * np.arange(L)), f.ndim), out=W[:L])
    if rezero:
        W[L:] = 0
    return finish(fftprovider.forward(W, axis=0, overwrite=W is out), out)

def backward1(F, params: PlanParams, r: int, *, acc: Optional[np.ndarray] = None) -> np.ndarray:
    """r-term of the inverse padded transform (unnormalized), truncated to L entries."""
    _check_complex(params, ("p1",))
    check_residue(r, params.q)
    F = as_input(F, params, params.m)
    return _untwiddle(fftprovider.backward(F, axis=0), params, r, acc)

# ----------------------------
# p = 2
# ----------------------------

def forward2(f, params: PlanParams, r: int, *, out: Optional[np.ndarray] = None,
             work: Optional[np.ndarray] = None) -> np.ndarray:
    _check_complex(params, ("p1", "p2"))
    check_residue(r, params.q)
    f = as_input(f, params)
    L, m, qm = params.L, params.m, params.qm
    if L > 2 * m:
        raise ValueError(f"forward2 needs L <= 2m, got L={L}, m={m}")
    W, rezero = prestage((m,) + f.shape[1:], params, out, work)
    head = min(L, m)
    W[:head] = f[:head]
    if rezero:
        W[head:] = 0
    if L > m:
        # zeta_qm^{r(m+s)} = zeta_qm^{rs} zeta_q^r
        W[:L - m] += twiddles(params.q, r) * f[m:L]
    W *= col(twiddles(qm, r * np.arange(m)), W.ndim)
    return finish(fftprovider.forward(W, axis=0, overwrite=W is out), out)

def backward2(F, params: PlanParams, r: int, *, acc: Optional[np.ndarray] = None) -> np.ndarray:
    _check_complex(params, ("p1", "p2"))
    check_residue(r, params.q)
    if params.L > 2 * params.m:
        raise ValueError(f"backward2 needs L <= 2m, got L={params.L}, m={params.m}")
    F = as_input(F, params, params.m)
    return _untwiddle(fftprovider.backward(F, axis=0), params, r, acc)

# ----------------------------
# p > 2: inner loop
# ----------------------------

def _inner_prestage(f: np.ndarray, params: PlanParams, v: int, out, work) -> np.ndarray:
    L, m, p = params.L, params.m, params.p
    W, rezero = prestage((p * m,) + f.shape[1:], params, out, work)
    t = np.arange(L) // m
    np.multiply(f, col(twiddles(params.q, v * t), f.ndim), out=W[:L])
    if rezero:
        W[L:] = 0
    return W

def outer_stage(X: np.ndarray, params: PlanParams, residues: np.ndarray) -> np.ndarray:
    # X has shape (p, m, ...) indexed by (u, s); residues[u] = u*n + v. X is overwritten.
    s = np.arange(params.m)
    X *= col(twiddles(params.qm, np.outer(residues, s)), X.ndim)
    return fftprovider.forward(X, axis=1, overwrite=True)

def forwardInner(f, params: PlanParams, v: int, *, out: Optional[np.ndarray] = None,
                 work: Optional[np.ndarray] = None) -> np.ndarray:
    """Residue block v: F_{q*l + u*n + v} stored at index u*m + l, for u < p, l < m."""
    _check_complex(params, ("inner",))
    check_residue(v, params.n, "v")
    f = as_input(f, params)
    p, m, n = params.p, params.m, params.n
    batch = f.shape[1:]
    W = _inner_prestage(f, params, v, out, work)
    X = fftprovider.forward(W.reshape((p, m) + batch), axis=0)
    Y = outer_stage(X, params, np.arange(p) * n + v)
    return finish(Y.reshape((p * m,) + batch), out)

def backwardInner(F, params: PlanParams, v: int, *, acc: Optional[np.ndarray] = None) -> np.ndarray:
    _check_complex(params, ("inner",))
    check_residue(v, params.n, "v")
    p, m, n, L = params.p, params.m, params.n, params.L
    F = as_input(F, params, p * m)
    batch = F.shape[1:]
    check_acc(acc, (L,) + batch)
    X = fftprovider.backward(F.reshape((p, m) + batch), axis=1)
    u = np.arange(p)
    X *= col(twiddles(params.qm, -np.outer(u * n + v, np.arange(m))), X.ndim)
    T = fftprovider.backward(X, axis=0, overwrite=True).reshape((p * m,) + batch)[:L]
    T *= col(twiddles(params.q, -v * (np.arange(L) // m)), T.ndim)
    return add_to(T, acc)

def forward_conjugate_pair(f, params: PlanParams, v: int) -> Tuple[np.ndarray, np.ndarray]:
    """Residue blocks v and n-v from one real/imaginary split of f."""
    _check_complex(params, ("inner",))
    n, p, m, L = params.n, params.p, params.m, params.L
    check_residue(v, n, "v")
    if v == 0 or 2 * v == n:
        raise ValueError(f"v={v} is paired with itself (n={n}); use forwardInner")
    f = as_input(f, params)
    batch = f.shape[1:]
    zeta = col(twiddles(params.q, v * (np.arange(L) // m)), f.ndim)
    a = zeta * f.real
    b = 1j * zeta * f.imag
    pair = np.zeros((2, p * m) + batch, dtype=complex)
    pair[0, :L] = a + b
    # conj(a) - conj(b) = zeta_q^{-vt} f
    pair[1, :L] = np.conj(a) - np.conj(b)
    X = fftprovider.forward(pair.reshape((2, p, m) + batch), axis=1, overwrite=True)
    u = np.arange(p)
    first = outer_stage(X[0], params, u * n + v)
    # Block n-v at index u needs the p-point DFT of zeta_q^{-vt} f at index u+1.
    second = outer_stage(np.roll(X[1], -1, axis=0), params, u * n + (n - v))
    shape = (p * m,) + batch
    return first.reshape(shape), second.reshape(shape)
