"""
Multidimensional dealiased convolutions by recursion over axes.

For each residue group of the outermost axis the A inputs are forward-transformed
along axis 0 (all inner indices are batched copies), every column of the resulting
blocks is convolved by the (d-1)-dimensional plan reusing the same inner buffers,
and the columns are inverse-transformed back into the accumulators. Only the
innermost 1D convolution applies the multiplication operator and the single global
1/prod(qm) normalization.

Hermitian mode: outer axes are centered (odd extents), the innermost axis is Hermitian
and stores ceil(L/2) values.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from dealias.conv1d import Conv1dPlan, MultOperator
from dealias.pfft_hermitian import stored_length
from dealias.plan import SYMMETRIES, PlanParams, derive_params
from dealias.workspace import Workspace

HERMITIAN_PLANE_RTOL = 1e-10

@dataclass(frozen=True)
class AxisSpec:
    """Per-axis sizes: logical extent L, padded length M, FFT size m (None picks a default).

    S is the allocated extent along this axis (S >= stored extent), which sets the
    strides of arrays from `allocate_nd`.
    """

    L: int
    M: int
    m: Optional[int] = None
    D: int = 1
    inplace: bool = True
    S: Optional[int] = None
    symmetry: str = "complex"

    @property
    def stored(self) -> int:
        return stored_length(self.L) if self.symmetry == "hermitian" else self.L

    @property
    def extent(self) -> int:
        return self.stored if self.S is None else self.S

def default_m(L: int, symmetry: str) -> int:
    # p = 1 for complex, p = 2 for centered and Hermitian.
    return L if symmetry == "complex" else -(-L // 2)

def axis_kinds(kind: str, d: int) -> Tuple[str, ...]:
    if kind not in SYMMETRIES:
        raise ValueError(f"Unsupported kind '{kind}', expected one of {SYMMETRIES}")
    if kind == "hermitian":
        return ("centered",) * (d - 1) + ("hermitian",)
    return (kind,) * d

def resolve_axes(axes: Sequence[Union[AxisSpec, Tuple[int, int]]], kind: str) -> Tuple[AxisSpec, ...]:
    specs = [a if isinstance(a, AxisSpec) else AxisSpec(L=a[0], M=a[1]) for a in axes]
    if not 1 <= len(specs) <= 3:
        raise ValueError(f"convolutions support 1 to 3 dimensions, got {len(specs)}")
    resolved = tuple(replace(s, symmetry=sym) for s, sym in zip(specs, axis_kinds(kind, len(specs))))
    for i, s in enumerate(resolved):
        if s.S is not None and s.S < s.stored:
            raise ValueError(f"axis {i}: extent S={s.S} is smaller than the stored extent {s.stored}")
        if kind == "hermitian" and i < len(resolved) - 1 and s.L % 2 == 0:
            raise ValueError(f"axis {i}: Hermitian mode needs odd outer extents, got L={s.L}")
    return resolved

def axis_params(spec: AxisSpec, C: int = 1) -> PlanParams:
    m = default_m(spec.L, spec.symmetry) if spec.m is None else spec.m
    return derive_params(spec.L, spec.M, m, spec.symmetry, D=spec.D, C=C, inplace=spec.inplace)

class ConvPlanND:
    """Recursive plan over 1 to 3 axes; axis 0 is the outermost."""

    def __init__(self, axes: Sequence[Union[AxisSpec, Tuple[int, int]]], A: int = 2, B: int = 1, *,
                 kind: str = "complex", workspace: Optional[Workspace] = None) -> None:
        self.kind = kind
        self.axes = resolve_axes(axes, kind)
        self.A = A
        self.B = B
        self.workspace = workspace if workspace is not None else Workspace("convnd")
        self.shape = tuple(a.stored for a in self.axes)

        inner_shape = self.shape[1:]
        C = int(np.prod(inner_shape, dtype=np.int64))
        self.params = axis_params(self.axes[0], C=C)
        self.outer = Conv1dPlan(self.params, A, B, batch_shape=inner_shape, workspace=self.workspace)
        self.inner: Union["ConvPlanND", Conv1dPlan, None] = None
        if len(self.axes) == 2:
            self.inner = Conv1dPlan(axis_params(self.axes[1]), A, B, workspace=self.workspace.child("axis1"))
        elif len(self.axes) == 3:
            self.inner = ConvPlanND(self.axes[1:], A, B, kind=kind, workspace=self.workspace.child("axes12"))
        self.tune_results: Tuple = ()
        self.budget_exhausted = False

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def normalization(self) -> float:
        """Product of qm over all axes."""
        inner = 1.0 if self.inner is None else (
            self.inner.normalization if isinstance(self.inner, ConvPlanND) else float(self.inner.params.qm))
        return self.params.qm * inner

    def per_axis_params(self) -> Tuple[PlanParams, ...]:
        if self.inner is None:
            return (self.params,)
        if isinstance(self.inner, ConvPlanND):
            return (self.params,) + self.inner.per_axis_params()
        return (self.params, self.inner.params)

    def check_inputs(self, inputs: Sequence) -> List[np.ndarray]:
        if len(inputs) != self.A:
            raise ValueError(f"plan expects {self.A} inputs, got {len(inputs)}")
        out = []
        for i, f in enumerate(inputs):
            f = np.asarray(f, dtype=complex)
            if f.shape != self.shape:
                raise ValueError(f"input {i} has shape {f.shape}, expected {self.shape}")
            check_strides(f)
            if self.kind == "hermitian":
                err = hermitian_plane_error(f)
                if err > HERMITIAN_PLANE_RTOL * max(float(np.max(np.abs(f))), 1e-300):
                    raise ValueError(f"input {i} is not Hermitian on the innermost-index-0 plane (error {err:.3e})")
            out.append(f)
        return out

    def _columns(self, mult: MultOperator, scale: float):
        inner = self.inner

        def apply(blocks: np.ndarray, width: int) -> None:
            # Every column reuses the inner plan's buffers; results land back in the block rows.
            for i in range(width):
                for c in range(blocks.shape[2]):
                    cols = [blocks[a, i, c] for a in range(self.A)]
                    inner.convolve(cols, mult, scale=scale, out=[blocks[b, i, c] for b in range(self.B)])

        return apply

    def convolve(self, inputs: Sequence, mult: MultOperator, *, scale: float = 1.0,
                 out: Optional[Sequence[np.ndarray]] = None) -> List[np.ndarray]:
        if mult.A != self.A or mult.B != self.B:
            raise ValueError(f"operator arity {mult.A}->{mult.B} does not match plan {self.A}->{self.B}")
        fs = self.check_inputs(inputs)
        if self.inner is None:
            return self.outer.convolve(fs, mult, scale=scale, out=out)
        acc = self.outer.accumulate(fs, self._columns(mult, scale / self.params.qm))
        return self.outer.deliver(acc, inputs, out)

def convolve_nd(inputs: Sequence, mult: MultOperator, plan: ConvPlanND, *, overwrite: bool = True) -> List[np.ndarray]:
    if plan.ndim not in (2, 3):
        raise ValueError(f"convolve_nd handles 2 or 3 dimensions, plan has {plan.ndim}")
    if len(inputs) != mult.A:
        raise ValueError(f"operator expects {mult.A} inputs, got {len(inputs)}")
    if not overwrite:
        inputs = [np.array(f, dtype=complex) for f in inputs]
    return plan.convolve(inputs, mult)

# ----------------------------
# Layout helpers
# ----------------------------

def allocate_nd(plan: ConvPlanND, count: Optional[int] = None) -> List[np.ndarray]:
    """Zeroed arrays of the plan's stored shape, carved from buffers of the per-axis extents S."""
    count = plan.A if count is None else count
    full = tuple(a.extent for a in plan.axes)
    window = tuple(slice(0, a.stored) for a in plan.axes)
    return [np.zeros(full, dtype=complex)[window] for _ in range(count)]

def check_strides(f: np.ndarray) -> None:
    """Reject layouts whose outer strides overlap the inner extents."""
    if f.ndim == 0:
        return
    if f.strides[-1] < f.itemsize:
        raise ValueError(f"innermost stride {f.strides[-1]} is smaller than the element size {f.itemsize}")
    for i in range(f.ndim - 1):
        if f.strides[i] < f.shape[i + 1] * f.strides[i + 1]:
            raise ValueError(f"stride {f.strides[i]} on axis {i} overlaps the extent of axis {i + 1}")

def _mirror(P: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """conj(P) at mirrored outer indices i -> 2*(L//2) - i, plus a mask of entries whose mirror exists."""
    mirror = np.conj(P)
    valid = np.ones(P.shape, dtype=bool)
    for axis, L in enumerate(P.shape):
        idx = 2 * (L // 2) - np.arange(L)
        ok = idx < L
        mirror = np.take(mirror, np.minimum(idx, L - 1), axis=axis)
        shape = [1] * P.ndim
        shape[axis] = L
        valid &= ok.reshape(shape)
    return mirror, valid

def hermitian_plane_error(f: np.ndarray) -> float:
    P = np.asarray(f)[..., 0]
    mirror, valid = _mirror(P)
    if not valid.any():
        return 0.0
    return float(np.max(np.abs(np.where(valid, P - mirror, 0)), initial=0.0))

def hermitian_symmetrize_boundary(f) -> np.ndarray:
    """Project the innermost-index-0 plane onto P(x) = conj(P(-x)); entries without a mirror become 0."""
    out = np.array(f, dtype=complex)
    P = out[..., 0]
    mirror, valid = _mirror(P)
    out[..., 0] = np.where(valid, (P + mirror) / 2, 0)
    return out
