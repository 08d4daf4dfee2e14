"""
One-dimensional dealiased convolution driver.

For each group of D residues: forward-transform all A inputs, apply the
multiplication operator to the residue blocks, inverse-transform the B results
and accumulate them. The accumulators are normalized once by 1/(qm) at the end.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from dealias import pfft_centered, pfft_complex, pfft_hermitian
from dealias.plan import PlanParams, validate_params
from dealias.workspace import Workspace

BlockFn = Callable[[np.ndarray, int], None]

BATCH_SLICES = 16

# ----------------------------
# Multiplication operators
# ----------------------------

@dataclass(frozen=True)
class MultOperator:
    """Pointwise map from A transformed inputs to B outputs.

    `apply` receives A arrays of identical shape and returns B arrays of that shape;
    output element k may depend only on input elements at k. For Hermitian plans the
    transformed values are real and the results are expected to be real too.
    """

    A: int
    B: int
    apply: Callable[[Sequence[np.ndarray]], Sequence[np.ndarray]]

    def __post_init__(self) -> None:
        if self.A < 1 or self.B < 1:
            raise ValueError(f"multiplication operator needs A >= 1 and B >= 1, got A={self.A}, B={self.B}")

    def __call__(self, inputs: Sequence[np.ndarray]) -> List[np.ndarray]:
        if len(inputs) != self.A:
            raise ValueError(f"operator expects {self.A} inputs, got {len(inputs)}")
        outputs = list(self.apply(inputs))
        if len(outputs) != self.B:
            raise ValueError(f"operator declared B={self.B} outputs but produced {len(outputs)}")
        return outputs

def builtin_mult_product(A: int) -> MultOperator:
    """Elementwise product of A inputs (B = 1)."""
    if A < 2:
        raise ValueError(f"product operator needs at least 2 inputs, got A={A}")
    return MultOperator(A=A, B=1, apply=lambda xs: [reduce(np.multiply, xs)])

# ----------------------------
# Kernel selection
# ----------------------------

@dataclass(frozen=True)
class KernelPair:
    forward: Callable[..., np.ndarray]
    backward: Callable[..., np.ndarray]
    block_len: int
    stored_len: int
    prestage_len: int
    real_blocks: bool

_KERNELS = {
    ("complex", "p1"): (pfft_complex.forward1, pfft_complex.backward1),
    ("complex", "p2"): (pfft_complex.forward2, pfft_complex.backward2),
    ("complex", "inner"): (pfft_complex.forwardInner, pfft_complex.backwardInner),
    ("centered", "p2"): (pfft_centered.forward2C, pfft_centered.backward2C),
    ("centered", "inner"): (pfft_centered.forwardInnerC, pfft_centered.backwardInnerC),
    ("hermitian", "p2"): (pfft_hermitian.forward2H, pfft_hermitian.backward2H),
    ("hermitian", "inner"): (pfft_hermitian.forwardInnerH, pfft_hermitian.backwardInnerH),
}

def select_kernels(params: PlanParams) -> KernelPair:
    forward, backward = _KERNELS[(params.symmetry, params.regime)]
    hermitian = params.symmetry == "hermitian"
    if params.symmetry == "complex" and params.p <= 2:
        prestage_len = params.m
    else:
        prestage_len = params.p * params.m
    return KernelPair(
        forward=forward,
        backward=backward,
        block_len=params.block_len,
        stored_len=pfft_hermitian.stored_length(params.L) if hermitian else params.L,
        prestage_len=prestage_len,
        real_blocks=hermitian,
    )

def uses_conjugate_pairs(params: PlanParams) -> bool:
    return params.symmetry == "complex" and params.regime == "inner" and params.D == 2

def residue_groups(params: PlanParams) -> List[Tuple[int, ...]]:
    """Residue (block) indices 0..n-1 grouped D at a time, or as (v, n-v) pairs for conjugate grouping."""
    n, D = params.n, params.D
    if uses_conjugate_pairs(params):
        groups: List[Tuple[int, ...]] = [(0,)]
        groups.extend((v, n - v) for v in range(1, (n + 1) // 2))
        if n % 2 == 0 and n > 1:
            groups.append((n // 2,))
        return groups
    return [tuple(range(s, min(s + D, n))) for s in range(0, n, D)]

# ----------------------------
# Plan
# ----------------------------

def batch_chunks(batch_shape: Tuple[int, ...]) -> List[Tuple[slice, ...]]:
    """Index tuples splitting the first batch axis into at most BATCH_SLICES pieces."""
    if not batch_shape:
        return [()]
    step = -(-batch_shape[0] // BATCH_SLICES)
    return [(slice(s, s + step),) for s in range(0, batch_shape[0], step)]

def _writable_target(x, like: np.ndarray) -> bool:
    return (
        isinstance(x, np.ndarray)
        and x.dtype == like.dtype
        and x.shape == like.shape
        and x.flags.writeable
    )

class Conv1dPlan:
    """Reusable state for convolutions of A length-L inputs into B outputs along axis 0.

    Trailing `batch_shape` axes are independent copies (C = prod(batch_shape)). The plan
    owns its residue block buffers and accumulators, so one plan serves one convolution
    at a time; build another plan (or `clone()`) for concurrent use.
    """

    def __init__(self, params: PlanParams, A: int = 2, B: int = 1, *,
                 batch_shape: Optional[Tuple[int, ...]] = None, workspace: Optional[Workspace] = None) -> None:
        validate_params(params)
        if A < 1 or B < 1:
            raise ValueError(f"convolution needs A >= 1 and B >= 1, got A={A}, B={B}")
        if batch_shape is None:
            batch_shape = () if params.C == 1 else (params.C,)
        batch_shape = tuple(int(b) for b in batch_shape)
        if int(np.prod(batch_shape, dtype=np.int64)) != params.C:
            raise ValueError(f"batch shape {batch_shape} does not hold C={params.C} copies")

        self.params = params
        self.A = A
        self.B = B
        self.batch_shape = batch_shape
        self.kernels = select_kernels(params)
        self.groups = residue_groups(params)
        self.chunks = batch_chunks(batch_shape)
        self.workspace = workspace if workspace is not None else Workspace("conv1d")

        k = self.kernels
        block_dtype = float if k.real_blocks else complex
        self._blocks = self.workspace.zeros((max(A, B), params.D, k.block_len) + batch_shape, dtype=block_dtype)
        self._acc = self.workspace.zeros((B, k.stored_len) + batch_shape)
        self._work = None
        if not params.inplace:
            self._work = self.workspace.zeros((k.prestage_len,) + batch_shape)

    @property
    def input_shape(self) -> Tuple[int, ...]:
        return (self.kernels.stored_len,) + self.batch_shape

    def clone(self) -> "Conv1dPlan":
        return Conv1dPlan(self.params, self.A, self.B, batch_shape=self.batch_shape,
                          workspace=Workspace(self.workspace.name))

    def check_inputs(self, inputs: Sequence) -> List[np.ndarray]:
        if len(inputs) != self.A:
            raise ValueError(f"plan expects {self.A} inputs, got {len(inputs)}")
        out = []
        for i, f in enumerate(inputs):
            f = np.asarray(f, dtype=complex)
            if f.shape != self.input_shape:
                raise ValueError(f"input {i} has shape {f.shape}, expected {self.input_shape}")
            out.append(f)
        return out

    def _forward_group(self, f: np.ndarray, group: Tuple[int, ...], dest: np.ndarray,
                       work: Optional[np.ndarray]) -> None:
        params, k = self.params, self.kernels
        if len(group) == 2 and uses_conjugate_pairs(params):
            first, second = pfft_complex.forward_conjugate_pair(f, params, group[0])
            dest[0] = first
            dest[1] = second
            return
        for i, r in enumerate(group):
            k.forward(f, params, r, out=dest[i], work=work)

    def accumulate(self, fs: Sequence[np.ndarray], on_block: BlockFn) -> np.ndarray:
        """Run every residue group through `on_block(blocks, width)`; returns the unnormalized accumulators.

        Batched plans run the kernels over slices of the copies, so kernel temporaries
        scale with one slice rather than with C.
        """
        params, k = self.params, self.kernels
        blocks, acc = self._blocks, self._acc
        acc[...] = 0
        for group in self.groups:
            width = len(group)
            for cols in self.chunks:
                rows = (slice(None),) + cols
                work = None if self._work is None else self._work[rows]
                for a, f in enumerate(fs):
                    self._forward_group(f[rows], group, blocks[a][(slice(None),) + rows], work)
            on_block(blocks, width)
            for cols in self.chunks:
                rows = (slice(None),) + cols
                for b in range(self.B):
                    for i, r in enumerate(group):
                        k.backward(blocks[b, i][rows], params, r, acc=acc[b][rows])
        return acc

    def multiplier(self, mult: MultOperator) -> BlockFn:
        if mult.A != self.A or mult.B != self.B:
            raise ValueError(f"operator arity {mult.A}->{mult.B} does not match plan {self.A}->{self.B}")
        real = self.kernels.real_blocks

        def apply(blocks: np.ndarray, width: int) -> None:
            outs = mult([blocks[a, :width] for a in range(self.A)])
            # Results aliasing another block row must be staged before rows are overwritten.
            staged = [np.array(o) if np.may_share_memory(o, blocks) else o for o in outs]
            for b, o in enumerate(staged):
                blocks[b, :width] = np.real(o) if real else o

        return apply

    def deliver(self, acc: np.ndarray, inputs: Sequence, out: Optional[Sequence[np.ndarray]]) -> List[np.ndarray]:
        if out is None:
            out = [inputs[b] if b < len(inputs) and _writable_target(inputs[b], acc[b]) else None
                   for b in range(self.B)]
        elif len(out) != self.B:
            raise ValueError(f"expected {self.B} output arrays, got {len(out)}")
        results = []
        for b in range(self.B):
            target = out[b] if out[b] is not None else np.empty_like(acc[b])
            target[...] = acc[b]
            results.append(target)
        return results

    def convolve(self, inputs: Sequence, mult: MultOperator, *, scale: float = 1.0,
                 out: Optional[Sequence[np.ndarray]] = None) -> List[np.ndarray]:
        """Dealiased convolution; results overwrite the first B inputs when they are writable complex arrays."""
        fs = self.check_inputs(inputs)
        acc = self.accumulate(fs, self.multiplier(mult))
        acc *= scale / self.params.qm
        return self.deliver(acc, inputs, out)

# ----------------------------
# Entry points
# ----------------------------

def _run(inputs: Sequence, mult: MultOperator, plan: Conv1dPlan, symmetry: str, overwrite: bool) -> List[np.ndarray]:
    if plan.params.symmetry != symmetry:
        raise ValueError(f"{symmetry} convolution called with a {plan.params.symmetry} plan")
    if len(inputs) != mult.A:
        raise ValueError(f"operator expects {mult.A} inputs, got {len(inputs)}")
    if overwrite:
        return plan.convolve(inputs, mult)
    copies = [np.array(f, dtype=complex) for f in inputs]
    return plan.convolve(copies, mult)

def convolve(inputs: Sequence, mult: MultOperator, plan: Conv1dPlan, *, overwrite: bool = True) -> List[np.ndarray]:
    """First L terms of the dealiased convolution of uncentered complex inputs."""
    return _run(inputs, mult, plan, "complex", overwrite)

def convolveC(inputs: Sequence, mult: MultOperator, plan: Conv1dPlan, *, overwrite: bool = True) -> List[np.ndarray]:
    """Centered window of the dealiased convolution of centered inputs."""
    return _run(inputs, mult, plan, "centered", overwrite)

def convolveH(inputs: Sequence, mult: MultOperator, plan: Conv1dPlan, *, overwrite: bool = True) -> List[np.ndarray]:
    """Non-negative half of the dealiased convolution of Hermitian inputs."""
    return _run(inputs, mult, plan, "hermitian", overwrite)
