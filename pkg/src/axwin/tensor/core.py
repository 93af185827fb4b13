"""Tensor value type, gradient tape and the op registry.

Every kernel is registered as a (forward, adjoint) pair.  Forward functions
operate on raw ``numpy`` arrays and return ``(out, saved)``; adjoints receive
the output gradient plus whatever the forward saved and return one gradient
per input (``None`` where no gradient flows).
"""

from __future__ import annotations

import contextvars
import itertools
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from axwin.errors import DimensionError, NonFiniteError, UnsupportedOpError

DTYPES = {"f32": np.float32, "f64": np.float64}
DTYPE_NAMES = {np.dtype(np.float32): "f32", np.dtype(np.float64): "f64"}

_ids = itertools.count()


def resolve_dtype(dtype) -> np.dtype:
    if isinstance(dtype, str):
        try:
            return np.dtype(DTYPES[dtype])
        except KeyError:
            raise ValueError(f"unknown dtype {dtype!r}; expected f32 or f64") from None
    return np.dtype(dtype)


class Tensor:
    """A dense float array that can participate in a gradient tape."""

    __slots__ = ("data", "requires_grad", "grad", "id")

    def __init__(self, data, requires_grad: bool = False, dtype=None):
        if dtype is not None:
            arr = np.asarray(data, dtype=resolve_dtype(dtype))
        else:
            arr = np.asarray(data)
            if arr.dtype not in (np.float32, np.float64):
                arr = arr.astype(np.float32)
        self.data = arr
        self.requires_grad = requires_grad
        self.grad: np.ndarray | None = None
        self.id = next(_ids)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    @property
    def ndim(self) -> int:
        return self.data.ndim

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float("nan")

    def __repr__(self) -> str:
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}, dtype={DTYPE_NAMES.get(self.dtype, self.dtype)}{flag})"

    # Operator sugar; the kernels live in axwin.tensor.ops.
    def __add__(self, other):
        from axwin.tensor import ops

        return ops.add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        from axwin.tensor import ops

        return ops.sub(self, other)

    def __mul__(self, other):
        from axwin.tensor import ops

        return ops.mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        from axwin.tensor import ops

        return ops.scale(self, -1.0)

    def __matmul__(self, other):
        from axwin.tensor import ops

        return ops.matmul(self, other)

    def __getitem__(self, index):
        from axwin.tensor import ops

        return ops.getitem(self, index)

    def reshape(self, *shape):
        from axwin.tensor import ops

        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return ops.reshape(self, shape)

    def transpose(self, *axes):
        from axwin.tensor import ops

        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        return ops.transpose(self, axes)

    def sum(self):
        from axwin.tensor import ops

        return ops.sum_all(self)


def as_tensor(x, dtype=None) -> Tensor:
    if isinstance(x, Tensor):
        return x
    return Tensor(x, dtype=dtype)


@dataclass
class Node:
    op: str
    inputs: tuple[Tensor, ...]
    output: Tensor
    attrs: dict[str, Any]
    saved: Any


@dataclass
class _OpDef:
    forward: Callable
    adjoint: Callable | None


_REGISTRY: dict[str, _OpDef] = {}
_TAPE: contextvars.ContextVar[GradTape | None] = contextvars.ContextVar("axwin_tape", default=None)
_MACS: contextvars.ContextVar[MacCounter | None] = contextvars.ContextVar("axwin_macs", default=None)


def register(name: str, forward: Callable, adjoint: Callable | None = None) -> None:
    _REGISTRY[name] = _OpDef(forward, adjoint)


def registered_ops() -> dict[str, bool]:
    """Map of op name to whether it has an adjoint."""
    return {name: d.adjoint is not None for name, d in _REGISTRY.items()}


@dataclass
class GradTape:
    """Records the forward graph of every op applied while it is active.

    Use as a context manager; exactly one tape is active per context, and a
    tape must not be shared between concurrent forward passes.
    """

    nodes: list[Node] = field(default_factory=list)

    def __post_init__(self):
        self._tokens: list[contextvars.Token] = []

    def __enter__(self) -> GradTape:
        self._tokens.append(_TAPE.set(self))
        return self

    def __exit__(self, *exc) -> None:
        _TAPE.reset(self._tokens.pop())

    @property
    def outputs(self) -> list[int]:
        """Ids of recorded tensors that no later node consumes."""
        consumed = {t.id for node in self.nodes for t in node.inputs}
        return [node.output.id for node in self.nodes if node.output.id not in consumed]

    def leaves(self) -> list[Tensor]:
        produced = {node.output.id for node in self.nodes}
        seen: dict[int, Tensor] = {}
        for node in self.nodes:
            for t in node.inputs:
                if t.id not in produced and t.id not in seen:
                    seen[t.id] = t
        return list(seen.values())

    def is_topological(self) -> bool:
        position = {node.output.id: i for i, node in enumerate(self.nodes)}
        return all(
            position.get(t.id, -1) < i for i, node in enumerate(self.nodes) for t in node.inputs
        )

    def replay(self) -> bool:
        """Re-run every forward from the leaf values; True if all outputs are bit-identical."""
        values = {t.id: t.data for t in self.leaves()}
        for node in self.nodes:
            out, _ = _REGISTRY[node.op].forward(*(values[t.id] for t in node.inputs), **node.attrs)
            if out.dtype != node.output.data.dtype or not np.array_equal(out, node.output.data):
                return False
            values[node.output.id] = out
        return True


class no_grad:
    """Suspend tape recording inside the block."""

    def __enter__(self):
        self._token = _TAPE.set(None)

    def __exit__(self, *exc):
        _TAPE.reset(self._token)


class MacCounter:
    """Tallies multiply-accumulates actually executed by the kernels."""

    def __init__(self):
        self.total = 0
        self.by_op: dict[str, int] = {}
        self._token = None

    def add(self, op: str, macs: int) -> None:
        self.total += int(macs)
        self.by_op[op] = self.by_op.get(op, 0) + int(macs)

    def __enter__(self) -> MacCounter:
        self._token = _MACS.set(self)
        return self

    def __exit__(self, *exc) -> None:
        _MACS.reset(self._token)


def tally(op: str, macs: int) -> None:
    counter = _MACS.get()
    if counter is not None:
        counter.add(op, macs)


def apply(name: str, *inputs: Tensor, **attrs) -> Tensor:
    """Run a registered kernel and record it on the active tape."""
    try:
        opdef = _REGISTRY[name]
    except KeyError:
        raise UnsupportedOpError(f"no kernel registered for op {name!r}") from None
    out_data, saved = opdef.forward(*(t.data for t in inputs), **attrs)
    if not np.isfinite(out_data).all():
        raise NonFiniteError(f"op {name!r} produced non-finite values")
    out = Tensor(out_data)
    tape = _TAPE.get()
    if tape is not None and any(t.requires_grad for t in inputs):
        out.requires_grad = True
        tape.nodes.append(Node(name, inputs, out, attrs, saved))
    return out


def backward(tape: GradTape, loss: Tensor) -> dict[int, np.ndarray]:
    """Reverse-mode sweep over ``tape`` seeded at the scalar ``loss``.

    Gradients are accumulated into ``.grad`` of every leaf that requires
    grad and are also returned keyed by tensor id.
    """
    if loss.data.size != 1:
        raise DimensionError(f"loss must be scalar, got shape {loss.shape}")
    grads: dict[int, np.ndarray] = {loss.id: np.ones_like(loss.data)}
    for node in reversed(tape.nodes):
        g = grads.pop(node.output.id, None)
        if g is None:
            continue
        adjoint = _REGISTRY[node.op].adjoint
        if adjoint is None:
            raise UnsupportedOpError(f"op {node.op!r} has no registered adjoint")
        in_grads = adjoint(g, node.saved, *(t.data for t in node.inputs), **node.attrs)
        for t, gi in zip(node.inputs, in_grads):
            if gi is None or not t.requires_grad:
                continue
            if t.id in grads:
                grads[t.id] = grads[t.id] + gi
            else:
                grads[t.id] = gi
    result = {}
    for leaf in tape.leaves():
        if not leaf.requires_grad:
            continue
        g = grads.get(leaf.id)
        if g is None:
            g = np.zeros_like(leaf.data)
        g = np.asarray(g, dtype=leaf.data.dtype).reshape(leaf.shape)
        leaf.grad = g if leaf.grad is None else leaf.grad + g
        result[leaf.id] = g
    return result
