"""Central finite differences: the independent oracle for :func:`backward`."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from axwin.tensor.core import GradTape, Tensor, backward, no_grad

# Relative error is measured against max(|analytic|, |numeric|, REL_FLOOR) so that
# entries whose true gradient is ~0 are judged on absolute error instead.
REL_FLOOR = 1e-5


def _scalar(v) -> float:
    return float(v.data if isinstance(v, Tensor) else v)


def finite_diff_grad(f: Callable[[Tensor], Tensor], x, h: float = 1e-5) -> np.ndarray:
    """(f(x + h e_i) - f(x - h e_i)) / 2h for every element i of ``x``.

    ``f`` receives a Tensor and may return a scalar Tensor or a float.
    """
    arr = np.asarray(x.data if isinstance(x, Tensor) else x)
    base = arr.astype(arr.dtype if arr.dtype.kind == "f" else np.float64, copy=True)
    grad = np.zeros(base.shape, dtype=np.float64)
    flat = base.reshape(-1)
    probe = Tensor(base)
    for i in range(flat.size):
        orig = flat[i]
        with no_grad():
            flat[i] = orig + h
            fp = _scalar(f(probe))
            flat[i] = orig - h
            fm = _scalar(f(probe))
        flat[i] = orig
        grad.reshape(-1)[i] = (fp - fm) / (2.0 * h)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = REL_FLOOR) -> float:
    a = np.asarray(analytic, dtype=np.float64)
    n = np.asarray(numeric, dtype=np.float64)
    if a.size == 0:
        return 0.0
    denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
    return float((np.abs(a - n) / denom).max())


def check_gradients(
    fn: Callable[..., Tensor],
    inputs: Sequence[Tensor],
    h: float = 1e-5,
    indices: dict[int, Sequence[int]] | None = None,
) -> float:
    """Max relative error between tape gradients and finite differences.

    ``fn`` maps the input tensors to a scalar tensor.  ``indices`` optionally
    restricts the comparison for input k to the listed flat positions (used for
    spot checks on large parameter sets).
    """
    for t in inputs:
        t.grad = None
        t.requires_grad = True
    with GradTape() as tape:
        loss = fn(*inputs)
    backward(tape, loss)
    worst = 0.0
    for k, t in enumerate(inputs):
        analytic = t.grad if t.grad is not None else np.zeros_like(t.data)
        positions = indices.get(k) if indices else None
        if positions is None:
            positions = range(t.data.size)
        flat = t.data.reshape(-1)
        for pos in positions:
            orig = flat[pos]
            with no_grad():
                flat[pos] = orig + h
                fp = float(fn(*inputs).data)
                flat[pos] = orig - h
                fm = float(fn(*inputs).data)
            flat[pos] = orig
            numeric = (fp - fm) / (2.0 * h)
            worst = max(worst, relative_error(analytic.reshape(-1)[pos], numeric))
    return worst
