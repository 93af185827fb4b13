"""Parameter containers and the three primitive layers (linear, conv, layer norm)."""

from __future__ import annotations

import math
from typing import Iterator

import numpy as np

from axwin.tensor import Rng, Tensor, conv2d, layer_norm, linear
from axwin.tensor.core import resolve_dtype

WEIGHT_STD = 0.02


class Module:
    """A named tree of parameters.

    Parameters are allocated as zero arrays on construction (cheap: the pages
    are not touched) and filled by :meth:`initialize`.  That keeps shape-only
    uses such as cost accounting fast even for the largest variants.
    """

    def __init__(self):
        object.__setattr__(self, "_params", {})
        object.__setattr__(self, "_init", {})
        object.__setattr__(self, "_children", {})

    def __setattr__(self, name, value):
        if isinstance(value, Module):
            self._children[name] = value
        object.__setattr__(self, name, value)

    def add_module(self, name: str, module: Module) -> Module:
        self._children[name] = module
        return module

    def param(self, name: str, shape, init: str = "trunc_normal", std: float = WEIGHT_STD) -> Tensor:
        t = Tensor(np.zeros(tuple(shape), dtype=np.float32), requires_grad=True)
        self._params[name] = t
        self._init[name] = (init, std)
        return t

    def named_parameters(self, prefix: str = "") -> Iterator[tuple[str, Tensor]]:
        for name, p in self._params.items():
            yield prefix + name, p
        for name, child in self._children.items():
            yield from child.named_parameters(f"{prefix}{name}.")

    def named_init_kinds(self, prefix: str = "") -> Iterator[tuple[str, tuple[str, float]]]:
        for name, kind in self._init.items():
            yield prefix + name, kind
        for name, child in self._children.items():
            yield from child.named_init_kinds(f"{prefix}{name}.")

    def parameters(self) -> list[Tensor]:
        return [p for _, p in self.named_parameters()]

    def num_params(self) -> int:
        return sum(p.data.size for p in self.parameters())

    def initialize(self, seed: int = 0, dtype="f32") -> Module:
        """Truncated-normal weights (+-2 sigma), zero biases, unit LN gains.

        Linear weights use std 0.02; conv weights use sqrt(2 / fan_out) with
        fan_out = kh * kw * c_out / groups, which keeps stacked depth-wise
        convs from shrinking the signal below the layer-norm epsilon.
        """
        rng = Rng(seed)
        dt = resolve_dtype(dtype)
        kinds, stds = {}, {}
        for name, (kind, std) in self.named_init_kinds():
            kinds[name], stds[name] = kind, std
        for name, p in self.named_parameters():
            kind = kinds[name]
            if kind == "trunc_normal":
                p.data = rng.trunc_normal(p.shape, stds[name], dtype=dt)
            elif kind == "ones":
                p.data = np.ones(p.shape, dtype=dt)
            else:
                p.data = np.zeros(p.shape, dtype=dt)
            p.grad = None
        return self

    def astype(self, dtype) -> Module:
        dt = resolve_dtype(dtype)
        for p in self.parameters():
            p.data = p.data.astype(dt)
        return self

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.grad = None

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)

    def forward(self, *args, **kwargs):
        raise NotImplementedError


class Linear(Module):
    def __init__(self, c_in: int, c_out: int):
        super().__init__()
        self.c_in, self.c_out = c_in, c_out
        self.weight = self.param("weight", (c_in, c_out))
        self.bias = self.param("bias", (c_out,), "zeros")

    def forward(self, x: Tensor) -> Tensor:
        return linear(x, self.weight, self.bias)


class Conv2d(Module):
    def __init__(self, c_in: int, c_out: int, kernel: int = 3, stride: int = 1, groups: int = 1):
        super().__init__()
        self.c_in, self.c_out = c_in, c_out
        self.kernel, self.stride, self.groups = kernel, stride, groups
        fan_out = kernel * kernel * c_out // groups
        self.weight = self.param("weight", (kernel, kernel, c_in // groups, c_out), std=math.sqrt(2.0 / fan_out))
        self.bias = self.param("bias", (c_out,), "zeros")

    def forward(self, x: Tensor) -> Tensor:
        return conv2d(x, self.weight, self.bias, stride=self.stride, groups=self.groups)

    def output_size(self, h: int, w: int) -> tuple[int, int]:
        pad = (self.kernel - 1) // 2
        return (
            (h + 2 * pad - self.kernel) // self.stride + 1,
            (w + 2 * pad - self.kernel) // self.stride + 1,
        )


def depthwise(c: int, stride: int = 1) -> Conv2d:
    return Conv2d(c, c, 3, stride=stride, groups=c)


class LayerNorm(Module):
    def __init__(self, c: int):
        super().__init__()
        self.c = c
        self.gamma = self.param("gamma", (c,), "ones")
        self.beta = self.param("beta", (c,), "zeros")

    def forward(self, x: Tensor) -> Tensor:
        return layer_norm(x, self.gamma, self.beta)
