"""Multi-Scale Patch Embedding: the stride-2, channel-doubling downsampler."""

from __future__ import annotations

from axwin.errors import ConfigError
from axwin.nn import Conv2d, Module, depthwise
from axwin.tensor import Tensor, bilinear_upsample_x2, crop_spatial


class MSPE(Module):
    """Branch ``i`` (1-based) applies ``i`` stride-2 depth-wise 3x3 convs.

    Fusion runs top-down from the coarsest branch: the running map is
    upsampled x2, added to the next finer branch and passed through a
    stride-1 depth-wise 3x3.  A final 1x1 conv maps to ``c_out`` channels.
    """

    def __init__(self, c_in: int, c_out: int, branches: int):
        super().__init__()
        if branches < 1:
            raise ConfigError(f"MSPE needs at least one branch, got {branches}")
        self.c_in, self.c_out, self.branches = c_in, c_out, branches
        for b in range(1, branches + 1):
            branch = Module()
            for k in range(1, b + 1):
                branch.add_module(f"conv{k}", depthwise(c_in, stride=2))
            self.add_module(f"branch{b}", branch)
        for b in range(1, branches):
            self.add_module(f"fuse{b}", depthwise(c_in))
        self.proj = Conv2d(c_in, c_out, kernel=1)

    def forward(self, x: Tensor) -> Tensor:
        h, w = x.shape[1:3]
        if h < 2**self.branches or w < 2**self.branches:
            raise ConfigError(f"MSPE with {self.branches} branches needs input >= {2**self.branches}, got {h}x{w}")
        feats = []
        for b in range(1, self.branches + 1):
            f = x
            for conv in self._children[f"branch{b}"]._children.values():
                f = conv(f)
            feats.append(f)
        f = feats[-1]
        for b in range(self.branches - 1, 0, -1):
            finer = feats[b - 1]
            up = crop_spatial(bilinear_upsample_x2(f), *finer.shape[1:3])
            f = self._children[f"fuse{b}"](up + finer)
        return self.proj(f)


def mspe(x: Tensor, params: MSPE) -> Tensor:
    return params(x)
