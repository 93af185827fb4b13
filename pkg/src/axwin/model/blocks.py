"""Transformer block components: CPE, ICFFN and the AxWin block."""

from __future__ import annotations

from axwin.attention import AxWinAttention
from axwin.nn import LayerNorm, Linear, Module, depthwise
from axwin.tensor import Tensor, gelu


class CPE(Module):
    """Conditional position encoding: ``x + dwconv3x3(x)``."""

    def __init__(self, channels: int):
        super().__init__()
        self.dw = depthwise(channels)

    def forward(self, x: Tensor) -> Tensor:
        return x + self.dw(x)


class ICFFN(Module):
    """fc1 -> GELU -> depth-wise 3x3 -> GELU -> fc2, hidden width ``ratio * c``."""

    def __init__(self, channels: int, ratio: int = 4):
        super().__init__()
        self.hidden = ratio * channels
        self.fc1 = Linear(channels, self.hidden)
        self.dw = depthwise(self.hidden)
        self.fc2 = Linear(self.hidden, channels)

    def forward(self, x: Tensor) -> Tensor:
        return self.fc2(gelu(self.dw(gelu(self.fc1(x)))))


class AxWinBlock(Module):
    def __init__(self, channels: int, heads: int, split_size: int, ratio: int = 4, mode: str = "axwin"):
        super().__init__()
        self.channels = channels
        self.cpe = CPE(channels)
        self.ln1 = LayerNorm(channels)
        self.attn = AxWinAttention(channels, heads, split_size, split_size, mode)
        self.ln2 = LayerNorm(channels)
        self.icffn = ICFFN(channels, ratio)

    def forward(self, x: Tensor) -> Tensor:
        x = self.cpe(x)
        x = x + self.attn(self.ln1(x))
        return x + self.icffn(self.ln2(x))


def cpe(x: Tensor, params: CPE) -> Tensor:
    return params(x)


def icffn(x: Tensor, params: ICFFN) -> Tensor:
    return params(x)


def axwin_block(x: Tensor, params: AxWinBlock) -> Tensor:
    return params(x)
