"""Multi-head self-attention and the AxWin attention assembly.

The projected q/k/v channels are split three ways: half goes to
non-overlapping window attention, a quarter to interleaved-row attention and
a quarter to interleaved-column attention.  Branch outputs are concatenated
(window, rows, columns) and mixed by an output projection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from axwin.errors import ConfigError
from axwin.nn import Linear, Module
from axwin.partition import (
    axial_partition,
    axial_reverse,
    channel_slice,
    concat_channels,
    split_qkv,
    window_partition,
    window_reverse,
)
from axwin.tensor import Tensor, matmul, scale, softmax

ATTENTION_MODES = ("axwin", "window", "axial")


@dataclass(frozen=True)
class MhsaParams:
    heads: int
    head_dim: int

    @property
    def scale(self) -> float:
        return 1.0 / math.sqrt(self.head_dim)

    @property
    def width(self) -> int:
        return self.heads * self.head_dim

    @classmethod
    def for_width(cls, width: int, heads: int) -> MhsaParams:
        if heads < 1 or width % heads:
            raise ConfigError(f"width {width} cannot be split into {heads} heads")
        return cls(heads, width // heads)


def mhsa(q: Tensor, k: Tensor, v: Tensor, params: MhsaParams, return_weights: bool = False):
    """softmax(q k^T / sqrt(d)) v per head over the token axis (second to last).

    Inputs are (..., tokens, width); heads are contiguous channel slices.
    """
    *lead, T, width = q.shape
    if width != params.width:
        raise ConfigError(f"width {width} != {params.heads} heads x {params.head_dim}")
    H, d = params.heads, params.head_dim
    L = len(lead)
    split = (*range(L), L + 1, L, L + 2)

    def heads_first(t):
        return t.reshape(*lead, T, H, d).transpose(split)

    qh, kh, vh = heads_first(q), heads_first(k), heads_first(v)
    kt = kh.transpose((*range(L + 1), L + 2, L + 1))
    weights = softmax(scale(matmul(qh, kt), params.scale))
    out = matmul(weights, vh).transpose(split).reshape(*lead, T, width)
    return (out, weights) if return_weights else out


def window_branch(xq: Tensor, xk: Tensor, xv: Tensor, window_size: int, heads: int) -> Tensor:
    """MHSA inside every non-overlapping S x S window; padding is cropped away."""
    n, h, w, c = xq.shape
    S = window_size
    qw, layout = window_partition(xq, S)
    kw, _ = window_partition(xk, S)
    vw, _ = window_partition(xv, S)
    tokens = (n, layout.n_windows, S * S, c)
    out = mhsa(qw.reshape(tokens), kw.reshape(tokens), vw.reshape(tokens), MhsaParams.for_width(c, heads))
    return window_reverse(out.reshape(n, layout.n_windows, S, S, c), layout, h, w)


def axial_region(xq: Tensor, xk: Tensor, xv: Tensor, s: int, axis: str, heads: int) -> Tensor:
    """MHSA within each interleaved row (or column) group."""
    n, h, w, c = xq.shape
    qg, layout = axial_partition(xq, s, axis)
    kg, _ = axial_partition(xk, s, axis)
    vg, _ = axial_partition(xv, s, axis)
    grouped = qg.shape
    tokens = (n, layout.n_groups, grouped[2] * grouped[3], c)
    out = mhsa(qg.reshape(tokens), kg.reshape(tokens), vg.reshape(tokens), MhsaParams.for_width(c, heads))
    return axial_reverse(out.reshape(grouped), layout, h, w)


def axial_branch(rows_qkv, cols_qkv, s: int, row_heads: int, col_heads: int) -> Tensor:
    """Row and column regions attend separately; outputs are joined on channels."""
    rows = axial_region(*rows_qkv, s, "rows", row_heads)
    cols = axial_region(*cols_qkv, s, "columns", col_heads)
    return concat_channels([rows, cols])


def head_allocation(heads: int, mode: str = "axwin") -> dict[str, int]:
    """Heads per branch for a stage with ``heads`` total."""
    if heads < 1:
        raise ConfigError(f"heads must be >= 1, got {heads}")
    if mode == "axwin":
        return {"window": max(1, heads // 2), "rows": max(1, heads // 4), "cols": max(1, heads // 4)}
    if mode == "window":
        return {"window": heads}
    if mode == "axial":
        return {"rows": max(1, heads // 2), "cols": max(1, heads // 2)}
    raise ConfigError(f"unknown attention mode {mode!r}; expected one of {ATTENTION_MODES}")


def branch_widths(channels: int, mode: str = "axwin") -> dict[str, int]:
    if mode == "axwin":
        if channels % 4:
            raise ConfigError(f"channel width {channels} is not divisible by 4")
        return {"window": channels // 2, "rows": channels // 4, "cols": channels // 4}
    if mode == "window":
        return {"window": channels}
    if mode == "axial":
        if channels % 2:
            raise ConfigError(f"channel width {channels} is not divisible by 2")
        return {"rows": channels // 2, "cols": channels // 2}
    raise ConfigError(f"unknown attention mode {mode!r}; expected one of {ATTENTION_MODES}")


class AxWinAttention(Module):
    """Fused qkv projection, window/axial branches, output projection."""

    def __init__(self, channels: int, heads: int, window_size: int, axial_size: int | None = None, mode: str = "axwin"):
        super().__init__()
        self.channels = channels
        self.mode = mode
        self.window_size = window_size
        self.axial_size = window_size if axial_size is None else axial_size
        self.heads = head_allocation(heads, mode)
        self.widths = branch_widths(channels, mode)
        for branch, width in self.widths.items():
            MhsaParams.for_width(width, self.heads[branch])
        self.qkv = Linear(channels, 3 * channels)
        self.proj = Linear(channels, channels)

    def mix(self, x: Tensor) -> Tensor:
        """Attention output before the output projection."""
        c = self.channels
        qkv = self.qkv(x)
        xq, xk, xv = (channel_slice(qkv, i * c, (i + 1) * c) for i in range(3))
        if self.mode == "axwin":
            groups = split_qkv(xq, xk, xv)
            win = window_branch(*groups.window, self.window_size, self.heads["window"])
            ax = axial_branch(
                groups.axial_rows, groups.axial_cols, self.axial_size, self.heads["rows"], self.heads["cols"]
            )
            return concat_channels([win, ax])
        if self.mode == "window":
            return window_branch(xq, xk, xv, self.window_size, self.heads["window"])
        half = c // 2
        rows = tuple(channel_slice(t, 0, half) for t in (xq, xk, xv))
        cols = tuple(channel_slice(t, half, c) for t in (xq, xk, xv))
        return axial_branch(rows, cols, self.axial_size, self.heads["rows"], self.heads["cols"])

    def forward(self, x: Tensor) -> Tensor:
        return self.proj(self.mix(x))


def axwin_attention(x: Tensor, params: AxWinAttention) -> Tensor:
    return params(x)
