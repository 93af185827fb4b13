"""Index geometry for AxWin attention.

Windows are non-overlapping S x S tiles in row-major tile order.  Axial groups
are interleaved: with ``G = padded_len // s`` groups, group ``g`` holds the
rows (or columns) ``g, g + G, ..., g + (s - 1) G``.  Both partitions zero-pad
bottom/right first and have exact inverses.
"""

from __future__ import annotations

from dataclasses import dataclass

from axwin.errors import ConfigError, DimensionError
from axwin.tensor import Tensor, concat, crop_spatial, getitem, pad_spatial


def _round_up(n: int, m: int) -> int:
    return -(-n // m) * m


@dataclass(frozen=True)
class WindowLayout:
    window_size: int
    padded_h: int
    padded_w: int
    n_windows: int

    @classmethod
    def for_shape(cls, h: int, w: int, window_size: int) -> WindowLayout:
        if window_size < 1:
            raise ConfigError(f"window size must be >= 1, got {window_size}")
        ph, pw = _round_up(h, window_size), _round_up(w, window_size)
        return cls(window_size, ph, pw, (ph // window_size) * (pw // window_size))


@dataclass(frozen=True)
class AxialLayout:
    s: int
    axis: str
    n_groups: int
    padded_len: int
    member_index_map: tuple[tuple[int, ...], ...]

    @classmethod
    def for_length(cls, length: int, s: int, axis: str) -> AxialLayout:
        if s < 1:
            raise ConfigError(f"axial size must be >= 1, got {s}")
        if axis not in ("rows", "columns"):
            raise ConfigError(f"axis must be 'rows' or 'columns', got {axis!r}")
        padded = _round_up(length, s)
        g = padded // s
        members = tuple(tuple(grp + k * g for k in range(s)) for grp in range(g))
        return cls(s, axis, g, padded, members)


def window_partition(x: Tensor, window_size: int) -> tuple[Tensor, WindowLayout]:
    """Tile ``x`` (n, h, w, c) into windows of shape (n, n_windows, S, S, c)."""
    n, h, w, c = x.shape
    layout = WindowLayout.for_shape(h, w, window_size)
    S = window_size
    xp = pad_spatial(x, layout.padded_h, layout.padded_w)
    nh, nw = layout.padded_h // S, layout.padded_w // S
    tiles = xp.reshape(n, nh, S, nw, S, c).transpose(0, 1, 3, 2, 4, 5)
    return tiles.reshape(n, nh * nw, S, S, c), layout


def window_reverse(windows: Tensor, layout: WindowLayout, orig_h: int, orig_w: int) -> Tensor:
    n, count, S, S2, c = windows.shape
    if count != layout.n_windows or S != layout.window_size or S2 != S:
        raise DimensionError(
            f"got {count} windows of {S}x{S2}, layout expects {layout.n_windows} of "
            f"{layout.window_size}x{layout.window_size}"
        )
    nh, nw = layout.padded_h // S, layout.padded_w // S
    x = windows.reshape(n, nh, nw, S, S, c).transpose(0, 1, 3, 2, 4, 5)
    x = x.reshape(n, layout.padded_h, layout.padded_w, c)
    return crop_spatial(x, orig_h, orig_w)


def axial_partition(x: Tensor, s: int, axis: str = "rows") -> tuple[Tensor, AxialLayout]:
    """Group interleaved rows (or columns) of ``x``.

    Rows give (n, G, s, w, c); columns give (n, G, h, s, c).  Only the
    partitioned axis is padded.
    """
    n, h, w, c = x.shape
    if axis == "rows":
        layout = AxialLayout.for_length(h, s, axis)
        G = layout.n_groups
        xp = pad_spatial(x, layout.padded_len, w)
        # padded row index r = k * G + g
        groups = xp.reshape(n, s, G, w, c).transpose(0, 2, 1, 3, 4)
    else:
        layout = AxialLayout.for_length(w, s, axis)
        G = layout.n_groups
        xp = pad_spatial(x, h, layout.padded_len)
        groups = xp.reshape(n, h, s, G, c).transpose(0, 3, 1, 2, 4)
    return groups, layout


def axial_reverse(groups: Tensor, layout: AxialLayout, orig_h: int, orig_w: int) -> Tensor:
    n, G = groups.shape[:2]
    c = groups.shape[-1]
    if G != layout.n_groups:
        raise DimensionError(f"got {G} axial groups, layout expects {layout.n_groups}")
    s = layout.s
    if layout.axis == "rows":
        if groups.shape[2] != s:
            raise DimensionError(f"row groups must hold {s} rows, got {groups.shape[2]}")
        w = groups.shape[3]
        x = groups.transpose(0, 2, 1, 3, 4).reshape(n, layout.padded_len, w, c)
    else:
        if groups.shape[3] != s:
            raise DimensionError(f"column groups must hold {s} columns, got {groups.shape[3]}")
        h = groups.shape[2]
        x = groups.transpose(0, 2, 3, 1, 4).reshape(n, h, layout.padded_len, c)
    return crop_spatial(x, orig_h, orig_w)


@dataclass(frozen=True)
class QkvGroups:
    """Channel split of projected q/k/v into window, axial-row and axial-column parts."""

    window: tuple[Tensor, Tensor, Tensor]
    axial_rows: tuple[Tensor, Tensor, Tensor]
    axial_cols: tuple[Tensor, Tensor, Tensor]


def channel_slice(x: Tensor, start: int, stop: int) -> Tensor:
    return getitem(x, (Ellipsis, slice(start, stop)))


def split_qkv(xq: Tensor, xk: Tensor, xv: Tensor) -> QkvGroups:
    """Channels [0, c/2) -> window, [c/2, 3c/4) -> rows, [3c/4, c) -> columns."""
    c = xq.shape[-1]
    if c % 4:
        raise ConfigError(f"channel width {c} is not divisible by 4")
    if xk.shape != xq.shape or xv.shape != xq.shape:
        raise DimensionError("q, k and v must share one shape")
    half, quarter = c // 2, 3 * c // 4

    def cut(a, b):
        return tuple(channel_slice(t, a, b) for t in (xq, xk, xv))

    return QkvGroups(cut(0, half), cut(half, quarter), cut(quarter, c))


def concat_channels(parts) -> Tensor:
    """Concatenate along channels in argument order."""
    parts = list(parts)
    if not parts:
        raise DimensionError("nothing to concatenate")
    return concat(parts, axis=-1)
