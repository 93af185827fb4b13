"""Forward kernels and their adjoints.

All spatial tensors use the (n, h, w, c) layout.  Multiply-accumulates are
tallied only for matmul/linear/conv2d (one per product) and for layer norm,
softmax and GELU (one per element); everything else is free under the MAC
convention used by :mod:`axwin.analysis`.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import erf

from axwin.errors import ConfigError, DimensionError
from axwin.tensor.core import Tensor, apply, as_tensor, register, tally

LN_EPS = 1e-5


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


# -- elementwise ------------------------------------------------------------


def _add_fwd(a, b):
    return a + b, None


def _add_adj(g, saved, a, b):
    return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)


def _sub_fwd(a, b):
    return a - b, None


def _sub_adj(g, saved, a, b):
    return _unbroadcast(g, a.shape), -_unbroadcast(g, b.shape)


def _mul_fwd(a, b):
    return a * b, None


def _mul_adj(g, saved, a, b):
    return _unbroadcast(g * b, a.shape), _unbroadcast(g * a, b.shape)


def _scale_fwd(x, factor):
    return x * x.dtype.type(factor), None


def _scale_adj(g, saved, x, factor):
    return (g * g.dtype.type(factor),)


register("add", _add_fwd, _add_adj)
register("sub", _sub_fwd, _sub_adj)
register("mul", _mul_fwd, _mul_adj)
register("scale", _scale_fwd, _scale_adj)


def _coerce(a, b) -> tuple[Tensor, Tensor]:
    a = as_tensor(a)
    b = as_tensor(b, dtype=a.dtype) if not isinstance(b, Tensor) else b
    return a, b


def add(a, b) -> Tensor:
    return apply("add", *_coerce(a, b))


def sub(a, b) -> Tensor:
    return apply("sub", *_coerce(a, b))


def mul(a, b) -> Tensor:
    return apply("mul", *_coerce(a, b))


def scale(x: Tensor, factor: float) -> Tensor:
    return apply("scale", x, factor=float(factor))


# -- matrix products ----------------------------------------------------------


def _matmul_fwd(a, b):
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise DimensionError(f"matmul inner extents differ: {a.shape} @ {b.shape}")
    out = np.matmul(a, b)
    tally("matmul", out.size * a.shape[-1])
    return out, None


def _matmul_adj(g, saved, a, b):
    ga = np.matmul(g, np.swapaxes(b, -1, -2))
    gb = np.matmul(np.swapaxes(a, -1, -2), g)
    return _unbroadcast(ga, a.shape), _unbroadcast(gb, b.shape)


def _linear_fwd(x, w, b):
    if x.shape[-1] != w.shape[0]:
        raise DimensionError(f"linear expects {w.shape[0]} input channels, got {x.shape[-1]}")
    x2 = x.reshape(-1, w.shape[0])
    out = x2 @ w + b
    tally("linear", x2.shape[0] * w.shape[0] * w.shape[1])
    return out.reshape(*x.shape[:-1], w.shape[1]), None


def _linear_adj(g, saved, x, w, b):
    g2 = g.reshape(-1, w.shape[1])
    x2 = x.reshape(-1, w.shape[0])
    return (g2 @ w.T).reshape(x.shape), x2.T @ g2, g2.sum(axis=0)


register("matmul", _matmul_fwd, _matmul_adj)
register("linear", _linear_fwd, _linear_adj)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Batched matrix product over the last two axes."""
    return apply("matmul", a, b)


def linear(x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    """``x @ weight + bias`` over the last axis; ``weight`` is (c_in, c_out)."""
    return apply("linear", x, weight, bias)


# -- convolution --------------------------------------------------------------


def _conv_geometry(x_shape, w_shape, stride, groups, pad):
    n, h, w, cin = x_shape
    kh, kw, cig, cout = w_shape
    if groups < 1 or cin % groups or cout % groups:
        raise ConfigError(f"channels {cin}->{cout} not divisible by groups={groups}")
    if cig != cin // groups:
        raise DimensionError(f"weight expects {cig * groups} input channels, got {cin}")
    if kh % 2 == 0 or kw % 2 == 0:
        raise ConfigError(f"kernel extents must be odd, got {kh}x{kw}")
    if pad == "same":
        ph, pw = (kh - 1) // 2, (kw - 1) // 2
    elif pad == "valid":
        ph = pw = 0
    else:
        raise ConfigError(f"unknown padding {pad!r}")
    ho = (h + 2 * ph - kh) // stride + 1
    wo = (w + 2 * pw - kw) // stride + 1
    if ho < 1 or wo < 1:
        raise DimensionError(f"input {h}x{w} too small for a {kh}x{kw} valid convolution")
    return ph, pw, ho, wo


def _window(xp, i, j, ho, wo, stride):
    return xp[:, i : i + stride * (ho - 1) + 1 : stride, j : j + stride * (wo - 1) + 1 : stride, :]


def _conv_fwd(x, w, b, stride=1, groups=1, pad="same"):
    ph, pw, ho, wo = _conv_geometry(x.shape, w.shape, stride, groups, pad)
    kh, kw, cig, cout = w.shape
    n, cin = x.shape[0], x.shape[3]
    xp = np.pad(x, ((0, 0), (ph, ph), (pw, pw), (0, 0)))
    out = np.zeros((n, ho, wo, cout), dtype=np.result_type(x, w))
    depthwise = cig == 1 and cout == cin
    for i in range(kh):
        for j in range(kw):
            patch = _window(xp, i, j, ho, wo, stride)
            if groups == 1:
                out += patch @ w[i, j]
            elif depthwise:
                out += patch * w[i, j, 0]
            else:
                cog = cout // groups
                wg = w[i, j].reshape(cig, groups, cog).transpose(1, 0, 2)
                prod = patch.reshape(n, ho, wo, groups, 1, cig) @ wg
                out += prod.reshape(n, ho, wo, cout)
    out += b
    tally("conv2d", kh * kw * cig * cout * n * ho * wo)
    return out, (ph, pw, ho, wo)


def _conv_adj(g, saved, x, w, b, stride=1, groups=1, pad="same"):
    ph, pw, ho, wo = saved
    kh, kw, cig, cout = w.shape
    n, h, wd, cin = x.shape
    xp = np.pad(x, ((0, 0), (ph, ph), (pw, pw), (0, 0)))
    gxp = np.zeros_like(xp)
    gw = np.zeros_like(w)
    depthwise = cig == 1 and cout == cin
    g2 = g.reshape(-1, cout)
    for i in range(kh):
        for j in range(kw):
            patch = _window(xp, i, j, ho, wo, stride)
            gpatch = _window(gxp, i, j, ho, wo, stride)
            if groups == 1:
                gpatch += g @ w[i, j].T
                gw[i, j] = patch.reshape(-1, cin).T @ g2
            elif depthwise:
                gpatch += g * w[i, j, 0]
                gw[i, j, 0] = (patch * g).sum(axis=(0, 1, 2))
            else:
                cog = cout // groups
                wg = w[i, j].reshape(cig, groups, cog).transpose(1, 0, 2)
                gg = g.reshape(n, ho, wo, groups, 1, cog)
                gpatch += (gg @ wg.transpose(0, 2, 1)).reshape(n, ho, wo, cin)
                pg = patch.reshape(-1, groups, cig)
                gwg = np.einsum("pgi,pgo->gio", pg, g.reshape(-1, groups, cog))
                gw[i, j] = gwg.transpose(1, 0, 2).reshape(cig, cout)
    gx = gxp[:, ph : ph + h, pw : pw + wd, :]
    return gx, gw, g.sum(axis=(0, 1, 2))


register("conv2d", _conv_fwd, _conv_adj)


def conv2d(
    x: Tensor, weight: Tensor, bias: Tensor, stride: int = 1, groups: int = 1, pad: str = "same"
) -> Tensor:
    """Cross-correlation with zero padding; ``weight`` is (kh, kw, c_in/groups, c_out)."""
    return apply("conv2d", x, weight, bias, stride=int(stride), groups=int(groups), pad=pad)


# -- normalisation and activations --------------------------------------------


def _softmax_fwd(x):
    e = np.exp(x - x.max(axis=-1, keepdims=True))
    out = e / e.sum(axis=-1, keepdims=True)
    tally("softmax", x.size)
    return out, out


def _softmax_adj(g, y, x):
    return (y * (g - (g * y).sum(axis=-1, keepdims=True)),)


def _layer_norm_fwd(x, gamma, beta, eps=LN_EPS):
    mu = x.mean(axis=-1, keepdims=True)
    xc = x - mu
    var = (xc * xc).mean(axis=-1, keepdims=True)
    rstd = 1.0 / np.sqrt(var + x.dtype.type(eps))
    xhat = xc * rstd
    tally("layer_norm", x.size)
    return xhat * gamma + beta, (xhat, rstd)


def _layer_norm_adj(g, saved, x, gamma, beta, eps=LN_EPS):
    xhat, rstd = saved
    gxhat = g * gamma
    gx = rstd * (
        gxhat
        - gxhat.mean(axis=-1, keepdims=True)
        - xhat * (gxhat * xhat).mean(axis=-1, keepdims=True)
    )
    lead = tuple(range(x.ndim - 1))
    return gx, (g * xhat).sum(axis=lead), g.sum(axis=lead)


_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _gelu_fwd(x):
    cdf = 0.5 * (1.0 + erf(x * _INV_SQRT2))
    tally("gelu", x.size)
    return (x * cdf).astype(x.dtype, copy=False), cdf


def _gelu_adj(g, cdf, x):
    pdf = np.exp(-0.5 * x * x) * _INV_SQRT_2PI
    return ((g * (cdf + x * pdf)).astype(x.dtype, copy=False),)


register("softmax", _softmax_fwd, _softmax_adj)
register("layer_norm", _layer_norm_fwd, _layer_norm_adj)
register("gelu", _gelu_fwd, _gelu_adj)


def softmax(x: Tensor) -> Tensor:
    """Max-subtracted softmax over the last axis."""
    return apply("softmax", x)


def layer_norm(x: Tensor, gamma: Tensor, beta: Tensor, eps: float = LN_EPS) -> Tensor:
    """Normalise over the channel (last) axis only, then apply the affine."""
    return apply("layer_norm", x, gamma, beta, eps=float(eps))


def gelu(x: Tensor) -> Tensor:
    """Exact (erf) GELU."""
    return apply("gelu", x)


# -- resampling and geometry --------------------------------------------------


def upsample_matrix(n: int, dtype=np.float64) -> np.ndarray:
    """(2n, n) linear map for x2 upsampling with half-pixel centres."""
    u = np.zeros((2 * n, n), dtype=dtype)
    for o in range(2 * n):
        src = max((o + 0.5) / 2.0 - 0.5, 0.0)
        i0 = int(math.floor(src))
        i1 = min(i0 + 1, n - 1)
        lam = src - i0
        u[o, i0] += 1.0 - lam
        u[o, i1] += lam
    return u


def _upsample_fwd(x):
    uh = upsample_matrix(x.shape[1], x.dtype)
    uw = upsample_matrix(x.shape[2], x.dtype)
    out = np.einsum("ah,nhwc->nawc", uh, x)
    return np.einsum("bw,nawc->nabc", uw, out), (uh, uw)


def _upsample_adj(g, saved, x):
    uh, uw = saved
    gx = np.einsum("bw,nabc->nawc", uw, g)
    return (np.einsum("ah,nawc->nhwc", uh, gx),)


def _pad_fwd(x, widths):
    return np.pad(x, widths), None


def _pad_adj(g, saved, x, widths):
    index = tuple(slice(lo, lo + n) for (lo, _), n in zip(widths, x.shape))
    return (g[index],)


def _getitem_fwd(x, index):
    return x[index].copy(), None


def _getitem_adj(g, saved, x, index):
    gx = np.zeros_like(x)
    gx[index] = g
    return (gx,)


def _reshape_fwd(x, shape):
    return x.reshape(shape), None


def _reshape_adj(g, saved, x, shape):
    return (g.reshape(x.shape),)


def _transpose_fwd(x, axes):
    return np.ascontiguousarray(x.transpose(axes)), None


def _transpose_adj(g, saved, x, axes):
    return (g.transpose(np.argsort(axes)),)


def _concat_fwd(*xs, axis):
    return np.concatenate(xs, axis=axis), None


def _concat_adj(g, saved, *xs, axis):
    bounds = np.cumsum([x.shape[axis] for x in xs])[:-1]
    return tuple(np.split(g, bounds, axis=axis))


register("upsample_x2", _upsample_fwd, _upsample_adj)
register("pad", _pad_fwd, _pad_adj)
register("getitem", _getitem_fwd, _getitem_adj)
register("reshape", _reshape_fwd, _reshape_adj)
register("transpose", _transpose_fwd, _transpose_adj)
register("concat", _concat_fwd, _concat_adj)


def bilinear_upsample_x2(x: Tensor) -> Tensor:
    """Double h and w with bilinear interpolation (align_corners=False)."""
    return apply("upsample_x2", x)


def pad_spatial(x: Tensor, to_h: int, to_w: int) -> Tensor:
    """Zero-pad the bottom and right edges of an (n, h, w, c) tensor."""
    n, h, w, c = x.shape
    if to_h < h or to_w < w:
        raise DimensionError(f"cannot pad {h}x{w} down to {to_h}x{to_w}")
    if (to_h, to_w) == (h, w):
        return x
    return apply("pad", x, widths=((0, 0), (0, to_h - h), (0, to_w - w), (0, 0)))


def crop_spatial(x: Tensor, h: int, w: int) -> Tensor:
    """Keep the top-left h x w region; inverse of :func:`pad_spatial`."""
    if h > x.shape[1] or w > x.shape[2]:
        raise DimensionError(f"cannot crop {x.shape[1]}x{x.shape[2]} up to {h}x{w}")
    if (h, w) == x.shape[1:3]:
        return x
    return apply("getitem", x, index=(slice(None), slice(0, h), slice(0, w), slice(None)))


def getitem(x: Tensor, index) -> Tensor:
    if not isinstance(index, tuple):
        index = (index,)
    if any(not isinstance(i, (slice, int)) and i is not Ellipsis for i in index):
        raise TypeError("only basic slicing is supported")
    return apply("getitem", x, index=index)


def reshape(x: Tensor, shape) -> Tensor:
    return apply("reshape", x, shape=tuple(int(s) for s in shape))


def transpose(x: Tensor, axes) -> Tensor:
    return apply("transpose", x, axes=tuple(int(a) for a in axes))


def concat(parts, axis: int = -1) -> Tensor:
    parts = list(parts)
    if not parts:
        raise DimensionError("concat needs at least one tensor")
    ref = parts[0].shape
    ax = axis % len(ref)
    for p in parts[1:]:
        if len(p.shape) != len(ref) or any(
            a != b for k, (a, b) in enumerate(zip(p.shape, ref)) if k != ax
        ):
            raise DimensionError(f"concat extents differ off axis {axis}: {ref} vs {p.shape}")
    if len(parts) == 1:
        return parts[0]
    return apply("concat", *parts, axis=ax)


# -- reductions and losses ----------------------------------------------------


def _mean_fwd(x, axes):
    return x.mean(axis=axes), None


def _mean_adj(g, saved, x, axes):
    count = math.prod(x.shape[a] for a in axes)
    return (np.broadcast_to(np.expand_dims(g, axes), x.shape) / x.dtype.type(count),)


def _sum_fwd(x):
    return np.asarray(x.sum(), dtype=x.dtype), None


def _sum_adj(g, saved, x):
    return (np.broadcast_to(g, x.shape).copy(),)


def _xent_fwd(logits, labels):
    labels = np.asarray(labels)
    z = logits - logits.max(axis=-1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=-1, keepdims=True))
    loss = -logp[np.arange(len(labels)), labels].mean()
    return np.asarray(loss, dtype=logits.dtype), logp


def _xent_adj(g, logp, logits, labels):
    labels = np.asarray(labels)
    p = np.exp(logp)
    p[np.arange(len(labels)), labels] -= 1.0
    return (p * (g / len(labels)),)


register("mean", _mean_fwd, _mean_adj)
register("sum", _sum_fwd, _sum_adj)
register("cross_entropy", _xent_fwd, _xent_adj)


def mean(x: Tensor, axes) -> Tensor:
    if isinstance(axes, int):
        axes = (axes,)
    return apply("mean", x, axes=tuple(a % x.ndim for a in axes))


def sum_all(x: Tensor) -> Tensor:
    return apply("sum", x)


def cross_entropy(logits: Tensor, labels) -> Tensor:
    """Mean negative log-likelihood of integer ``labels`` under ``logits`` (n, k)."""
    return apply("cross_entropy", logits, labels=tuple(int(v) for v in labels))
