"""Minimal (n, h, w, c) tensor kernels with tape-based reverse-mode gradients."""

from axwin.tensor.core import (
    DTYPES,
    GradTape,
    MacCounter,
    Node,
    Tensor,
    apply,
    as_tensor,
    backward,
    no_grad,
    register,
    registered_ops,
)
from axwin.tensor.gradcheck import check_gradients, finite_diff_grad, relative_error
from axwin.tensor.ops import (
    add,
    bilinear_upsample_x2,
    concat,
    conv2d,
    crop_spatial,
    cross_entropy,
    gelu,
    getitem,
    layer_norm,
    linear,
    matmul,
    mean,
    mul,
    pad_spatial,
    reshape,
    scale,
    softmax,
    sub,
    sum_all,
    transpose,
)
from axwin.tensor.rng import Rng

__all__ = [
    "DTYPES",
    "GradTape",
    "MacCounter",
    "Node",
    "Rng",
    "Tensor",
    "add",
    "apply",
    "as_tensor",
    "backward",
    "bilinear_upsample_x2",
    "check_gradients",
    "concat",
    "conv2d",
    "crop_spatial",
    "cross_entropy",
    "finite_diff_grad",
    "gelu",
    "getitem",
    "layer_norm",
    "linear",
    "matmul",
    "mean",
    "mul",
    "no_grad",
    "pad_spatial",
    "register",
    "registered_ops",
    "relative_error",
    "reshape",
    "scale",
    "softmax",
    "sub",
    "sum_all",
    "transpose",
]
