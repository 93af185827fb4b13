"""AXTF binary tensor files.

Layout (little-endian, no padding)::

    b"AXTF" | u16 version=1 | u8 dtype (0=f32, 1=f64) | u8 rank=4 |
    4 x u32 extents (n, h, w, c) | raw values, row-major
"""

from __future__ import annotations

import os
import struct

import numpy as np

from axwin.errors import TensorFormatError
from axwin.tensor.core import Tensor

MAGIC = b"AXTF"
VERSION = 1
_HEADER = struct.Struct("<4sHBB4I")
_CODES = {np.dtype(np.float32): 0, np.dtype(np.float64): 1}
_DTYPES = {0: np.dtype("<f4"), 1: np.dtype("<f8")}


def to_bytes(x) -> bytes:
    data = x.data if isinstance(x, Tensor) else np.asarray(x)
    if data.ndim != 4:
        raise TensorFormatError(f"AXTF stores rank-4 tensors, got rank {data.ndim}")
    try:
        code = _CODES[data.dtype]
    except KeyError:
        raise TensorFormatError(f"unsupported dtype {data.dtype}") from None
    header = _HEADER.pack(MAGIC, VERSION, code, 4, *data.shape)
    return header + np.ascontiguousarray(data, dtype=_DTYPES[code]).tobytes()


def from_bytes(buf: bytes) -> Tensor:
    if len(buf) < _HEADER.size:
        raise TensorFormatError("truncated AXTF header")
    magic, version, code, rank, *shape = _HEADER.unpack_from(buf)
    if magic != MAGIC:
        raise TensorFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise TensorFormatError(f"unsupported AXTF version {version}")
    if code not in _DTYPES:
        raise TensorFormatError(f"unknown dtype code {code}")
    if rank != 4:
        raise TensorFormatError(f"rank must be 4, got {rank}")
    dtype = _DTYPES[code]
    expected = int(np.prod(shape)) * dtype.itemsize
    payload = buf[_HEADER.size :]
    if len(payload) != expected:
        raise TensorFormatError(f"payload is {len(payload)} bytes, expected {expected}")
    data = np.frombuffer(payload, dtype=dtype).reshape(shape)
    return Tensor(data.astype(dtype.newbyteorder("="), copy=True))


def save(path: str | os.PathLike, x) -> None:
    with open(path, "wb") as fh:
        fh.write(to_bytes(x))


def load(path: str | os.PathLike) -> Tensor:
    with open(path, "rb") as fh:
        return from_bytes(fh.read())
