import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from axwin.errors import TensorFormatError
from axwin.tensor import Rng, Tensor
from axwin.tensor.io import from_bytes, load, save, to_bytes


def test_header_bytes():
    x = np.arange(6, dtype=np.float32).reshape(1, 1, 2, 3)
    buf = to_bytes(Tensor(x))
    assert buf[:4] == b"AXTF"
    assert buf[4:6] == b"\x01\x00"
    assert buf[6] == 0 and buf[7] == 4
    assert struct.unpack("<4I", buf[8:24]) == (1, 1, 2, 3)
    assert buf[24:] == np.arange(6, dtype="<f4").tobytes()
    assert len(buf) == 24 + 6 * 4


def test_f64_code():
    buf = to_bytes(Tensor(np.zeros((1, 1, 1, 1))))
    assert buf[6] == 1
    assert len(buf) == 32


@settings(max_examples=25, deadline=None)
@given(
    st.tuples(*[st.integers(1, 4)] * 4),
    st.sampled_from([np.float32, np.float64]),
    st.integers(0, 1000),
)
def test_round_trip(shape, dtype, seed):
    x = Rng(seed).normal(shape, dtype=dtype)
    back = from_bytes(to_bytes(Tensor(x))).data
    assert back.dtype == np.dtype(dtype)
    assert np.array_equal(back, x)


def test_file_round_trip(tmp_path):
    x = Rng(0).normal((2, 3, 4, 5))
    save(tmp_path / "x.axtf", x)
    assert np.array_equal(load(tmp_path / "x.axtf").data, x)


@pytest.mark.parametrize(
    "mutate",
    [
        lambda b: b[:10],
        lambda b: b"AXTG" + b[4:],
        lambda b: b[:4] + b"\x02\x00" + b[6:],
        lambda b: b[:6] + b"\x07" + b[7:],
        lambda b: b[:7] + b"\x03" + b[8:],
        lambda b: b[:-1],
        lambda b: b + b"\x00",
    ],
    ids=["truncated", "magic", "version", "dtype", "rank", "short_payload", "long_payload"],
)
def test_malformed(mutate):
    good = to_bytes(Tensor(np.ones((1, 2, 2, 1), dtype=np.float32)))
    with pytest.raises(TensorFormatError):
        from_bytes(mutate(good))


def test_rank_must_be_four():
    with pytest.raises(TensorFormatError):
        to_bytes(np.zeros((2, 2), dtype=np.float32))
