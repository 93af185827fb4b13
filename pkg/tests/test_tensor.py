import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from axwin.errors import ConfigError, DimensionError, NonFiniteError, UnsupportedOpError
from axwin.tensor import (
    GradTape,
    MacCounter,
    Rng,
    Tensor,
    apply,
    backward,
    bilinear_upsample_x2,
    check_gradients,
    conv2d,
    crop_spatial,
    finite_diff_grad,
    gelu,
    layer_norm,
    matmul,
    pad_spatial,
    register,
    softmax,
    sum_all,
)


def loop_matmul(a, b):
    out = np.zeros((a.shape[0], b.shape[1]))
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            for k in range(a.shape[1]):
                out[i, j] += a[i, k] * b[k, j]
    return out


def sliding_depthwise(x, w, stride):
    # x (h, w, c), w (3, 3, c), same padding of 1
    h, wd, c = x.shape
    xp = np.zeros((h + 2, wd + 2, c))
    xp[1:-1, 1:-1] = x
    ho, wo = (h - 1) // stride + 1, (wd - 1) // stride + 1
    out = np.zeros((ho, wo, c))
    for i in range(ho):
        for j in range(wo):
            for ch in range(c):
                patch = xp[i * stride : i * stride + 3, j * stride : j * stride + 3, ch]
                out[i, j, ch] = (patch * w[:, :, ch]).sum()
    return out


class TestMatmul:
    def test_identity(self):
        b = Rng(0).normal((3, 4))
        assert np.array_equal(matmul(Tensor(np.eye(3)), Tensor(b)).data, b)

    def test_sum_case(self):
        out = matmul(Tensor(np.ones((1, 6))), Tensor(np.ones((6, 1))))
        assert out.data.tolist() == [[6.0]]

    def test_triple_loop_oracle(self):
        rng = Rng(1)
        a, b = rng.normal((4, 5)), rng.normal((5, 3))
        ref = loop_matmul(a, b)
        got = matmul(Tensor(a), Tensor(b)).data
        assert np.max(np.abs(got - ref) / np.abs(ref)) <= 1e-6

    def test_inner_extent_mismatch(self):
        with pytest.raises(DimensionError):
            matmul(Tensor(np.ones((2, 3))), Tensor(np.ones((4, 2))))

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 5), st.integers(1, 5), st.integers(1, 5), st.integers(0, 1000))
    def test_matches_loop(self, m, k, n, seed):
        rng = Rng(seed)
        a, b = rng.normal((m, k)), rng.normal((k, n))
        np.testing.assert_allclose(matmul(Tensor(a), Tensor(b)).data, loop_matmul(a, b), atol=1e-12)


class TestConv:
    def test_depthwise_identity_kernel(self):
        x = Rng(2).normal((1, 6, 6, 3))
        w = np.zeros((3, 3, 1, 3))
        w[1, 1] = 1.0
        out = conv2d(Tensor(x), Tensor(w), Tensor(np.zeros(3)), groups=3)
        assert np.array_equal(out.data, x)

    def test_pointwise_sum(self):
        out = conv2d(Tensor(np.ones((1, 1, 1, 2))), Tensor(np.ones((1, 1, 2, 3))), Tensor(np.zeros(3)))
        assert out.data.reshape(-1).tolist() == [2.0, 2.0, 2.0]

    def test_depthwise_stride2_oracle(self):
        rng = Rng(3)
        x, w = rng.normal((5, 5, 2)), rng.normal((3, 3, 2))
        got = conv2d(Tensor(x[None]), Tensor(w[:, :, None, :]), Tensor(np.zeros(2)), stride=2, groups=2).data[0]
        ref = sliding_depthwise(x, w, 2)
        assert got.shape == (3, 3, 2)
        assert np.max(np.abs(got - ref)) <= 1e-6 * max(1.0, np.abs(ref).max())

    def test_valid_padding_shape(self):
        out = conv2d(Tensor(np.ones((1, 5, 5, 1))), Tensor(np.ones((3, 3, 1, 1))), Tensor(np.zeros(1)), pad="valid")
        assert out.shape == (1, 3, 3, 1)
        assert np.all(out.data == 9.0)

    def test_bad_group_count(self):
        with pytest.raises(ConfigError):
            conv2d(Tensor(np.ones((1, 4, 4, 3))), Tensor(np.ones((3, 3, 1, 3))), Tensor(np.zeros(3)), groups=2)


class TestSoftmax:
    def test_symmetric(self):
        assert softmax(Tensor(np.zeros((1, 2)))).data.tolist() == [[0.5, 0.5]]

    def test_large_logits(self):
        out = softmax(Tensor(np.array([[1000.0, 0.0]]))).data
        assert np.all(np.isfinite(out))
        assert out[0, 0] == pytest.approx(1.0)
        assert out[0, 1] == pytest.approx(0.0, abs=1e-300)

    def test_extended_precision_oracle(self):
        z = Rng(4).normal((1, 7))
        e = np.exp(z.astype(np.longdouble) - z.max())
        ref = (e / e.sum()).astype(np.float64)
        assert np.max(np.abs(softmax(Tensor(z)).data - ref) / ref) <= 1e-7

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 9), st.floats(1e-3, 1e4), st.integers(0, 1000))
    def test_rows_sum_to_one(self, n, magnitude, seed):
        out = softmax(Tensor(Rng(seed).normal((3, n), magnitude))).data
        assert np.all(out >= 0)
        np.testing.assert_allclose(out.sum(-1), 1.0, atol=1e-6)


class TestLayerNorm:
    def test_constant_channels(self):
        out = layer_norm(Tensor(np.full((1, 2, 2, 4), 3.0)), Tensor(np.ones(4)), Tensor(np.zeros(4)))
        assert np.all(out.data == 0.0)

    def test_affine_only(self):
        x = Rng(5).normal((1, 2, 2, 4))
        out = layer_norm(Tensor(x), Tensor(np.zeros(4)), Tensor(np.full(4, 5.0)))
        assert np.all(out.data == 5.0)

    def test_moments(self):
        out = layer_norm(Tensor(Rng(6).normal((2, 3, 3, 16), 4.0)), Tensor(np.ones(16)), Tensor(np.zeros(16))).data
        assert np.abs(out.mean(-1)).max() <= 1e-6
        assert np.abs(out.var(-1) - 1).max() <= 1e-4


class TestGelu:
    def test_values(self):
        out = gelu(Tensor(np.array([0.0, 10.0, -10.0]))).data
        assert out[0] == 0.0
        assert abs(out[1] - 10.0) <= 1e-6
        assert abs(out[2]) <= 1e-6

    def test_exact_erf_form(self):
        x = np.linspace(-3, 3, 13)
        ref = [0.5 * v * (1 + math.erf(v / math.sqrt(2))) for v in x]
        np.testing.assert_allclose(gelu(Tensor(x)).data, ref, atol=1e-12)


class TestUpsample:
    def test_constant(self):
        out = bilinear_upsample_x2(Tensor(np.full((1, 3, 5, 2), 1.5))).data
        assert out.shape == (1, 6, 10, 2)
        assert np.all(out == 1.5)

    def test_single_pixel(self):
        out = bilinear_upsample_x2(Tensor(np.full((1, 1, 1, 1), 7.0))).data
        assert out.reshape(-1).tolist() == [7.0] * 4

    def test_ramp_half_pixel(self):
        # value = 2*r + c; half-pixel sources per axis: 0, 0.25, 0.75, 1 (edge clamped)
        x = np.array([[0.0, 1.0], [2.0, 3.0]]).reshape(1, 2, 2, 1)
        pos = np.array([0.0, 0.25, 0.75, 1.0])
        ref = 2 * pos[:, None] + pos[None, :]
        got = bilinear_upsample_x2(Tensor(x)).data[0, :, :, 0]
        assert np.max(np.abs(got - ref)) <= 1e-6


class TestPadCrop:
    def test_round_trip(self):
        x = Rng(7).normal((1, 15, 15, 2))
        padded = pad_spatial(Tensor(x), 21, 21)
        assert padded.shape == (1, 21, 21, 2)
        assert np.all(padded.data[:, 15:] == 0) and np.all(padded.data[:, :, 15:] == 0)
        assert np.array_equal(crop_spatial(padded, 15, 15).data, x)

    def test_noop(self):
        x = Rng(8).normal((1, 7, 7, 1))
        assert np.array_equal(pad_spatial(Tensor(x), 7, 7).data, x)

    def test_shrink_rejected(self):
        with pytest.raises(DimensionError):
            pad_spatial(Tensor(np.zeros((1, 4, 4, 1))), 3, 4)


class TestTape:
    def test_sum_gradient(self):
        x = Tensor(Rng(9).normal((2, 3)), requires_grad=True)
        with GradTape() as tape:
            loss = sum_all(x)
        backward(tape, loss)
        assert np.array_equal(x.grad, np.ones((2, 3)))

    def test_matmul_gradient(self):
        rng = Rng(10)
        a = Tensor(rng.normal((3, 4)), requires_grad=True)
        b = Tensor(rng.normal((4, 2)), requires_grad=True)
        with GradTape() as tape:
            loss = sum_all(matmul(a, b))
        backward(tape, loss)
        # d/dA sum(AB) = 1 B^T: every row is the row-sums of B
        np.testing.assert_allclose(a.grad, np.tile(b.data.sum(1), (3, 1)), atol=1e-12)
        fd = finite_diff_grad(lambda t: sum_all(matmul(t, b)), a)
        np.testing.assert_allclose(a.grad, fd, atol=1e-8)

    def test_topological_and_replay(self):
        rng = Rng(11)
        x = Tensor(rng.normal((2, 5)), requires_grad=True)
        with GradTape() as tape:
            loss = sum_all(gelu(softmax(x) * x))
        assert tape.is_topological()
        assert tape.replay()

    def test_non_scalar_loss(self):
        x = Tensor(np.ones(3), requires_grad=True)
        with GradTape() as tape:
            y = x * x
        with pytest.raises(DimensionError):
            backward(tape, y)

    def test_nan_is_hard_error(self):
        with pytest.raises(NonFiniteError):
            softmax(Tensor(np.array([[np.nan, 0.0]])))

    def test_missing_adjoint(self):
        register("_test_no_adjoint", lambda x: (x * 2, None), None)
        x = Tensor(np.ones(2), requires_grad=True)
        with GradTape() as tape:
            loss = sum_all(apply("_test_no_adjoint", x))
        with pytest.raises(UnsupportedOpError):
            backward(tape, loss)

    def test_mac_counter_matmul(self):
        with MacCounter() as counter:
            matmul(Tensor(np.ones((4, 5))), Tensor(np.ones((5, 3))))
        assert counter.total == 60


class TestFiniteDiff:
    def test_sum(self):
        fd = finite_diff_grad(sum_all, Tensor(Rng(12).normal((3, 3))))
        assert np.abs(fd - 1).max() <= 1e-8

    def test_square(self):
        fd = finite_diff_grad(lambda t: sum_all(t * t), Tensor(np.array([3.0])))
        assert abs(fd[0] - 6.0) <= 1e-6

    def test_softmax_matmul_composite(self):
        rng = Rng(13)
        a, b = Tensor(rng.normal((3, 4))), Tensor(rng.normal((4, 5)))
        r = Tensor(rng.normal((3, 5)))
        err = check_gradients(lambda x, y: sum_all(softmax(matmul(x, y)) * r), [a, b])
        assert err <= 1e-5


class TestRng:
    def test_deterministic(self):
        assert np.array_equal(Rng(3).normal((4,)), Rng(3).normal((4,)))
        assert not np.array_equal(Rng(3).normal((4,)), Rng(4).normal((4,)))

    def test_trunc_normal_bounds(self):
        draws = Rng(0).trunc_normal((10000,), std=0.02)
        assert np.abs(draws).max() <= 0.04
        assert 0.015 < draws.std() < 0.02
