import numpy as np
import pytest

from axwin.errors import ConfigError, TensorFormatError
from axwin.model import (
    CPE,
    ICFFN,
    MSPE,
    AxWinBlock,
    Stem,
    build_variant,
    get_variant,
    load_checkpoint,
    save_checkpoint,
)
from axwin.tensor import Rng, Tensor, check_gradients, conv2d, no_grad, sum_all


def rand(shape, seed=0, dtype=np.float64):
    return Tensor(Rng(seed).normal(shape, dtype=dtype))


class TestCpe:
    def test_zero_weights_identity(self):
        cpe = CPE(4)
        x = rand((1, 5, 5, 4))
        assert np.array_equal(cpe(x).data, x.data)

    def test_residual_is_depthwise_conv(self):
        cpe = CPE(4).initialize(1, "f64")
        x = rand((1, 5, 6, 4), 1)
        dw = conv2d(x, cpe.dw.weight, cpe.dw.bias, groups=4)
        np.testing.assert_allclose(cpe(x).data - x.data, dw.data, atol=1e-12)

    def test_translation_covariance(self):
        cpe = CPE(3).initialize(2, "f64")
        x = np.zeros((1, 8, 8, 3))
        x[:, :6, :6] = Rng(2).normal((1, 6, 6, 3))
        shifted = np.roll(x, (1, 1), axis=(1, 2))
        out = cpe(Tensor(x)).data
        out_shifted = cpe(Tensor(shifted)).data
        np.testing.assert_allclose(out_shifted[:, 2:7, 2:7], out[:, 1:6, 1:6], atol=1e-12)


class TestIcffn:
    def test_zero_fc2(self):
        icffn = ICFFN(8, 4).initialize(3, "f64")
        icffn.fc2.weight.data[:] = 0
        assert np.all(icffn(rand((1, 3, 3, 8))).data == 0)

    def test_hidden_width(self):
        icffn = ICFFN(64, 4)
        assert icffn.hidden == 256
        assert icffn.fc1.weight.shape == (64, 256)

    def test_gradient(self):
        icffn = ICFFN(8, 4).initialize(4, "f64")
        x = rand((1, 4, 4, 8), 4)
        r = rand((1, 4, 4, 8), 5)
        assert check_gradients(lambda xx, *ps: sum_all(icffn(xx) * r), [x, *icffn.parameters()]) <= 1e-4


class TestBlock:
    def test_residual_ablation(self):
        block = AxWinBlock(8, 4, 2, 4).initialize(5, "f64")
        block.attn.proj.weight.data[:] = 0
        block.icffn.fc2.weight.data[:] = 0
        x = rand((1, 4, 4, 8), 6)
        np.testing.assert_array_equal(block(x).data, block.cpe(x).data)

    def test_odd_shape_preserved(self):
        block = AxWinBlock(16, 4, 7, 4).initialize(6)
        x = rand((1, 15, 13, 16), 7, np.float32)
        with no_grad():
            assert block(x).shape == (1, 15, 13, 16)

    def test_gradient(self):
        block = AxWinBlock(8, 4, 2, 4).initialize(7, "f64")
        x = rand((1, 4, 4, 8), 8)
        r = rand((1, 4, 4, 8), 9)
        assert check_gradients(lambda xx, *ps: sum_all(block(xx) * r), [x, *block.parameters()]) <= 1e-4


class TestMspe:
    def test_single_branch(self):
        m = MSPE(8, 16, 1)
        names = {n for n, _ in m.named_parameters()}
        assert names == {"proj.weight", "proj.bias", "branch1.conv1.weight", "branch1.conv1.bias"}
        with no_grad():
            assert m.initialize(0)(rand((1, 6, 10, 8), 0, np.float32)).shape == (1, 3, 5, 16)

    def test_four_branches(self):
        m = MSPE(64, 128, 4).initialize(1)
        with no_grad():
            assert m(rand((1, 64, 64, 64), 1, np.float32)).shape == (1, 32, 32, 128)

    def test_odd_extents(self):
        m = MSPE(4, 8, 3).initialize(2)
        with no_grad():
            assert m(rand((1, 13, 11, 4), 2, np.float32)).shape == (1, 7, 6, 8)

    def test_too_small(self):
        with pytest.raises(ConfigError):
            MSPE(4, 8, 4)(rand((1, 8, 8, 4)))

    @pytest.mark.parametrize("branches", [1, 2, 3])
    def test_gradient(self, branches):
        m = MSPE(2, 4, branches).initialize(branches, "f64")
        x = rand((1, 8, 8, 2), 10)
        r = rand((1, 4, 4, 4), 11)
        assert check_gradients(lambda xx, *ps: sum_all(m(xx) * r), [x, *m.parameters()]) <= 1e-4


class TestStem:
    @pytest.mark.parametrize("variant,c0", [("tiny", 32), ("base", 56)])
    def test_shape(self, variant, c0):
        stem = Stem(get_variant(variant).stem_channels).initialize(0)
        with no_grad():
            assert stem(rand((1, 224, 224, 3), 0, np.float32)).shape == (1, 112, 112, c0)

    def test_gradient(self):
        stem = Stem(2).initialize(1, "f64")
        x = rand((1, 8, 8, 3), 12)
        r = rand((1, 4, 4, 2), 13)
        assert check_gradients(lambda xx, *ps: sum_all(stem(xx) * r), [x, *stem.parameters()]) <= 1e-4

    def test_odd_input(self):
        with pytest.raises(ConfigError):
            Stem(2)(rand((1, 7, 8, 3)))


class TestVariants:
    def test_tiny(self):
        cfg = get_variant("tiny")
        assert cfg.channels == (64, 128, 256, 512)
        assert cfg.heads == (2, 4, 8, 16)
        assert cfg.split_sizes == (7, 7, 7, 7)
        assert cfg.depths == (2, 2, 17, 2)

    def test_base(self):
        cfg = get_variant("base")
        assert cfg.channels == (112, 224, 448, 896)
        assert cfg.heads == (4, 8, 16, 32)
        assert cfg.split_sizes == (12, 12, 12, 12)

    def test_unknown(self):
        with pytest.raises(ConfigError):
            get_variant("huge")

    def test_invalid_override(self):
        with pytest.raises(ConfigError):
            get_variant("tiny").override(channels=(64, 128, 256, 510))
        with pytest.raises(ConfigError):
            get_variant("tiny").override(split_sizes=(7, 7, 0, 7))

    def test_split_override(self):
        assert get_variant("tiny").override(split_sizes=(3, 3, 3, 3)).split_sizes == (3, 3, 3, 3)

    def test_tiny_stage_features(self):
        model = build_variant("tiny")
        with no_grad():
            feats, logits = model(rand((1, 224, 224, 3), 0, np.float32))
        assert [f.shape for f in feats] == [
            (1, 56, 56, 64),
            (1, 28, 28, 128),
            (1, 14, 14, 256),
            (1, 7, 7, 512),
        ]
        assert logits.shape == (1, 1000)

    def test_micro_forward_deterministic(self):
        x = rand((2, 64, 64, 3), 1, np.float32)
        outs = []
        for _ in range(2):
            model = build_variant("micro", 7, seed=3)
            with no_grad():
                feats, logits = model(x)
            outs.append(logits.data)
        assert outs[0].shape == (2, 7)
        assert np.array_equal(outs[0], outs[1])

    def test_non_image_input(self):
        with pytest.raises(ConfigError):
            build_variant("micro", init=False)(rand((1, 64, 64, 4)))


class TestCheckpoint:
    def test_round_trip(self, tmp_path):
        model = build_variant("micro", 3, seed=4)
        save_checkpoint(model, tmp_path / "ckpt", seed=4)
        loaded = load_checkpoint(tmp_path / "ckpt")
        assert loaded.config == model.config
        for (na, a), (nb, b) in zip(model.named_parameters(), loaded.named_parameters()):
            assert na == nb
            assert np.array_equal(a.data, b.data)

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(TensorFormatError):
            load_checkpoint(tmp_path)
