"""Stem, stages, classifier head and the variant builder."""

from __future__ import annotations

from axwin.errors import ConfigError
from axwin.model.blocks import AxWinBlock
from axwin.model.config import MSPE_BRANCHES, VariantConfig, get_variant
from axwin.model.mspe import MSPE
from axwin.nn import Conv2d, LayerNorm, Linear, Module
from axwin.tensor import Tensor, gelu, mean


class Stem(Module):
    """conv3x3/s2 -> GELU -> conv3x3 -> GELU -> conv3x3, all with ``c`` outputs."""

    def __init__(self, c: int, c_in: int = 3):
        super().__init__()
        self.conv1 = Conv2d(c_in, c, 3, stride=2)
        self.conv2 = Conv2d(c, c, 3)
        self.conv3 = Conv2d(c, c, 3)

    def forward(self, x: Tensor) -> Tensor:
        if x.shape[1] % 2 or x.shape[2] % 2:
            raise ConfigError(f"stem needs even spatial extents, got {x.shape[1]}x{x.shape[2]}")
        return self.conv3(gelu(self.conv2(gelu(self.conv1(x)))))


class Stage(Module):
    def __init__(self, c_in: int, c: int, branches: int, depth: int, heads: int, split: int, ratio: int, mode: str):
        super().__init__()
        self.mspe = MSPE(c_in, c, branches)
        self.blocks = []
        for j in range(depth):
            self.blocks.append(self.add_module(f"block{j}", AxWinBlock(c, heads, split, ratio, mode)))

    def forward(self, x: Tensor) -> Tensor:
        x = self.mspe(x)
        for block in self.blocks:
            x = block(x)
        return x


class AxWinTransformer(Module):
    def __init__(self, config: VariantConfig):
        super().__init__()
        self.config = config
        self.stem = Stem(config.stem_channels)
        self.stages = []
        c_in = config.stem_channels
        for i in range(4):
            stage = Stage(
                c_in,
                config.channels[i],
                MSPE_BRANCHES[i],
                config.depths[i],
                config.heads[i],
                config.split_sizes[i],
                config.expand_ratios[i],
                config.attention_mode,
            )
            self.stages.append(self.add_module(f"stage{i + 1}", stage))
            c_in = config.channels[i]
        self.norm = LayerNorm(c_in)
        self.head = Linear(c_in, config.num_classes)

    def forward(self, x: Tensor) -> tuple[list[Tensor], Tensor]:
        """Return the four stage feature maps (strides 4/8/16/32) and the logits."""
        if x.ndim != 4 or x.shape[-1] != 3:
            raise ConfigError(f"expected an (n, h, w, 3) image batch, got {x.shape}")
        f = self.stem(x)
        features = []
        for stage in self.stages:
            f = stage(f)
            features.append(f)
        pooled = mean(self.norm(f), (1, 2))
        return features, self.head(pooled)


def backbone_forward(x: Tensor, model: AxWinTransformer) -> tuple[list[Tensor], Tensor]:
    return model(x)


def build_variant(
    name: str | VariantConfig = "tiny",
    num_classes: int | None = None,
    *,
    seed: int = 0,
    dtype: str = "f32",
    attention_mode: str | None = None,
    split_sizes=None,
    init: bool = True,
) -> AxWinTransformer:
    """Construct a variant by name (tiny, small, base, micro) or from a config.

    With ``init=False`` parameters stay as untouched zero buffers, which is
    enough for shape and cost accounting.
    """
    config = name if isinstance(name, VariantConfig) else get_variant(name)
    changes = {}
    if num_classes is not None:
        changes["num_classes"] = num_classes
    if attention_mode is not None:
        changes["attention_mode"] = attention_mode
    if split_sizes is not None:
        changes["split_sizes"] = tuple(split_sizes)
    if changes:
        config = config.override(**changes)
    model = AxWinTransformer(config)
    if init:
        model.initialize(seed, dtype)
    return model
