"""Architecture descriptions for the AxWin variants."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace

from axwin.attention import ATTENTION_MODES, MhsaParams, branch_widths, head_allocation
from axwin.errors import ConfigError

MSPE_BRANCHES = (4, 3, 2, 1)


@dataclass(frozen=True)
class VariantConfig:
    name: str
    stem_channels: int
    channels: tuple[int, int, int, int]
    heads: tuple[int, int, int, int]
    split_sizes: tuple[int, int, int, int]
    expand_ratios: tuple[int, int, int, int]
    depths: tuple[int, int, int, int]
    reductions: tuple[int, int, int, int] = (2, 2, 2, 2)
    stem_reduction: int = 2
    num_classes: int = 1000
    attention_mode: str = "axwin"

    def __post_init__(self):
        for f in ("channels", "heads", "split_sizes", "expand_ratios", "depths", "reductions"):
            object.__setattr__(self, f, tuple(int(v) for v in getattr(self, f)))
        self.validate()

    def validate(self) -> None:
        for f in ("channels", "heads", "split_sizes", "expand_ratios", "depths", "reductions"):
            values = getattr(self, f)
            if len(values) != 4:
                raise ConfigError(f"{f} needs 4 per-stage values, got {len(values)}")
            if any(v < 1 for v in values):
                raise ConfigError(f"{f} must be positive, got {values}")
        if self.stem_channels < 1 or self.num_classes < 1:
            raise ConfigError("stem_channels and num_classes must be positive")
        if self.stem_reduction != 2 or any(r != 2 for r in self.reductions):
            raise ConfigError("every reduction factor is fixed at 2")
        if self.attention_mode not in ATTENTION_MODES:
            raise ConfigError(f"unknown attention mode {self.attention_mode!r}")
        for i, (c, h) in enumerate(zip(self.channels, self.heads), start=1):
            if c % 4:
                raise ConfigError(f"stage {i}: channels {c} not divisible by 4")
            widths = branch_widths(c, self.attention_mode)
            alloc = head_allocation(h, self.attention_mode)
            for branch, width in widths.items():
                try:
                    MhsaParams.for_width(width, alloc[branch])
                except ConfigError as exc:
                    raise ConfigError(f"stage {i} {branch} branch: {exc}") from None

    def override(self, **changes) -> VariantConfig:
        known = {f.name for f in fields(self)}
        unknown = set(changes) - known
        if unknown:
            raise ConfigError(f"unknown VariantConfig fields: {sorted(unknown)}")
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)


VARIANTS: dict[str, VariantConfig] = {
    "tiny": VariantConfig(
        name="tiny",
        stem_channels=32,
        channels=(64, 128, 256, 512),
        heads=(2, 4, 8, 16),
        split_sizes=(7, 7, 7, 7),
        expand_ratios=(4, 4, 4, 4),
        depths=(2, 2, 17, 2),
    ),
    "small": VariantConfig(
        name="small",
        stem_channels=48,
        channels=(96, 192, 384, 768),
        heads=(2, 4, 8, 16),
        split_sizes=(7, 7, 7, 7),
        expand_ratios=(4, 4, 4, 4),
        depths=(2, 2, 17, 2),
    ),
    "base": VariantConfig(
        name="base",
        stem_channels=56,
        channels=(112, 224, 448, 896),
        heads=(4, 8, 16, 32),
        split_sizes=(12, 12, 12, 12),
        expand_ratios=(4, 4, 4, 4),
        depths=(2, 2, 17, 2),
    ),
    # Desk-scale variant for end-to-end tests; not one of the published models.
    "micro": VariantConfig(
        name="micro",
        stem_channels=8,
        channels=(16, 32, 64, 128),
        heads=(1, 2, 4, 8),
        split_sizes=(4, 4, 4, 4),
        expand_ratios=(2, 2, 2, 2),
        depths=(1, 1, 2, 1),
    ),
}

ALIASES = {"t": "tiny", "s": "small", "b": "base", "axwin-t": "tiny", "axwin-s": "small", "axwin-b": "base"}


def get_variant(name: str) -> VariantConfig:
    key = ALIASES.get(name.lower(), name.lower())
    try:
        return VARIANTS[key]
    except KeyError:
        raise ConfigError(f"unknown variant {name!r}; choose from {sorted(VARIANTS)}") from None
