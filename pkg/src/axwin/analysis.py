"""Closed-form parameter and multiply-accumulate accounting.

Convention: one multiply-accumulate counts as one FLOP.  Convolutions count
``kh*kw*c_in/groups*c_out`` per output pixel, linear layers ``c_in*c_out`` per
token, attention ``tokens^2 * width`` for each of QK^T and AV (padded tokens
included), and layer norm, softmax and GELU one per element.  Bias adds,
residual adds, pooling and upsampling are free.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from axwin.attention import AxWinAttention
from axwin.errors import ConfigError
from axwin.model.backbone import AxWinTransformer
from axwin.nn import Conv2d, Module
from axwin.partition import AxialLayout, WindowLayout

CONVENTION = "MAC"

# Published backbone totals (params, FLOPs at 224x224) used as reproduction targets.
REPORTED = {
    "tiny": (22e6, 3.5e9),
    "small": (48e6, 7.6e9),
    "base": (84e6, 12.7e9),
}
# Published down-sampling cost for the tiny model at 512x512.
REPORTED_MSPE = (0.7e6, 1.1e9)

# Resolutions of the detection / segmentation benchmarks.  Only the backbone
# is counted here; the published figures there include the decoder.
BACKBONE_ONLY_RESOLUTIONS = {"coco": (800, 1280), "ade20k": (512, 2048)}


@dataclass
class CostEntry:
    name: str
    params: int
    flops: int


@dataclass
class CostReport:
    variant: str
    resolution: tuple[int, int] | None
    entries: list[CostEntry] = field(default_factory=list)
    convention: str = CONVENTION

    @property
    def total_params(self) -> int:
        return sum(e.params for e in self.entries)

    @property
    def total_flops(self) -> int:
        return sum(e.flops for e in self.entries)

    def select(self, prefix: str) -> list[CostEntry]:
        return [e for e in self.entries if e.name == prefix or e.name.startswith(prefix + ".")]

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "resolution": list(self.resolution) if self.resolution else None,
            "convention": self.convention,
            "entries": [{"name": e.name, "params": e.params, "flops": e.flops} for e in self.entries],
            "total_params": self.total_params,
            "total_flops": self.total_flops,
        }


def _params_of(module: Module | None) -> int:
    return 0 if module is None else sum(p.data.size for _, p in module.named_parameters())


def count_params(model: AxWinTransformer) -> CostReport:
    """Exact element counts grouped by owning layer."""
    groups: dict[str, int] = {}
    for name, p in model.named_parameters():
        layer = name.rsplit(".", 1)[0]
        groups[layer] = groups.get(layer, 0) + p.data.size
    entries = [CostEntry(name, n, 0) for name, n in groups.items()]
    return CostReport(model.config.name, None, entries)


def conv_macs(kh: int, kw: int, c_in: int, c_out: int, groups: int, h_out: int, w_out: int) -> int:
    return kh * kw * (c_in // groups) * c_out * h_out * w_out


def attention_core_macs(h: int, w: int, attn: AxWinAttention) -> int:
    """QK^T, AV and softmax for every branch of one attention layer."""
    total = 0
    for branch, width in attn.widths.items():
        heads = attn.heads[branch]
        total += _branch_macs(h, w, branch, width, heads, attn.window_size, attn.axial_size)
    return total


def _branch_macs(h, w, branch, width, heads, S, s) -> int:
    if branch == "window":
        layout = WindowLayout.for_shape(h, w, S)
        groups, tokens = layout.n_windows, S * S
    elif branch == "rows":
        layout = AxialLayout.for_length(h, s, "rows")
        groups, tokens = layout.n_groups, s * w
    else:
        layout = AxialLayout.for_length(w, s, "columns")
        groups, tokens = layout.n_groups, h * s
    return 2 * groups * tokens * tokens * width + heads * groups * tokens * tokens


class _Walker:
    def __init__(self):
        self.entries: list[CostEntry] = []

    def emit(self, name: str, module: Module | None, flops: int) -> None:
        self.entries.append(CostEntry(name, _params_of(module), int(flops)))

    def conv(self, name: str, conv: Conv2d, h: int, w: int) -> tuple[int, int]:
        ho, wo = conv.output_size(h, w)
        self.emit(name, conv, conv_macs(conv.kernel, conv.kernel, conv.c_in, conv.c_out, conv.groups, ho, wo))
        return ho, wo


def count_flops(model: AxWinTransformer, h: int, w: int) -> CostReport:
    """Per-layer params and MACs for one (h, w) image."""
    if h < 2 or w < 2 or h % 2 or w % 2:
        raise ConfigError(f"resolution {h}x{w} must be even and positive")
    cfg = model.config
    resolution = (h, w)
    wk = _Walker()
    c0 = cfg.stem_channels
    stem = model.stem
    h, w = wk.conv("stem.conv1", stem.conv1, h, w)
    wk.emit("stem.act1", None, h * w * c0)
    h, w = wk.conv("stem.conv2", stem.conv2, h, w)
    wk.emit("stem.act2", None, h * w * c0)
    h, w = wk.conv("stem.conv3", stem.conv3, h, w)

    for i, stage in enumerate(model.stages, start=1):
        prefix = f"stage{i}"
        m = stage.mspe
        if h < 2**m.branches or w < 2**m.branches:
            raise ConfigError(f"{prefix}: {h}x{w} too small for {m.branches} MSPE branches")
        sizes = {}
        for b in range(1, m.branches + 1):
            bh, bw = h, w
            for k, conv in enumerate(m._children[f"branch{b}"]._children.values(), start=1):
                bh, bw = wk.conv(f"{prefix}.mspe.branch{b}.conv{k}", conv, bh, bw)
            sizes[b] = (bh, bw)
        for b in range(m.branches - 1, 0, -1):
            wk.conv(f"{prefix}.mspe.fuse{b}", m._children[f"fuse{b}"], *sizes[b])
        h, w = wk.conv(f"{prefix}.mspe.proj", m.proj, *sizes[1])

        c = cfg.channels[i - 1]
        T = h * w
        for j, block in enumerate(stage.blocks):
            bp = f"{prefix}.block{j}"
            hidden = block.icffn.hidden
            wk.conv(f"{bp}.cpe.dw", block.cpe.dw, h, w)
            wk.emit(f"{bp}.ln1", block.ln1, T * c)
            wk.emit(f"{bp}.attn.qkv", block.attn.qkv, T * c * 3 * c)
            wk.emit(f"{bp}.attn.core", None, attention_core_macs(h, w, block.attn))
            wk.emit(f"{bp}.attn.proj", block.attn.proj, T * c * c)
            wk.emit(f"{bp}.ln2", block.ln2, T * c)
            wk.emit(f"{bp}.icffn.fc1", block.icffn.fc1, T * c * hidden)
            wk.emit(f"{bp}.icffn.act1", None, T * hidden)
            wk.conv(f"{bp}.icffn.dw", block.icffn.dw, h, w)
            wk.emit(f"{bp}.icffn.act2", None, T * hidden)
            wk.emit(f"{bp}.icffn.fc2", block.icffn.fc2, T * hidden * c)

    c = cfg.channels[-1]
    wk.emit("norm", model.norm, h * w * c)
    wk.emit("head", model.head, c * cfg.num_classes)
    return CostReport(cfg.name, resolution, wk.entries)


def mspe_costs(report: CostReport) -> dict:
    """Down-sampling cost per stage and summed over the four stages."""
    per_stage = {}
    for i in range(1, 5):
        entries = report.select(f"stage{i}.mspe")
        per_stage[f"stage{i}"] = {
            "params": sum(e.params for e in entries),
            "flops": sum(e.flops for e in entries),
        }
    return {
        "per_module": per_stage,
        "largest_module": max(per_stage.values(), key=lambda d: d["params"]),
        "summed": {
            "params": sum(d["params"] for d in per_stage.values()),
            "flops": sum(d["flops"] for d in per_stage.values()),
        },
    }


def attention_flops_compare(h: int, w: int, c: int, S: int, s: int, heads: int | None = None) -> dict[str, int]:
    """QK^T + AV MACs of the four attention patterns over an h x w x c map.

    ``heads`` does not change the count (heads partition the width); it is
    accepted so callers can pass a stage description through unchanged.
    """
    if c % 4:
        raise ConfigError(f"channel width {c} is not divisible by 4")
    if heads is not None and heads < 1:
        raise ConfigError("heads must be >= 1")

    def qk_av(groups, tokens, width):
        return 2 * groups * tokens * tokens * width

    win = WindowLayout.for_shape(h, w, S)
    rows = AxialLayout.for_length(h, s, "rows")
    cols = AxialLayout.for_length(w, s, "columns")

    def window(width):
        return qk_av(win.n_windows, S * S, width)

    def axial(width_each):
        return qk_av(rows.n_groups, s * w, width_each) + qk_av(cols.n_groups, h * s, width_each)

    return {
        "global": qk_av(1, h * w, c),
        "window": window(c),
        "axial": axial(c // 2),
        "axwin": window(c // 2) + axial(c // 4),
    }


def compare_table(resolutions, c: int, S: int, s: int, heads: int | None = None) -> list[dict]:
    rows = []
    for h, w in resolutions:
        row = {"h": h, "w": w}
        row.update(attention_flops_compare(h, w, c, S, s, heads))
        rows.append(row)
    return rows


def emit_report(report: CostReport, fmt: str = "table") -> str:
    """Render as ``json``, ``csv`` (header + one row per entry) or an aligned ``table``."""
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["name", "params", "flops"])
        for e in report.entries:
            writer.writerow([e.name, e.params, e.flops])
        return buf.getvalue()
    if fmt == "table":
        width = max([len(e.name) for e in report.entries] + [5])
        res = "x".join(map(str, report.resolution)) if report.resolution else "-"
        lines = [
            f"variant: {report.variant}  resolution: {res}  convention: 1 {report.convention} = 1 FLOP",
            f"{'layer':<{width}}  {'params':>12}  {'flops':>16}",
        ]
        for e in report.entries:
            lines.append(f"{e.name:<{width}}  {e.params:>12,}  {e.flops:>16,}")
        lines.append(f"{'TOTAL':<{width}}  {report.total_params:>12,}  {report.total_flops:>16,}")
        return "\n".join(lines) + "\n"
    raise ConfigError(f"unknown report format {fmt!r}; expected json, csv or table")


def emit_rows(rows: list[dict], fmt: str = "table") -> str:
    if not rows:
        return ""
    keys = list(rows[0])
    if fmt == "json":
        return json.dumps(rows, indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    if fmt == "table":
        lines = ["  ".join(f"{k:>16}" for k in keys)]
        for row in rows:
            lines.append("  ".join(f"{row[k]:>16,}" for k in keys))
        return "\n".join(lines) + "\n"
    raise ConfigError(f"unknown report format {fmt!r}; expected json, csv or table")
