"""Command-line entry point: ``axwin describe|forward|check|train-smoke|compare``.

Exit codes: 0 success, 1 failed property or divergence, 2 bad configuration,
3 unreadable or malformed files.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path


from axwin import analysis
from axwin.attention import ATTENTION_MODES
from axwin.errors import ConfigError, NonFiniteError, TensorFormatError
from axwin.model import VariantConfig, build_variant, get_variant, save_checkpoint
from axwin.model.config import VARIANTS
from axwin.tensor import Rng, Tensor, no_grad
from axwin.tensor.core import DTYPES
from axwin.tensor.io import load as load_tensor
from axwin.tensor.io import save as save_tensor

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

CONFIG_KEYS = {"variant", "res", "seed", "dtype", "attn", "split_size", "num_classes", "json", "out"}


@dataclass
class RunConfig:
    variant: VariantConfig = field(default_factory=lambda: get_variant("tiny"))
    res: tuple[int, int] = (224, 224)
    seed: int = 0
    dtype: str = "f32"
    json: str | None = None
    out: str | None = None

    @property
    def attention_mode(self) -> str:
        return self.variant.attention_mode

    def to_dict(self) -> dict:
        return {
            "variant": self.variant.to_dict(),
            "res": list(self.res),
            "seed": self.seed,
            "dtype": self.dtype,
            "json": self.json,
            "out": self.out,
        }


def parse_res(value) -> tuple[int, int]:
    """Accept 224, "224", "224x320", [224, 320]."""
    if isinstance(value, bool):
        raise ConfigError(f"bad resolution {value!r}")
    if isinstance(value, int):
        h = w = value
    elif isinstance(value, str):
        parts = value.lower().split("x")
        try:
            nums = [int(p) for p in parts]
        except ValueError:
            raise ConfigError(f"bad resolution {value!r}; expected H or HxW") from None
        if len(nums) == 1:
            h = w = nums[0]
        elif len(nums) == 2:
            h, w = nums
        else:
            raise ConfigError(f"bad resolution {value!r}; expected H or HxW")
    elif isinstance(value, (list, tuple)) and len(value) == 2 and all(type(v) is int for v in value):
        h, w = value
    else:
        raise ConfigError(f"bad resolution {value!r}")
    if h < 2 or w < 2 or h % 2 or w % 2:
        raise ConfigError(f"resolution {h}x{w} must be positive and even")
    return h, w


def parse_split(value) -> tuple[int, int, int, int]:
    if isinstance(value, str):
        try:
            value = [int(v) for v in value.split(",")]
        except ValueError:
            raise ConfigError(f"bad split size {value!r}; expected a,b,c,d") from None
    if not isinstance(value, (list, tuple)) or len(value) != 4 or not all(type(v) is int for v in value):
        raise ConfigError(f"split size needs four integers, got {value!r}")
    if any(v < 1 for v in value):
        raise ConfigError(f"split sizes must be positive, got {value!r}")
    return tuple(value)


def _variant_from(value) -> VariantConfig:
    if isinstance(value, str):
        return get_variant(value)
    if isinstance(value, dict):
        spec = dict(value)
        base = get_variant(spec.pop("base", spec.get("name", "tiny")))
        try:
            return base.override(**spec)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None
    raise ConfigError(f"variant must be a name or an object, got {type(value).__name__}")


def build_run_config(raw: dict) -> RunConfig:
    unknown = set(raw) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    variant = _variant_from(raw.get("variant", "tiny"))
    changes = {}
    if raw.get("attn") is not None:
        if raw["attn"] not in ATTENTION_MODES:
            raise ConfigError(f"attn must be one of {ATTENTION_MODES}, got {raw['attn']!r}")
        changes["attention_mode"] = raw["attn"]
    if raw.get("split_size") is not None:
        changes["split_sizes"] = parse_split(raw["split_size"])
    if raw.get("num_classes") is not None:
        if type(raw["num_classes"]) is not int:
            raise ConfigError("num_classes must be an integer")
        changes["num_classes"] = raw["num_classes"]
    if changes:
        variant = variant.override(**changes)
    seed = raw.get("seed", 0)
    if type(seed) is not int or seed < 0:
        raise ConfigError(f"seed must be a non-negative integer, got {seed!r}")
    dtype = raw.get("dtype", "f32")
    if dtype not in DTYPES:
        raise ConfigError(f"dtype must be one of {sorted(DTYPES)}, got {dtype!r}")
    for key in ("json", "out"):
        if raw.get(key) is not None and not isinstance(raw[key], str):
            raise ConfigError(f"{key} must be a path string")
    return RunConfig(variant, parse_res(raw.get("res", 224)), seed, dtype, raw.get("json"), raw.get("out"))


def load_config(path) -> RunConfig:
    """Strict JSON run config; missing keys take defaults, unknown keys are errors."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return build_run_config(raw)


def resolve(args) -> RunConfig:
    """Merge --config (if any) with explicit command-line flags; flags win."""
    raw = {}
    if args.config:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {args.config} is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
    flags = {
        "variant": args.variant,
        "res": args.res,
        "seed": args.seed,
        "dtype": args.dtype,
        "attn": args.attn,
        "split_size": args.split_size,
        "json": args.json,
        "out": args.out,
    }
    if getattr(args, "num_classes", None) is not None:
        flags["num_classes"] = args.num_classes
    for key, value in flags.items():
        if value is None:
            continue
        if key == "variant" and isinstance(raw.get("variant"), dict):
            raw["variant"] = {**raw["variant"], "base": value}
        else:
            raw[key] = value
    return build_run_config(raw)


def _write_json(path: str | None, payload) -> None:
    if path:
        Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def _fmt_count(n: float, unit: str) -> str:
    return f"{n / 1e6:.2f}M" if unit == "params" else f"{n / 1e9:.3f}G"


def cmd_describe(cfg: RunConfig, fmt: str = "table") -> int:
    model = build_variant(cfg.variant, init=False)
    h, w = cfg.res
    report = analysis.count_flops(model, h, w)
    print(analysis.emit_report(report, fmt), end="")
    if fmt != "table":
        _write_json(cfg.json, report.to_dict())
        return EXIT_OK

    print(
        f"\ntotal: {_fmt_count(report.total_params, 'params')} params, "
        f"{_fmt_count(report.total_flops, 'flops')} FLOPs ({report.convention})"
    )
    extra = {}
    reported = analysis.REPORTED.get(cfg.variant.name)
    if reported and cfg.variant == get_variant(cfg.variant.name) and (h, w) == (224, 224):
        p, f = reported
        print(
            f"published: {_fmt_count(p, 'params')} params ({report.total_params / p - 1:+.1%}), "
            f"{_fmt_count(f, 'flops')} FLOPs ({report.total_flops / f - 1:+.1%})"
        )
    mspe = analysis.mspe_costs(report)
    largest = mspe["largest_module"]
    summed = mspe["summed"]
    print("down-sampling (MSPE) cost, two readings:")
    print(f"  largest single module: {_fmt_count(largest['params'], 'params')} params, {_fmt_count(largest['flops'], 'flops')} FLOPs")
    print(f"  summed over 4 stages:  {_fmt_count(summed['params'], 'params')} params, {_fmt_count(summed['flops'], 'flops')} FLOPs")
    extra["mspe"] = mspe
    backbone_only = {}
    for bench, (bh, bw) in analysis.BACKBONE_ONLY_RESOLUTIONS.items():
        flops = analysis.count_flops(model, bh, bw).total_flops
        backbone_only[bench] = {"resolution": [bh, bw], "flops": flops}
        print(f"backbone only, no decoder ({bench} {bh}x{bw}): {_fmt_count(flops, 'flops')} FLOPs")
    extra["backbone_only"] = backbone_only
    _write_json(cfg.json, {**report.to_dict(), **extra})
    return EXIT_OK


def synthetic_input(seed: int, h: int, w: int, dtype: str, batch: int = 1) -> Tensor:
    return Tensor(Rng(seed).normal((batch, h, w, 3), dtype=DTYPES[dtype]))


def cmd_forward(cfg: RunConfig, input_path: str | None = None) -> int:
    if input_path:
        x = load_tensor(input_path)
        x = Tensor(x.data.astype(DTYPES[cfg.dtype]))
    else:
        x = synthetic_input(cfg.seed, *cfg.res, cfg.dtype)
    model = build_variant(cfg.variant, seed=cfg.seed, dtype=cfg.dtype)
    start = time.perf_counter()
    with no_grad():
        features, logits = model(x)
    elapsed = time.perf_counter() - start
    z = logits.data
    stats = {
        "variant": cfg.variant.name,
        "input_shape": list(x.shape),
        "feature_shapes": [list(f.shape) for f in features],
        "logits_shape": list(z.shape),
        "mean": float(z.mean()),
        "std": float(z.std()),
        "min": float(z.min()),
        "max": float(z.max()),
        "seconds": round(elapsed, 3),
    }
    for key, value in stats.items():
        print(f"{key}: {value}")
    if cfg.out:
        save_tensor(cfg.out, logits.data.reshape(z.shape[0], 1, 1, z.shape[1]))
    _write_json(cfg.json, stats)
    return EXIT_OK


def cmd_check(suite: str, json_path: str | None = None) -> int:
    from axwin.checks import run_suite

    results = run_suite(suite)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name}  ({r.detail.get('seconds', 0):.2f}s)")
    verdict = {"suite": suite, "passed": all(r.passed for r in results), "results": [r.to_dict() for r in results]}
    if json_path:
        _write_json(json_path, verdict)
    else:
        print(json.dumps(verdict, indent=2, default=str))
    return EXIT_OK if verdict["passed"] else EXIT_FAIL


def cmd_train_smoke(cfg: RunConfig, steps: int, lr: float, threshold: float = 0.1) -> int:
    from axwin.train import train_smoke

    def report(step, batch_loss, eval_loss):
        print(f"step {step:4d}  batch {batch_loss:.4f}  dataset {eval_loss:.4f}")

    start = time.perf_counter()
    try:
        result = train_smoke(steps, cfg.seed, lr=lr, dtype=cfg.dtype, callback=report, return_model=bool(cfg.out))
    except NonFiniteError as exc:
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_FAIL
    elapsed = time.perf_counter() - start
    print(f"final dataset loss {result.final_loss:.5f} after {steps} steps ({elapsed:.1f}s)")
    if cfg.out:
        save_checkpoint(result.model, cfg.out, cfg.seed)
    _write_json(
        cfg.json,
        {
            "steps": steps,
            "seed": cfg.seed,
            "lr": lr,
            "final_loss": result.final_loss,
            "eval_curve": result.eval_curve,
            "step_losses": result.step_losses,
            "seconds": round(elapsed, 1),
        },
    )
    return EXIT_OK if result.final_loss < threshold else EXIT_FAIL


def cmd_compare(resolutions, c: int, S: int, s: int, heads: int | None, fmt: str, json_path: str | None) -> int:
    rows = analysis.compare_table(resolutions, c, S, s, heads)
    print(analysis.emit_rows(rows, fmt), end="")
    _write_json(json_path, rows)
    return EXIT_OK


def _shared(parser: argparse.ArgumentParser) -> None:
    # defaults are None so a --config file can supply them
    parser.add_argument("--variant", help=f"one of {sorted(VARIANTS)} (default tiny)")
    parser.add_argument("--config", help="JSON run config")
    parser.add_argument("--res", help="input resolution H or HxW (default 224)")
    parser.add_argument("--seed", type=int, help="RNG seed (default 0)")
    parser.add_argument("--dtype", choices=sorted(DTYPES), help="default f32")
    parser.add_argument("--attn", choices=ATTENTION_MODES, help="attention routing (default axwin)")
    parser.add_argument("--split-size", help="axial split size per stage, a,b,c,d")
    parser.add_argument("--json", help="also write a JSON report here")
    parser.add_argument("--out", help="output path (AXTF logits or checkpoint directory)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="axwin", description="AxWin backbone analysis and verification")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("describe", help="per-layer params and FLOPs")
    _shared(p)
    p.add_argument("--format", default="table", help="table, csv or json")

    p = sub.add_parser("forward", help="run one forward pass")
    _shared(p)
    p.add_argument("--input", help="AXTF image batch (n, h, w, 3); synthetic if omitted")
    p.add_argument("--num-classes", type=int)

    p = sub.add_parser("check", help="run a verification suite")
    p.add_argument("suite", nargs="?", default="all", choices=["partition", "grad", "equiv", "flops", "model", "all"])
    p.add_argument("--json", help="write the verdict here instead of stdout")

    p = sub.add_parser("train-smoke", help="overfit micro on the stripe dataset")
    _shared(p)
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--lr", type=float, default=0.01)

    p = sub.add_parser("compare", help="attention cost of global/window/axial/axwin")
    p.add_argument("--res", default="28,56,112", help="comma-separated list of H or HxW")
    p.add_argument("--channels", type=int, default=64)
    p.add_argument("--window", type=int, default=7)
    p.add_argument("--split", type=int, default=7)
    p.add_argument("--heads", type=int)
    p.add_argument("--format", default="table", help="table, csv or json")
    p.add_argument("--json", help="also write the table as JSON")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "check":
            return cmd_check(args.suite, args.json)
        if args.command == "compare":
            resolutions = [parse_res(r) for r in args.res.split(",")]
            return cmd_compare(resolutions, args.channels, args.window, args.split, args.heads, args.format, args.json)
        if args.command == "train-smoke" and args.variant is None and not args.config:
            args.variant = "micro"
        cfg = resolve(args)
        if args.command == "describe":
            return cmd_describe(cfg, args.format)
        if args.command == "forward":
            return cmd_forward(cfg, args.input)
        if args.command == "train-smoke":
            if cfg.variant.name != "micro":
                raise ConfigError("train-smoke only runs the micro variant")
            return cmd_train_smoke(cfg, args.steps, args.lr)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TensorFormatError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NonFiniteError as exc:
        print(f"non-finite values: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_CONFIG


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
