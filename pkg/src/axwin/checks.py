"""Property suites behind ``axwin check``.

Each check returns a :class:`CheckResult`; suites are lists of checks.  The
oracles here are deliberately written against raw numpy (loops, explicit
index arithmetic) rather than the package's own partition/attention code.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from axwin import analysis
from axwin.attention import AxWinAttention, MhsaParams, axial_region, mhsa
from axwin.model import CPE, ICFFN, MSPE, AxWinBlock, Stem, build_variant
from axwin.partition import (
    axial_partition,
    axial_reverse,
    concat_channels,
    split_qkv,
    window_partition,
    window_reverse,
)
from axwin.tensor import (
    GradTape,
    MacCounter,
    Rng,
    Tensor,
    backward,
    bilinear_upsample_x2,
    check_gradients,
    concat,
    conv2d,
    cross_entropy,
    gelu,
    getitem,
    layer_norm,
    linear,
    matmul,
    mean,
    mul,
    no_grad,
    pad_spatial,
    scale,
    softmax,
    sub,
    sum_all,
    transpose,
)

GRAD_TOL = 1e-4
BACKBONE_GRAD_TOL = 1e-3
EQUIV_TOL = 1e-5
SOFTMAX_TOL = 1e-6


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), **self.detail}


def _timed(name: str, fn: Callable[[], tuple[bool, dict]]) -> CheckResult:
    start = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crashing property is a failing property
        ok, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
    detail["seconds"] = round(time.perf_counter() - start, 3)
    return CheckResult(name, bool(ok), detail)


# -- partition ----------------------------------------------------------------


def _index_map(h: int, w: int) -> Tensor:
    # value v = 1 + linear index; 0 marks padding
    return Tensor((np.arange(h * w, dtype=np.float64) + 1).reshape(1, h, w, 1))


def window_coverage(max_hw: int = 32, max_size: int = 12) -> tuple[bool, dict]:
    failures = []
    cases = 0
    for h in range(1, max_hw + 1):
        for w in range(1, max_hw + 1):
            x = _index_map(h, w)
            expected = np.arange(1, h * w + 1)
            for S in range(1, max_size + 1):
                cases += 1
                win, layout = window_partition(x, S)
                vals = win.data.reshape(-1)
                real = np.sort(vals[vals > 0])
                pads = int((vals == 0).sum())
                ok = (
                    layout.padded_h % S == 0
                    and layout.padded_w % S == 0
                    and layout.padded_h - h < S
                    and layout.padded_w - w < S
                    and np.array_equal(real, expected)
                    and pads == layout.padded_h * layout.padded_w - h * w
                    and np.array_equal(window_reverse(win, layout, h, w).data, x.data)
                )
                # every window holds exactly the pixels of its tile
                if ok:
                    nw = layout.padded_w // S
                    for idx in (0, layout.n_windows - 1):
                        r0, c0 = (idx // nw) * S, (idx % nw) * S
                        tile = np.zeros((S, S))
                        for r in range(S):
                            for c in range(S):
                                if r0 + r < h and c0 + c < w:
                                    tile[r, c] = (r0 + r) * w + (c0 + c) + 1
                        ok = np.array_equal(win.data[0, idx, :, :, 0], tile)
                        if not ok:
                            break
                if not ok:
                    failures.append((h, w, S))
    return not failures, {"cases": cases, "failures": failures[:10]}


def axial_coverage(max_hw: int = 32, max_size: int = 12) -> tuple[bool, dict]:
    failures = []
    cases = 0
    for h in range(1, max_hw + 1):
        for w in range(1, max_hw + 1):
            x = _index_map(h, w)
            for s in range(1, max_size + 1):
                for axis in ("rows", "columns"):
                    cases += 1
                    groups, layout = axial_partition(x, s, axis)
                    length = h if axis == "rows" else w
                    G = layout.n_groups
                    members = [m for grp in layout.member_index_map for m in grp]
                    ok = (
                        layout.padded_len % s == 0
                        and layout.padded_len - length < s
                        and G * s == layout.padded_len
                        and sorted(members) == list(range(layout.padded_len))
                        and all(len(grp) == s for grp in layout.member_index_map)
                    )
                    if ok:
                        for g in range(G):
                            for k in range(s):
                                line = g + k * G
                                if axis == "rows":
                                    got = groups.data[0, g, k, :, 0]
                                    want = x.data[0, line, :, 0] if line < h else np.zeros(w)
                                else:
                                    got = groups.data[0, g, :, k, 0]
                                    want = x.data[0, :, line, 0] if line < w else np.zeros(h)
                                if layout.member_index_map[g][k] != line or not np.array_equal(got, want):
                                    ok = False
                                    break
                            if not ok:
                                break
                    ok = ok and np.array_equal(axial_reverse(groups, layout, h, w).data, x.data)
                    if not ok:
                        failures.append((h, w, s, axis))
    return not failures, {"cases": cases, "failures": failures[:10]}


def random_round_trips(seed: int = 0) -> tuple[bool, dict]:
    rng = Rng(seed)
    ok = True
    for h, w, c, size in ((14, 14, 8, 7), (15, 15, 4, 7), (7, 7, 3, 7), (10, 9, 2, 4), (13, 21, 5, 5)):
        x = Tensor(rng.normal((2, h, w, c)))
        win, layout = window_partition(x, size)
        ok &= np.array_equal(window_reverse(win, layout, h, w).data, x.data)
        for axis in ("rows", "columns"):
            g, lay = axial_partition(x, size, axis)
            ok &= np.array_equal(axial_reverse(g, lay, h, w).data, x.data)
        for c4 in (4, 8, 64):
            t = Tensor(rng.normal((1, h, w, c4)))
            parts = split_qkv(t, t, t)
            joined = concat_channels([parts.window[0], parts.axial_rows[0], parts.axial_cols[0]])
            ok &= np.array_equal(joined.data, t.data)
    return bool(ok), {}


def partition_suite() -> list[CheckResult]:
    return [
        _timed("partition.window_coverage_roundtrip", window_coverage),
        _timed("partition.axial_coverage_roundtrip", axial_coverage),
        _timed("partition.random_roundtrips_and_split", random_round_trips),
    ]


# -- gradients ----------------------------------------------------------------


def _weighted(fn: Callable, rng: Rng):
    """Wrap ``fn`` into a scalar loss sum(fn(...) * R) with a fixed random R."""
    weights: dict[str, Tensor] = {}

    def loss(*xs):
        out = fn(*xs)
        if "r" not in weights:
            weights["r"] = Tensor(rng.normal(out.shape))
        return sum_all(mul(out, weights["r"]))

    return loss


def _kernel_cases(rng: Rng) -> dict[str, tuple[Callable, list[Tensor]]]:
    def t(*shape):
        return Tensor(rng.normal(shape))

    return {
        "matmul": (matmul, [t(2, 3, 4), t(4, 5)]),
        "linear": (linear, [t(2, 3, 4), t(4, 5), t(5)]),
        "conv2d.dense.s1": (lambda x, w, b: conv2d(x, w, b), [t(1, 5, 5, 3), t(3, 3, 3, 4), t(4)]),
        "conv2d.dense.s2": (lambda x, w, b: conv2d(x, w, b, stride=2), [t(1, 5, 6, 3), t(3, 3, 3, 2), t(2)]),
        "conv2d.depthwise.s1": (lambda x, w, b: conv2d(x, w, b, groups=4), [t(2, 5, 5, 4), t(3, 3, 1, 4), t(4)]),
        "conv2d.depthwise.s2": (
            lambda x, w, b: conv2d(x, w, b, stride=2, groups=4),
            [t(1, 7, 5, 4), t(3, 3, 1, 4), t(4)],
        ),
        "conv2d.grouped": (lambda x, w, b: conv2d(x, w, b, groups=2), [t(1, 4, 4, 4), t(3, 3, 2, 6), t(6)]),
        "conv2d.pointwise": (lambda x, w, b: conv2d(x, w, b), [t(1, 3, 3, 4), t(1, 1, 4, 6), t(6)]),
        "softmax": (softmax, [t(2, 3, 7)]),
        "layer_norm": (layer_norm, [t(2, 3, 6), t(6), t(6)]),
        "gelu": (gelu, [t(2, 3, 6)]),
        "bilinear_upsample_x2": (bilinear_upsample_x2, [t(1, 3, 4, 2)]),
        "pad_spatial": (lambda x: pad_spatial(x, 5, 6), [t(1, 3, 4, 2)]),
        "getitem": (lambda x: getitem(x, (Ellipsis, slice(1, 3))), [t(1, 2, 2, 4)]),
        "transpose": (lambda x: transpose(x, (0, 2, 1)), [t(2, 3, 4)]),
        "concat": (lambda a, b: concat([a, b], axis=-1), [t(1, 2, 2, 3), t(1, 2, 2, 1)]),
        "mean": (lambda x: mean(x, (1, 2)), [t(2, 3, 4, 2)]),
        "sub_mul_scale": (lambda a, b: scale(mul(sub(a, b), a), 0.5), [t(2, 3), t(1, 3)]),
    }


def kernel_gradients(seeds: int = 10) -> tuple[bool, dict]:
    worst: dict[str, float] = {}
    for seed in range(seeds):
        rng = Rng(seed)
        for name, (fn, inputs) in _kernel_cases(rng).items():
            err = check_gradients(_weighted(fn, rng), inputs)
            worst[name] = max(worst.get(name, 0.0), err)
        logits = Tensor(rng.normal((3, 4)))
        err = check_gradients(lambda z: cross_entropy(z, [0, 3, 1]), [logits])
        worst["cross_entropy"] = max(worst.get("cross_entropy", 0.0), err)
    return max(worst.values()) <= GRAD_TOL, {"tolerance": GRAD_TOL, "max_rel_error": worst}


def _module_grad(module_factory, x_shape, seeds: int, spot: int | None = None, loss: str = "weighted"):
    worst = 0.0
    for seed in range(seeds):
        rng = Rng(1000 + seed)
        module = module_factory().initialize(seed, "f64")
        # random (non-default) affine and biases so every parameter path is exercised
        for name, p in module.named_parameters():
            if name.endswith(("bias", "beta")):
                p.data = rng.normal(p.shape, 0.1)
            elif name.endswith("gamma"):
                p.data = 1.0 + rng.normal(p.shape, 0.1)
        x = Tensor(rng.normal(x_shape))
        params = module.parameters()
        if loss == "weighted":
            fn = _weighted(lambda xx, *ps: module(xx), rng)
        else:
            labels = [int(v) for v in rng.integers(0, 2, size=x_shape[0])]

            def fn(xx, *ps):
                return cross_entropy(module(xx)[1], labels)

        indices = None
        if spot is not None:
            indices = {0: []}
            sizes = [p.data.size for p in params]
            chosen = {}
            for _ in range(spot):
                k = int(rng.integers(0, len(params)))
                chosen.setdefault(k + 1, []).append(int(rng.integers(0, sizes[k])))
            for k in range(1, len(params) + 1):
                indices[k] = chosen.get(k, [])
        worst = max(worst, check_gradients(fn, [x, *params], indices=indices))
    return worst


def block_gradients(seeds: int = 10) -> tuple[bool, dict]:
    errs = {
        "cpe": _module_grad(lambda: CPE(8), (1, 4, 4, 8), seeds),
        "icffn": _module_grad(lambda: ICFFN(8, 4), (1, 4, 4, 8), seeds),
        "attention.axwin": _module_grad(lambda: AxWinAttention(8, 4, 2, 2), (1, 4, 4, 8), seeds),
        "attention.window": _module_grad(lambda: AxWinAttention(8, 2, 2, 2, "window"), (1, 4, 4, 8), 2),
        "attention.axial": _module_grad(lambda: AxWinAttention(8, 2, 2, 2, "axial"), (1, 4, 4, 8), 2),
        "axwin_block": _module_grad(lambda: AxWinBlock(8, 4, 2, 4), (1, 4, 4, 8), seeds),
        "axwin_block.padded": _module_grad(lambda: AxWinBlock(8, 4, 3, 2), (1, 4, 5, 8), 2),
        "mspe.b1": _module_grad(lambda: MSPE(4, 8, 1), (1, 4, 4, 4), seeds),
        "mspe.b4": _module_grad(lambda: MSPE(4, 8, 4), (1, 16, 16, 4), 2),
        "stem": _module_grad(lambda: Stem(4), (1, 8, 8, 3), 2),
    }
    return max(errs.values()) <= GRAD_TOL, {"tolerance": GRAD_TOL, "max_rel_error": errs}


def backbone_gradients(seeds: int = 1, spot: int = 20) -> tuple[bool, dict]:
    err = _module_grad(
        lambda: build_variant("micro", 2, init=False), (1, 64, 64, 3), seeds, spot=spot, loss="xent"
    )
    return err <= BACKBONE_GRAD_TOL, {"tolerance": BACKBONE_GRAD_TOL, "max_rel_error": err, "spot_params": spot}


def grad_suite(seeds: int = 10) -> list[CheckResult]:
    return [
        _timed("grad.kernels", lambda: kernel_gradients(seeds)),
        _timed("grad.blocks", lambda: block_gradients(seeds)),
        _timed("grad.micro_backbone", backbone_gradients),
    ]


# -- oracle equivalence -------------------------------------------------------


def _np_softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def dense_mhsa_oracle(q: np.ndarray, k: np.ndarray, v: np.ndarray, heads: int) -> np.ndarray:
    """Plain per-head attention over (tokens, width) arrays, one head at a time."""
    tokens, width = q.shape
    d = width // heads
    out = np.zeros_like(q)
    for hd in range(heads):
        sl = slice(hd * d, (hd + 1) * d)
        scores = np.zeros((tokens, tokens))
        for i in range(tokens):
            for j in range(tokens):
                scores[i, j] = np.dot(q[i, sl], k[j, sl]) / math.sqrt(d)
        out[:, sl] = _np_softmax(scores) @ v[:, sl]
    return out


def global_group_oracle(x: np.ndarray, attn: AxWinAttention) -> np.ndarray:
    """AxWin attention at h = w = S = s: global attention on each channel group."""
    n, h, w, c = x.shape
    Wqkv, bqkv = attn.qkv.weight.data, attn.qkv.bias.data
    Wo, bo = attn.proj.weight.data, attn.proj.bias.data
    out = np.zeros_like(x)
    bounds = {"window": (0, c // 2), "rows": (c // 2, 3 * c // 4), "cols": (3 * c // 4, c)}
    for b in range(n):
        tok = x[b].reshape(h * w, c)
        qkv = tok @ Wqkv + bqkv
        q, k, v = qkv[:, :c], qkv[:, c : 2 * c], qkv[:, 2 * c :]
        mixed = np.zeros((h * w, c))
        for branch, (lo, hi) in bounds.items():
            mixed[:, lo:hi] = dense_mhsa_oracle(q[:, lo:hi], k[:, lo:hi], v[:, lo:hi], attn.heads[branch])
        out[b] = (mixed @ Wo + bo).reshape(h, w, c)
    return out


def global_degeneracy(sizes=(4, 7), seeds: int = 10, channels: int = 16, heads: int = 4) -> tuple[bool, dict]:
    worst = 0.0
    for size in sizes:
        for seed in range(seeds):
            rng = Rng(seed)
            attn = AxWinAttention(channels, heads, size, size).initialize(seed, "f64")
            for _, p in attn.named_parameters():
                p.data = rng.normal(p.shape, 0.3)
            x = rng.normal((1, size, size, channels))
            with no_grad():
                got = attn(Tensor(x)).data
            worst = max(worst, float(np.abs(got - global_group_oracle(x, attn)).max()))
    return worst <= EQUIV_TOL, {"tolerance": EQUIV_TOL, "max_abs_error": worst, "sizes": list(sizes), "seeds": seeds}


def mhsa_oracle(seeds: int = 10) -> tuple[bool, dict]:
    worst = 0.0
    for seed in range(seeds):
        rng = Rng(seed)
        q, k, v = (rng.normal((5, 6)) for _ in range(3))
        for heads in (1, 2, 3):
            got = mhsa(Tensor(q), Tensor(k), Tensor(v), MhsaParams.for_width(6, heads)).data
            worst = max(worst, float(np.abs(got - dense_mhsa_oracle(q, k, v, heads)).max()))
    return worst <= 1e-6, {"max_abs_error": worst}


def equiv_suite(seeds: int = 10) -> list[CheckResult]:
    return [
        _timed("equiv.mhsa_dense_oracle", lambda: mhsa_oracle(seeds)),
        _timed("equiv.global_degeneracy", lambda: global_degeneracy(seeds=seeds)),
    ]


# -- model-level invariants ---------------------------------------------------


def softmax_rows(seeds: int = 10) -> tuple[bool, dict]:
    worst = 0.0
    for seed in range(seeds):
        rng = Rng(seed)
        for magnitude in (1.0, 1e2, 1e4):
            q, k, v = (Tensor(rng.normal((3, 9, 8), magnitude)) for _ in range(3))
            _, weights = mhsa(q, k, v, MhsaParams.for_width(8, 2), return_weights=True)
            worst = max(worst, float(np.abs(weights.data.sum(axis=-1) - 1.0).max()))
    return worst <= SOFTMAX_TOL, {"max_row_sum_error": worst}


def locality() -> tuple[bool, dict]:
    """8x8 map, S=4, s=2: a pixel outside p's window and axial groups cannot reach p."""
    rng = Rng(0)
    c = 8
    attn = AxWinAttention(c, 4, 4, 2).initialize(0, "f64")
    attn.proj.weight.data = np.eye(c)
    attn.proj.bias.data = np.zeros(c)
    x = rng.normal((1, 8, 8, c))
    p = (1, 1)
    far = (6, 6)  # window 3, row group {2, 6}, column group {2, 6}; p sits in {1, 5}
    near = (2, 3)  # same window as p
    with no_grad():
        base = attn(Tensor(x)).data
        x_far = x.copy()
        x_far[0, far[0], far[1]] += 1.0
        moved_far = attn(Tensor(x_far)).data
        x_near = x.copy()
        x_near[0, near[0], near[1]] += 1.0
        moved_near = attn(Tensor(x_near)).data
    window_channels = slice(0, c // 2)
    unchanged = np.array_equal(base[0, p[0], p[1], window_channels], moved_far[0, p[0], p[1], window_channels])
    whole_pixel = np.array_equal(base[0, p[0], p[1]], moved_far[0, p[0], p[1]])
    reacts = not np.array_equal(base[0, p[0], p[1], window_channels], moved_near[0, p[0], p[1], window_channels])
    return unchanged and whole_pixel and reacts, {
        "far_unchanged": bool(unchanged),
        "far_unchanged_all_channels": bool(whole_pixel),
        "near_changes_window_channels": bool(reacts),
    }


def row_isolation() -> tuple[bool, dict]:
    """s=1 on 4x4: row-region output row r depends only on input row r."""
    rng = Rng(3)
    q, k, v = (rng.normal((1, 4, 4, 4)) for _ in range(3))
    base = axial_region(Tensor(q), Tensor(k), Tensor(v), 1, "rows", 2).data
    ok = True
    for r in range(4):
        for other in range(4):
            if other == r:
                continue
            qq, kk, vv = q.copy(), k.copy(), v.copy()
            for arr in (qq, kk, vv):
                arr[0, other] += rng.normal((4, 4))
            moved = axial_region(Tensor(qq), Tensor(kk), Tensor(vv), 1, "rows", 2).data
            ok &= np.array_equal(moved[0, r], base[0, r])
    return bool(ok), {}


def stage_geometry() -> tuple[bool, dict]:
    shapes = {}
    ok = True
    for name in ("micro", "tiny", "small", "base"):
        model = build_variant(name, 10, init=False)
        for res in (64, 128) if name == "micro" else (64,):
            with no_grad():
                feats, logits = model(Tensor(np.zeros((1, res, res, 3), dtype=np.float32)))
            got = [f.shape for f in feats]
            want = [(1, res // s, res // s, c) for s, c in zip((4, 8, 16, 32), model.config.channels)]
            shapes[f"{name}@{res}"] = [list(g[1:]) for g in got]
            ok &= got == want and logits.shape == (1, 10)
    return bool(ok), {"stage_shapes": shapes}


def determinism() -> tuple[bool, dict]:
    x = Tensor(Rng(5).normal((2, 64, 64, 3), dtype=np.float32))
    outs = []
    for _ in range(2):
        model = build_variant("micro", 10, seed=7)
        with no_grad():
            outs.append(model(x)[1].data)
    m = build_variant("micro", 10, seed=7)
    with GradTape() as tape:
        loss = sum_all(m(x)[1])
    backward(tape, loss)
    return bool(np.array_equal(outs[0], outs[1]) and tape.is_topological() and tape.replay()), {
        "tape_nodes": len(tape.nodes)
    }


def model_suite() -> list[CheckResult]:
    return [
        _timed("model.softmax_rows", softmax_rows),
        _timed("model.locality", locality),
        _timed("model.row_isolation", row_isolation),
        _timed("model.stage_geometry", stage_geometry),
        _timed("model.determinism_and_replay", determinism),
    ]


# -- cost accounting ----------------------------------------------------------


def instrumented_flops() -> tuple[bool, dict]:
    model = build_variant("micro", 10)
    rows = {}
    ok = True
    for h, w in ((64, 64), (64, 96), (96, 64), (128, 128), (66, 70)):
        with MacCounter() as counter, no_grad():
            model(Tensor(np.zeros((1, h, w, 3), dtype=np.float32)))
        closed = analysis.count_flops(model, h, w).total_flops
        rows[f"{h}x{w}"] = {"executed": counter.total, "closed_form": closed}
        ok &= counter.total == closed
    return bool(ok), rows


def param_accounting() -> tuple[bool, dict]:
    ok = True
    detail = {}
    for name in ("micro", "tiny"):
        model = build_variant(name, init=False)
        names = [n for n, _ in model.named_parameters()]
        params = analysis.count_params(model)
        totals = {analysis.count_flops(model, r, r).total_params for r in (64, 96, 224)}
        covered = []
        for n in names:
            owners = [e for e in params.entries if n.startswith(e.name + ".")]
            covered.append(len(owners) == 1)
        flops_report = analysis.count_flops(model, 64, 64)
        flops_owned = [sum(1 for e in flops_report.entries if e.params and n.startswith(e.name + ".")) for n in names]
        ok &= (
            all(covered)
            and all(k == 1 for k in flops_owned)
            and totals == {model.num_params()}
            and params.total_params == model.num_params()
        )
        detail[name] = model.num_params()
    return bool(ok), detail


def flops_monotone() -> tuple[bool, dict]:
    model = build_variant("micro", 10, init=False)
    sizes = list(range(32, 131, 2))
    ok = True
    prev = None
    for h in sizes:
        f = analysis.count_flops(model, h, 64).total_flops
        ok &= prev is None or f >= prev
        prev = f
    prev = None
    for w in sizes:
        f = analysis.count_flops(model, 64, w).total_flops
        ok &= prev is None or f >= prev
        prev = f
    return bool(ok), {"checked": len(sizes) * 2}


def comparator_laws() -> tuple[bool, dict]:
    c, S, s = 64, 7, 7
    base = analysis.attention_flops_compare(56, 56, c, S, s)
    doubled = analysis.attention_flops_compare(112, 112, c, S, s)
    ratios = {k: doubled[k] / base[k] for k in base}
    degenerate = analysis.attention_flops_compare(7, 7, c, 7, 7)
    detail = {
        "ratios_56_to_112": ratios,
        "degenerate_equal": len(set(degenerate.values())) == 1,
        "axwin_below_global_56": base["axwin"] < base["global"],
    }
    ok = (
        ratios["global"] == 16
        and ratios["window"] == 4
        and ratios["axwin"] == 4
        and detail["degenerate_equal"]
        and detail["axwin_below_global_56"]
    )
    return bool(ok), detail


def comparator_growth() -> tuple[bool, dict]:
    c, S, s = 64, 7, 7
    per_token = {}
    for r in (28, 56, 112):
        costs = analysis.attention_flops_compare(r, r, c, S, s)
        per_token[r] = {k: v / (r * r) for k, v in costs.items()}
    linear = {k: len({per_token[r][k] for r in per_token}) == 1 for k in ("window", "axwin")}
    quadratic = all(
        per_token[2 * r]["global"] == 4 * per_token[r]["global"] for r in (28, 56)
    )
    return all(linear.values()) and quadratic, {"per_token_cost": per_token, "linear": linear, "global_quadratic": quadratic}


def flops_suite() -> list[CheckResult]:
    return [
        _timed("flops.instrumented_oracle", instrumented_flops),
        _timed("flops.param_accounting", param_accounting),
        _timed("flops.monotone", flops_monotone),
        _timed("flops.comparator_laws", comparator_laws),
        _timed("flops.comparator_growth", comparator_growth),
    ]


SUITES = {
    "partition": partition_suite,
    "grad": grad_suite,
    "equiv": equiv_suite,
    "model": model_suite,
    "flops": flops_suite,
}


def run_suite(name: str) -> list[CheckResult]:
    if name == "all":
        return [r for suite in SUITES.values() for r in suite()]
    return SUITES[name]()
