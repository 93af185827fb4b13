"""Checkpoint directories: ``manifest.json`` plus one AXTF file per parameter."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from axwin.errors import TensorFormatError
from axwin.model.backbone import AxWinTransformer
from axwin.model.config import VariantConfig
from axwin.tensor import io
from axwin.tensor.core import DTYPE_NAMES

MANIFEST = "manifest.json"


def _as_rank4(a: np.ndarray) -> np.ndarray:
    if a.ndim > 4:
        raise TensorFormatError(f"cannot store rank-{a.ndim} parameter")
    return a.reshape((1,) * (4 - a.ndim) + a.shape)


def save_checkpoint(model: AxWinTransformer, directory, seed: int | None = None) -> Path:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    params = []
    dtype = None
    for name, p in model.named_parameters():
        dtype = DTYPE_NAMES[p.dtype]
        fname = f"{name}.axtf"
        io.save(out / fname, _as_rank4(p.data))
        params.append({"name": name, "shape": list(p.shape), "file": fname})
    manifest = {
        "variant": model.config.name,
        "seed": seed,
        "dtype": dtype,
        "config": model.config.to_dict(),
        "parameters": params,
    }
    (out / MANIFEST).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return out


def load_checkpoint(directory) -> AxWinTransformer:
    src = Path(directory)
    try:
        manifest = json.loads((src / MANIFEST).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise TensorFormatError(f"unreadable manifest in {src}: {exc}") from exc
    model = AxWinTransformer(VariantConfig(**manifest["config"]))
    params = dict(model.named_parameters())
    listed = {entry["name"] for entry in manifest["parameters"]}
    if listed != set(params):
        raise TensorFormatError("manifest parameter names do not match the architecture")
    for entry in manifest["parameters"]:
        data = io.load(src / entry["file"]).data.reshape(entry["shape"])
        target = params[entry["name"]]
        if data.shape != target.shape:
            raise TensorFormatError(f"{entry['name']}: shape {data.shape} != {target.shape}")
        target.data = data
    return model
