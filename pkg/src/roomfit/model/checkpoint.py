"""Versioned checkpoint container.

A checkpoint is a zip archive holding `manifest.json` (format version,
architecture config, catalog, palette, seed, and a shape manifest of every
parameter array) plus one `.npy` per array. Loading rebuilds the modules
from the config and verifies the version and every array shape before
copying weights in.
"""

from __future__ import annotations

import hashlib
import io
import json
import zipfile
from dataclasses import asdict
from pathlib import Path

import numpy as np
import torch

from roomfit.dataset import catalog_from_json_list, catalog_to_json_list
from roomfit.model.nets import ModelConfig, ModelParams, build_model
from roomfit.raster import Palette

CHECKPOINT_VERSION = 1


class CheckpointError(RuntimeError):
    pass


def _state_arrays(params: ModelParams) -> dict[str, np.ndarray]:
    arrays: dict[str, np.ndarray] = {}
    for module_name, module in params.modules().items():
        for key, tensor in module.state_dict().items():
            arrays[f"{module_name}.{key}"] = tensor.detach().cpu().numpy()
    return arrays


def save_checkpoint(params: ModelParams, path: str | Path) -> None:
    arrays = _state_arrays(params)
    manifest = {
        "format_version": CHECKPOINT_VERSION,
        "config": asdict(params.config),
        "seed": params.seed,
        "catalog": catalog_to_json_list(params.catalog),
        "palette": json.loads(params.palette.to_json()),
        "palette_hash": params.palette.hash(),
        "arrays": {
            name: {"shape": list(a.shape), "dtype": str(a.dtype)}
            for name, a in sorted(arrays.items())
        },
    }
    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_DEFLATED) as zf:
        zf.writestr("manifest.json", json.dumps(manifest, indent=2))
        for name, a in sorted(arrays.items()):
            buf = io.BytesIO()
            np.save(buf, a)
            zf.writestr(f"arrays/{name}.npy", buf.getvalue())


def load_checkpoint(path: str | Path) -> ModelParams:
    path = Path(path)
    if not path.is_file():
        raise CheckpointError(f"checkpoint not found: {path}")
    try:
        with zipfile.ZipFile(path) as zf:
            manifest = json.loads(zf.read("manifest.json"))
            version = manifest.get("format_version")
            if version != CHECKPOINT_VERSION:
                raise CheckpointError(
                    f"{path}: unsupported checkpoint version {version!r}"
                )
            config = manifest["config"]
            config["conv_channels"] = tuple(config["conv_channels"])
            params = build_model(
                ModelConfig(**config),
                catalog_from_json_list(manifest["catalog"], str(path)),
                Palette.from_json(json.dumps(manifest["palette"])),
                seed=manifest["seed"],
            )
            expected = _state_arrays(params)
            declared = manifest["arrays"]
            if set(declared) != set(expected):
                missing = sorted(set(expected) - set(declared))
                extra = sorted(set(declared) - set(expected))
                raise CheckpointError(
                    f"{path}: array manifest mismatch (missing {missing}, extra {extra})"
                )
            loaded: dict[str, np.ndarray] = {}
            for name, meta in declared.items():
                arr = np.load(io.BytesIO(zf.read(f"arrays/{name}.npy")))
                if list(arr.shape) != meta["shape"] or list(arr.shape) != list(
                    expected[name].shape
                ):
                    raise CheckpointError(
                        f"{path}: shape mismatch for {name}: "
                        f"{list(arr.shape)} vs expected {list(expected[name].shape)}"
                    )
                loaded[name] = arr
    except (KeyError, json.JSONDecodeError, zipfile.BadZipFile) as exc:
        raise CheckpointError(f"{path}: malformed checkpoint ({exc})") from None

    for module_name, module in params.modules().items():
        state = {
            key: torch.from_numpy(loaded[f"{module_name}.{key}"])
            for key in module.state_dict()
        }
        module.load_state_dict(state)
    params.eval()
    return params


def checkpoint_hash(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()
