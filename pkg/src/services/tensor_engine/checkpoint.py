"""Checkpoint archives.

A checkpoint is a zip file holding ``manifest.yml`` (format version, the run
configuration, the taxonomy fingerprint and an index of stored arrays) and
one ``tensors/<name>.npy`` entry per parameter or buffer, stored as
little-endian float32. Entry timestamps are fixed so identical state gives
byte-identical archives.
"""

from __future__ import annotations

import io
import os
import zipfile
from pathlib import Path
from typing import Any

import numpy as np
import yaml
from loguru import logger

from src.core.exceptions import ConfigurationError, DataError
from src.services.tensor_engine.nn import Module

FORMAT_VERSION = 1
MANIFEST_NAME = "manifest.yml"
_FIXED_DATE = (1980, 1, 1, 0, 0, 0)


def _entry(name: str) -> zipfile.ZipInfo:
    info = zipfile.ZipInfo(name, date_time=_FIXED_DATE)
    info.compress_type = zipfile.ZIP_STORED
    info.external_attr = 0o644 << 16
    return info


def save_checkpoint(
    path: str | Path,
    model: Module,
    run_config: dict[str, Any],
    taxonomy_fingerprint: str,
) -> Path:
    """Write ``model`` state to ``path`` atomically and return the path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    parameter_names = {name for name, _ in model.named_parameters()}
    state = model.state_dict()
    index = [
        {
            "name": name,
            "kind": "parameter" if name in parameter_names else "buffer",
            "shape": list(array.shape),
        }
        for name, array in sorted(state.items())
    ]
    manifest = {
        "format_version": FORMAT_VERSION,
        "taxonomy_fingerprint": taxonomy_fingerprint,
        "run_config": run_config,
        "tensors": index,
    }

    tmp = path.with_name(path.name + ".tmp")
    try:
        with zipfile.ZipFile(tmp, "w") as archive:
            archive.writestr(_entry(MANIFEST_NAME), yaml.safe_dump(manifest, sort_keys=True))
            for entry in index:
                buffer = io.BytesIO()
                np.lib.format.write_array(
                    buffer,
                    np.ascontiguousarray(state[entry["name"]], dtype="<f4"),
                    allow_pickle=False,
                )
                archive.writestr(_entry(f"tensors/{entry['name']}.npy"), buffer.getvalue())
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise

    logger.info(f"Checkpoint written: {path} ({len(index)} arrays)")
    return path


def read_manifest(path: str | Path) -> dict[str, Any]:
    """Read only the manifest of a checkpoint."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Checkpoint not found: {path}")
    with zipfile.ZipFile(path) as archive:
        return _parse_manifest(archive, path)


def load_checkpoint(path: str | Path) -> tuple[dict[str, Any], dict[str, np.ndarray]]:
    """Return ``(manifest, state)`` where state maps names to float32 arrays."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Checkpoint not found: {path}")
    with zipfile.ZipFile(path) as archive:
        manifest = _parse_manifest(archive, path)
        state: dict[str, np.ndarray] = {}
        for entry in manifest["tensors"]:
            name = entry["name"]
            try:
                raw = archive.read(f"tensors/{name}.npy")
            except KeyError as exc:
                raise DataError(f"{path}: manifest lists {name} but the archive lacks it") from exc
            array = np.lib.format.read_array(io.BytesIO(raw), allow_pickle=False)
            if list(array.shape) != entry["shape"]:
                raise DataError(
                    f"{path}: {name} stored with shape {array.shape}, manifest says {entry['shape']}"
                )
            state[name] = array
    logger.debug(f"Checkpoint loaded: {path} ({len(state)} arrays)")
    return manifest, state


def _parse_manifest(archive: zipfile.ZipFile, path: Path) -> dict[str, Any]:
    try:
        manifest = yaml.safe_load(archive.read(MANIFEST_NAME))
    except KeyError as exc:
        raise DataError(f"{path}: not a checkpoint (no {MANIFEST_NAME})") from exc
    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise ConfigurationError(
            f"{path}: checkpoint format {version} is not supported (expected {FORMAT_VERSION})"
        )
    return manifest
