"""Binary dataset blob plus JSON manifest.

Blob layout (little-endian)::

    magic  b"QADVDS01"
    uint32 n_rows, uint32 n_features
    float32[n_rows, n_features]  features
    int32[n_rows]                labels

The manifest sits next to the blob (``<blob>.json``) and carries class names,
per-sample physical parameters and free-form metadata.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..dataset import Dataset
from ..errors import FormatError

MAGIC = b"QADVDS01"
_HEADER = struct.Struct("<8sII")


def manifest_path(path):
    return Path(str(path) + ".json")


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value


def save_dataset(dataset: Dataset, path):
    path = Path(path)
    feats = np.ascontiguousarray(dataset.features, dtype="<f4")
    labels = np.ascontiguousarray(dataset.labels, dtype="<i4")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, *feats.shape))
        fh.write(feats.tobytes())
        fh.write(labels.tobytes())
    manifest = {
        "format": MAGIC.decode(),
        "n_rows": int(feats.shape[0]),
        "n_features": int(feats.shape[1]),
        "class_names": _jsonable(dataset.class_names),
        "class_counts": dataset.class_counts().tolist(),
        "param_names": list(dataset.param_names),
        "params": None if dataset.params is None else dataset.params.tolist(),
        "meta": _jsonable(dataset.meta),
    }
    with open(manifest_path(path), "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
    return path


def load_dataset(path):
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise FormatError(f"expected {_HEADER.size} header bytes, got {len(raw)}", offset=0)
    magic, rows, cols = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FormatError(f"bad dataset magic {magic!r}", offset=0)
    expected = _HEADER.size + rows * cols * 4 + rows * 4
    if len(raw) != expected:
        raise FormatError(
            f"dataset blob length {len(raw)} does not match expected {expected}",
            offset=min(len(raw), expected),
        )
    feats = np.frombuffer(raw, "<f4", rows * cols, _HEADER.size).reshape(rows, cols)
    labels = np.frombuffer(raw, "<i4", rows, _HEADER.size + rows * cols * 4)
    manifest = {}
    if manifest_path(path).exists():
        with open(manifest_path(path)) as fh:
            manifest = json.load(fh)
    params = manifest.get("params")
    return Dataset(
        feats.astype(float),
        labels.astype(np.int64),
        tuple(manifest.get("class_names", ())),
        None if params is None else np.asarray(params),
        tuple(manifest.get("param_names", ())),
        manifest.get("meta", {}),
    )
