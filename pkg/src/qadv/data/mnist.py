"""MNIST ingestion: IDX parsing, 28x28 -> 16x16 resampling, digit-subset splits."""

from __future__ import annotations

import gzip
import struct
from dataclasses import dataclass

import numpy as np

from ..dataset import Dataset, split_indices
from ..errors import ConfigurationError, FormatError

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801


def _read_bytes(path):
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "rb") as fh:
        return fh.read()


def parse_idx(raw: bytes, expected_magic=None):
    """Decode an unsigned-byte IDX buffer into an ndarray."""
    if len(raw) < 4:
        raise FormatError(f"expected at least 4 header bytes, got {len(raw)}", offset=0)
    (magic,) = struct.unpack(">I", raw[:4])
    if magic >> 8 != 0x08:
        raise FormatError(f"bad IDX magic 0x{magic:08x}", offset=0)
    if expected_magic is not None and magic != expected_magic:
        raise FormatError(
            f"bad IDX magic 0x{magic:08x}, expected 0x{expected_magic:08x}", offset=0
        )
    ndim = magic & 0xFF
    header = 4 + 4 * ndim
    if len(raw) < header:
        raise FormatError(
            f"truncated header: expected {header} bytes, got {len(raw)}", offset=len(raw)
        )
    dims = struct.unpack(">" + "I" * ndim, raw[4:header])
    count = int(np.prod(dims)) if dims else 0
    if len(raw) - header != count:
        raise FormatError(
            f"payload length mismatch: expected {count} bytes for dims {dims}, "
            f"got {len(raw) - header}",
            offset=header,
        )
    return np.frombuffer(raw, dtype=np.uint8, offset=header).reshape(dims)


def load_idx(image_path, label_path):
    """Parse an IDX image/label pair (optionally gzipped) into uint8 arrays."""
    images = parse_idx(_read_bytes(image_path), IMAGE_MAGIC)
    labels = parse_idx(_read_bytes(label_path), LABEL_MAGIC)
    if images.ndim != 3 or labels.ndim != 1:
        raise FormatError(f"unexpected IDX ranks {images.shape} / {labels.shape}")
    if len(images) != len(labels):
        raise FormatError(f"{len(images)} images but {len(labels)} labels")
    return images, labels


def write_idx(path, array):
    """Write a uint8 array in IDX format (gzip if ``path`` ends in .gz)."""
    array = np.ascontiguousarray(array, dtype=np.uint8)
    header = struct.pack(">I", 0x0800 | array.ndim) + struct.pack(">" + "I" * array.ndim, *array.shape)
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "wb") as fh:
        fh.write(header + array.tobytes())


def triangle_weights(n_in, n_out):
    """Row-normalised bilinear (triangle) resampling matrix ``(n_out, n_in)``.

    For downscaling the triangle is stretched to the output pixel pitch, so
    every input pixel contributes (antialiased bilinear).
    """
    scale = n_in / n_out
    support = max(scale, 1.0)
    centers = (np.arange(n_out) + 0.5) * scale
    src = np.arange(n_in) + 0.5
    w = np.clip(1.0 - np.abs(src[None, :] - centers[:, None]) / support, 0.0, None)
    return w / w.sum(axis=1, keepdims=True)


_W16 = triangle_weights(28, 16)


def downsample_16(images):
    """28x28 uint8 images -> 16x16 floats in [0, 1] (bilinear, then /255)."""
    images = np.asarray(images, dtype=float)
    if images.shape[-2:] != (28, 28):
        raise ConfigurationError(f"expected 28x28 images, got {images.shape[-2:]}")
    out = _W16 @ images @ _W16.T / 255.0
    return np.clip(out, 0.0, 1.0)


@dataclass
class SplitSpec:
    classes: tuple = (1, 9)
    train: int = 11633
    valid: int = 1058
    test: int | None = None  # None: everything available for test
    seed: int = 0

    def __post_init__(self):
        self.classes = tuple(sorted(int(c) for c in self.classes))
        if len(set(self.classes)) < 2:
            raise ConfigurationError("need at least two distinct classes")


def _select(images, labels, classes):
    mask = np.isin(labels, classes)
    lookup = {d: i for i, d in enumerate(classes)}
    feats = downsample_16(images[mask]).reshape(-1, 256)
    y = np.array([lookup[int(d)] for d in labels[mask]], dtype=np.int64)
    return feats, y


def build_splits(spec: SplitSpec, train_images, train_labels, test_images=None, test_labels=None):
    """Train/valid/test :class:`Dataset` objects over ``spec.classes``.

    Train and valid are drawn disjointly from the training source. The test
    split comes from the separate test source when given, otherwise it is a
    third disjoint block of the training source. Classes are numbered in
    ascending digit order.
    """
    missing = [c for c in spec.classes if not np.any(train_labels == c)]
    if missing:
        raise ConfigurationError(f"digits {missing} absent from source")
    rng = np.random.default_rng(spec.seed)
    feats, y = _select(train_images, train_labels, spec.classes)
    meta = {"classes": list(spec.classes), "seed": spec.seed}

    if test_images is None:
        n_test = spec.test if spec.test is not None else len(y) - spec.train - spec.valid
        tr, va, te = split_indices(len(y), [spec.train, spec.valid, n_test], rng)
        test_feats, test_y = feats[te], y[te]
    else:
        tr, va = split_indices(len(y), [spec.train, spec.valid], rng)
        test_feats, test_y = _select(test_images, test_labels, spec.classes)
        if spec.test is not None:
            (te,) = split_indices(len(test_y), [spec.test], rng)
            test_feats, test_y = test_feats[te], test_y[te]

    def make(f, lab, name):
        return Dataset(f, lab, spec.classes, meta={**meta, "split": name})

    return (
        make(feats[tr], y[tr], "train"),
        make(feats[va], y[va], "valid"),
        make(test_feats, test_y, "test"),
    )
