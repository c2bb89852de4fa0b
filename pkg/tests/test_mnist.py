import gzip
import struct

import numpy as np
import pytest

from qadv.data import mnist
from qadv.data.mnist import SplitSpec
from qadv.errors import ConfigurationError, FormatError


def idx_bytes(array, magic=None):
    array = np.asarray(array, dtype=np.uint8)
    magic = 0x0800 | array.ndim if magic is None else magic
    return struct.pack(">I", magic) + struct.pack(">" + "I" * array.ndim, *array.shape) + array.tobytes()


def test_parse_round_trip(tmp_path):
    arr = np.arange(2 * 28 * 28, dtype=np.uint8).reshape(2, 28, 28)
    for name in ("a.idx", "a.idx.gz"):
        mnist.write_idx(tmp_path / name, arr)
        mnist.write_idx(tmp_path / (name + "l"), np.array([3, 7]))
        im, lab = mnist.load_idx(tmp_path / name, tmp_path / (name + "l"))
        np.testing.assert_array_equal(im, arr)
        np.testing.assert_array_equal(lab, [3, 7])
    assert gzip.open(tmp_path / "a.idx.gz").read(4) == b"\x00\x00\x08\x03"


def test_bad_magic_reports_offset():
    with pytest.raises(FormatError) as exc:
        mnist.parse_idx(b"\x00\x00\x09\x01" + b"\x00" * 8)
    assert exc.value.offset == 0


def test_wrong_kind_rejected():
    with pytest.raises(FormatError):
        mnist.parse_idx(idx_bytes([1, 2, 3]), mnist.IMAGE_MAGIC)


def test_truncated_payload():
    raw = idx_bytes(np.zeros((2, 28, 28)))[:-5]
    with pytest.raises(FormatError) as exc:
        mnist.parse_idx(raw)
    assert exc.value.offset == 16
    with pytest.raises(FormatError):
        mnist.parse_idx(b"\x00\x00")


def test_count_mismatch(tmp_path):
    (tmp_path / "i").write_bytes(idx_bytes(np.zeros((3, 28, 28))))
    (tmp_path / "l").write_bytes(idx_bytes(np.zeros(2)))
    with pytest.raises(FormatError):
        mnist.load_idx(tmp_path / "i", tmp_path / "l")


def test_downsample_constant_and_zero():
    out = mnist.downsample_16(np.full((1, 28, 28), 255))
    np.testing.assert_allclose(out, 1.0, atol=1e-12)
    assert mnist.downsample_16(np.zeros((28, 28))).max() == 0.0
    with pytest.raises(ConfigurationError):
        mnist.downsample_16(np.zeros((27, 28)))


def test_downsample_single_pixel_mass():
    # one bright pixel: total intensity is conserved up to the area ratio
    img = np.zeros((28, 28))
    img[13, 9] = 255
    out = mnist.downsample_16(img)
    ratio = out.sum() * (28 / 16) ** 2
    assert ratio == pytest.approx(1.0, rel=0.25)


def test_triangle_weights_rows_normalised():
    w = mnist.triangle_weights(28, 16)
    np.testing.assert_allclose(w.sum(axis=1), 1.0)
    assert np.all(w.sum(axis=0) > 0)


def synthetic_source(per_digit, seed=0):
    rng = np.random.default_rng(seed)
    labels = np.repeat(np.arange(10), per_digit)
    images = rng.integers(0, 256, (len(labels), 28, 28), dtype=np.uint8)
    return images, labels


def test_splits_disjoint_deterministic_and_ordered():
    images, labels = synthetic_source(60)
    spec = SplitSpec((9, 1), 50, 20, 30, seed=5)
    a = mnist.build_splits(spec, images, labels)
    b = mnist.build_splits(spec, images, labels)
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x.features, y.features)
    rows = np.concatenate([d.features for d in a])
    assert len(np.unique(rows, axis=0)) == 100
    assert a[0].class_names == (1, 9)
    assert set(a[0].labels) == {0, 1}
    assert a[0].features.shape[1] == 256 and a[0].features.max() <= 1.0


def test_split_class_balance_roughly_follows_source():
    images, labels = synthetic_source(200)
    tr, _, _ = mnist.build_splits(SplitSpec((1, 9), 300, 50, 50), images, labels)
    assert 0.4 < tr.labels.mean() < 0.6


def test_full_mnist_split_sizes():
    # 1-vs-9 has 6742 + 5949 training digits and 1135 + 1009 test digits
    counts = np.zeros(10, int)
    counts[1], counts[9] = 6742, 5949
    labels = np.repeat(np.arange(10), counts)
    images = np.zeros((len(labels), 28, 28), np.uint8)
    t_labels = np.repeat([1, 9], [1135, 1009])
    t_images = np.zeros((len(t_labels), 28, 28), np.uint8)
    tr, va, te = mnist.build_splits(SplitSpec((1, 9)), images, labels, t_images, t_labels)
    assert (len(tr), len(va), len(te)) == (11633, 1058, 2144)


def test_missing_digit_and_too_many_requested():
    images, labels = synthetic_source(10)
    with pytest.raises(ConfigurationError):
        mnist.build_splits(SplitSpec((1, 9)), images[labels != 9], labels[labels != 9])
    with pytest.raises(ConfigurationError):
        mnist.build_splits(SplitSpec((1, 9), 15, 10, 0), images, labels)
    with pytest.raises(ConfigurationError):
        SplitSpec((3, 3))
