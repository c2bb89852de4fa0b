"""Cross-entropy over measured output-register probabilities.

The probabilities ``g`` have one entry per output basis state (length
``2**m``). When the number of classes ``K`` is smaller than ``2**m`` only the
first ``K`` entries are used and renormalised, so the loss is always taken
over a proper distribution over classes.
"""

from __future__ import annotations

import numpy as np

LOG_CLAMP = 1e-12


def class_probabilities(probs, n_classes=None):
    """Restrict ``probs`` (..., 2**m) to the first ``n_classes`` and renormalise."""
    probs = np.asarray(probs, dtype=float)
    if n_classes is None or n_classes == probs.shape[-1]:
        return probs
    head = probs[..., :n_classes]
    total = head.sum(axis=-1, keepdims=True)
    return head / np.where(total > 0, total, 1.0)


def cross_entropy(probs, labels, n_classes=None):
    """Per-sample loss ``-log g_y`` with ``g`` clamped below at 1e-12.

    ``labels`` are integer class indices (one-hot vectors are accepted too).
    """
    p = class_probabilities(probs, n_classes)
    labels = _as_index(labels, p.shape[-1])
    picked = np.take_along_axis(np.atleast_2d(p), labels.reshape(-1, 1), axis=-1)[:, 0]
    out = -np.log(np.maximum(picked, LOG_CLAMP))
    return out if np.ndim(probs) > 1 else out[0]


def cross_entropy_weights(probs, labels, n_classes=None):
    """Derivative of :func:`cross_entropy` with respect to every raw ``g_k``.

    Returns an array shaped like ``probs`` (batched as ``(B, 2**m)``). Samples
    whose class probability sits below the clamp get zero weight, because the
    clamped loss is locally constant there.
    """
    probs = np.atleast_2d(np.asarray(probs, dtype=float))
    dim = probs.shape[-1]
    k = dim if n_classes is None else n_classes
    labels = _as_index(labels, k)
    rows = np.arange(len(probs))
    w = np.zeros_like(probs)
    if k == dim:
        g_true = probs[rows, labels]
        live = g_true >= LOG_CLAMP
        w[rows[live], labels[live]] = -1.0 / g_true[live]
        return w
    total = probs[:, :k].sum(axis=1)
    g_true = probs[rows, labels]
    live = (g_true >= LOG_CLAMP * total) & (total > 0)
    w[live, :k] = (1.0 / total[live])[:, None]
    w[rows[live], labels[live]] -= 1.0 / g_true[live]
    return w


def _as_index(labels, n_classes):
    # 2-D arrays and 1-D float arrays are one-hot rows; anything else holds indices.
    labels = np.asarray(labels)
    if labels.ndim == 2 or (labels.ndim == 1 and labels.dtype.kind == "f"):
        labels = np.atleast_2d(labels).argmax(axis=-1)
    labels = np.atleast_1d(labels).astype(np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
        raise ValueError(f"label out of range for {n_classes} classes")
    return labels
