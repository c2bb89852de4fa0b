"""In-memory labelled dataset shared by the data generators, training and attacks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, InputError


@dataclass
class Dataset:
    """Raw feature rows with integer class labels.

    ``features`` are the pre-encoding real vectors (pixels in [0, 1], time-of-
    flight densities, or already-normalised ground-state amplitudes).
    ``class_names`` maps class index -> original label (e.g. digit 9 -> class 1).
    ``params`` optionally carries one row of physical parameters per sample.
    """

    features: np.ndarray
    labels: np.ndarray
    class_names: tuple = ()
    params: np.ndarray | None = None
    param_names: tuple = ()
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2:
            raise InputError("features must be a 2-D array")
        if len(self.features) != len(self.labels):
            raise InputError(
                f"{len(self.features)} feature rows but {len(self.labels)} labels"
            )
        if not self.class_names:
            self.class_names = tuple(range(int(self.labels.max(initial=-1)) + 1))
        self.class_names = tuple(self.class_names)
        if self.params is not None:
            self.params = np.asarray(self.params, dtype=float)

    def __len__(self):
        return len(self.labels)

    @property
    def n_classes(self):
        return len(self.class_names)

    def subset(self, index):
        index = np.asarray(index)
        return Dataset(
            self.features[index],
            self.labels[index],
            self.class_names,
            None if self.params is None else self.params[index],
            self.param_names,
            dict(self.meta),
        )

    def one_hot(self, width=None):
        width = self.n_classes if width is None else width
        out = np.zeros((len(self), width))
        out[np.arange(len(self)), self.labels] = 1.0
        return out

    def class_counts(self):
        return np.bincount(self.labels, minlength=self.n_classes)


def split_indices(n, sizes, rng):
    """Disjoint random index blocks of the requested ``sizes``."""
    if sum(sizes) > n:
        raise ConfigurationError(f"requested {sum(sizes)} samples but only {n} available")
    order = rng.permutation(n)
    out, start = [], 0
    for s in sizes:
        out.append(np.sort(order[start : start + s]))
        start += s
    return out
