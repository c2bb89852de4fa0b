"""Adam over a list of numpy parameter arrays."""

from __future__ import annotations

import numpy as np


class Adam:
    def __init__(self, learning_rate=0.005, beta1=0.9, beta2=0.999, eps=1e-8):
        if learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m = None
        self._v = None

    def step(self, params, grads):
        """Return updated copies of ``params``; the moment buffers are kept here."""
        if self._m is None:
            self._m = [np.zeros_like(p) for p in params]
            self._v = [np.zeros_like(p) for p in params]
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        lr_t = self.learning_rate * np.sqrt(1 - b2**self.t) / (1 - b1**self.t)
        out = []
        for i, (p, g) in enumerate(zip(params, grads)):
            self._m[i] = b1 * self._m[i] + (1 - b1) * g
            self._v[i] = b2 * self._v[i] + (1 - b2) * g * g
            out.append(p - lr_t * self._m[i] / (np.sqrt(self._v[i]) + self.eps))
        return out
