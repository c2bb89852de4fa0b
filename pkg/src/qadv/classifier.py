"""Layered variational circuit classifier.

Each of the ``depth`` layers applies a CNOT entangler followed by an Euler
rotation ``Z_c X_b Z_a`` on every qubit. The input register holds the
amplitude-encoded sample, the output register starts in ``|1...1>``, and the
class probabilities are the diagonal of the output register's reduced
density matrix.
"""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import simulator as sim
from .errors import ConfigurationError, InputError, TrainingError
from .losses import class_probabilities, cross_entropy, cross_entropy_weights
from .optim import Adam

log = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1


def chain_entangler(n_qubits):
    return [(q, q + 1) for q in range(n_qubits - 1)]


def output_qubits_for(n_classes):
    """Smallest ``m`` with ``2**(m-1) < K <= 2**m``."""
    if n_classes < 2:
        raise ConfigurationError("need at least two classes")
    return max(1, math.ceil(math.log2(n_classes)))


@dataclass
class CircuitModel:
    n_data: int
    m_output: int
    depth: int
    theta: np.ndarray
    entangler: list = None
    n_classes: int = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.n_qubits
        self.theta = np.asarray(self.theta, dtype=float).reshape(self.depth, n, 3)
        if not np.all(np.isfinite(self.theta)):
            raise InputError("theta contains non-finite angles")
        if self.n_classes is None:
            self.n_classes = 1 << self.m_output
        if not (1 << (self.m_output - 1) < self.n_classes <= 1 << self.m_output):
            raise ConfigurationError(
                f"{self.n_classes} classes need {output_qubits_for(self.n_classes)} "
                f"output qubits, got {self.m_output}"
            )
        if self.entangler is None:
            self.entangler = [chain_entangler(n) for _ in range(self.depth)]
        self.entangler = [[tuple(int(q) for q in pair) for pair in layer] for layer in self.entangler]
        if len(self.entangler) != self.depth:
            raise ConfigurationError("need one entangler list per layer")
        self._perms = [sim.cnot_permutation(layer, n) for layer in self.entangler]
        self._inv = [np.argsort(p) for p in self._perms]

    @classmethod
    def random(cls, n_data, n_classes, depth, seed=0, entangler=None):
        """Angles drawn i.i.d. uniform on ``[0, 2 pi)``."""
        m = output_qubits_for(n_classes)
        rng = np.random.default_rng(seed)
        theta = rng.uniform(0.0, 2 * np.pi, size=(depth, n_data + m, 3))
        return cls(n_data, m, depth, theta, entangler, n_classes, {"seed": seed})

    @property
    def n_qubits(self):
        return self.n_data + self.m_output

    @property
    def n_params(self):
        return self.theta.size

    def with_theta(self, theta):
        return CircuitModel(
            self.n_data, self.m_output, self.depth, np.array(theta, dtype=float),
            self.entangler, self.n_classes, dict(self.metadata),
        )

    # -- circuit closure -------------------------------------------------

    def apply(self, states):
        """``U(theta)`` on batched full-register states."""
        n = self.n_qubits
        states = np.asarray(states, dtype=complex)
        shape = states.shape
        states = states.reshape(-1, 1 << n)
        gates = sim.euler_zxz(self.theta)
        for layer in range(self.depth):
            states = states[:, self._perms[layer]]
            for q in range(n):
                states = sim.apply_1q(states, gates[layer, q], q, n)
        return states.reshape(shape)

    def apply_adjoint(self, states):
        n = self.n_qubits
        states = np.asarray(states, dtype=complex)
        shape = states.shape
        states = states.reshape(-1, 1 << n)
        gates_dag = np.conj(np.swapaxes(sim.euler_zxz(self.theta), -1, -2))
        for layer in reversed(range(self.depth)):
            for q in reversed(range(n)):
                states = sim.apply_1q(states, gates_dag[layer, q], q, n)
            states = states[:, self._inv[layer]]
        return states.reshape(shape)

    def prepare(self, inputs):
        """Embed normalised data-register states next to the ``|1...1>`` ancillas."""
        inputs = np.asarray(inputs)
        if inputs.shape[-1] != 1 << self.n_data:
            raise ConfigurationError(
                f"input length {inputs.shape[-1]} does not match {self.n_data} data qubits"
            )
        return sim.embed_input(inputs, self.m_output)


# ---------------------------------------------------------------------------
# encoding and inference


def amplitude_encode(features, n_data):
    """Zero-pad ``features`` to ``2**n_data`` entries and l2-normalise.

    Works row-wise on 2-D input. Returns real amplitudes.
    """
    x = np.asarray(features, dtype=float)
    dim = 1 << n_data
    if x.shape[-1] > dim:
        raise ConfigurationError(f"{x.shape[-1]} features do not fit in {n_data} qubits")
    if x.shape[-1] < dim:
        pad = [(0, 0)] * (x.ndim - 1) + [(0, dim - x.shape[-1])]
        x = np.pad(x, pad)
    norms = np.linalg.norm(x, axis=-1, keepdims=True)
    if np.any(norms == 0):
        raise InputError("cannot amplitude-encode an all-zero feature vector")
    return x / norms


def n_data_for(n_features):
    return max(1, math.ceil(math.log2(n_features)))


def forward(model: CircuitModel, inputs):
    """Output-register distribution ``g`` for one or many data-register states."""
    return sim.output_probabilities(model.apply(model.prepare(inputs)), model.m_output)


def loss(probs, label, n_classes=None):
    """Cross-entropy ``-sum_k a_k log g_k`` (``g`` clamped at 1e-12)."""
    return cross_entropy(probs, label, n_classes)


def predict(model: CircuitModel, inputs):
    """Predicted class index and its (class-renormalised) probability."""
    p = class_probabilities(forward(model, inputs), model.n_classes)
    cls = np.argmax(p, axis=-1)  # first maximum wins ties
    conf = np.take_along_axis(p, np.expand_dims(cls, -1), axis=-1)[..., 0]
    return cls, conf


def predict_probs(probs, n_classes=None):
    p = class_probabilities(probs, n_classes)
    cls = np.argmax(p, axis=-1)
    return cls, np.take_along_axis(p, np.expand_dims(cls, -1), axis=-1)[..., 0]


# ---------------------------------------------------------------------------
# gradients


def parameter_shift_gradient(model: CircuitModel, inputs, labels):
    """Batch-mean loss gradient via the pi/2 shift rule on each ``g_k``.

    Each measured probability is shifted exactly; the nonlinear loss is then
    chained through ``dL/dg_k``. Costs two forward passes per angle.
    """
    inputs = np.atleast_2d(inputs)
    if len(inputs) == 0:
        raise InputError("empty batch")
    probs = forward(model, inputs)
    w = cross_entropy_weights(probs, labels, model.n_classes)
    grad = np.zeros_like(model.theta)
    base = model.theta
    for idx in np.ndindex(base.shape):
        plus, minus = base.copy(), base.copy()
        plus[idx] += np.pi / 2
        minus[idx] -= np.pi / 2
        dg = 0.5 * (forward(model.with_theta(plus), inputs) - forward(model.with_theta(minus), inputs))
        grad[idx] = np.mean(np.sum(w * dg, axis=1))
    return grad


def _backward(model, psi, lam, want_theta=True):
    """Adjoint sweep: un-apply the circuit from ``psi``/``lam`` at the output.

    Returns ``(grad_theta_sum, lam_at_input)`` where ``grad_theta_sum`` is the
    batch-summed derivative of ``<psi|O|psi>`` with ``lam = O psi``.
    """
    n = model.n_qubits
    gates = sim.euler_zxz(model.theta)
    gates_dag = np.conj(np.swapaxes(gates, -1, -2))
    dgates = sim.euler_zxz_derivatives(model.theta) if want_theta else None
    grad = np.zeros_like(model.theta) if want_theta else None
    for layer in reversed(range(model.depth)):
        for q in reversed(range(n)):
            psi = sim.apply_1q(psi, gates_dag[layer, q], q, n)
            if want_theta:
                b = sim._split(np.conj(lam), q, n)
                k = sim._split(psi, q, n)
                m = np.einsum("xasc,xatc->st", b, k)
                grad[layer, q] = 2.0 * np.real(np.einsum("kst,st->k", dgates[layer, q], m))
            lam = sim.apply_1q(lam, gates_dag[layer, q], q, n)
        psi = psi[:, model._inv[layer]]
        lam = lam[:, model._inv[layer]]
    return grad, lam


def loss_and_gradient(model: CircuitModel, inputs, labels, threads=1):
    """Mean loss, its exact gradient in ``theta`` (adjoint mode), and the probs.

    Numerically identical to :func:`parameter_shift_gradient` up to rounding,
    at the cost of roughly three forward passes.
    """
    inputs = np.atleast_2d(inputs)
    labels = np.asarray(labels)
    if len(inputs) == 0:
        raise InputError("empty batch")

    def chunk(sl):
        psi = model.apply(model.prepare(inputs[sl]))
        probs = sim.output_probabilities(psi, model.m_output)
        w = cross_entropy_weights(probs, labels[sl], model.n_classes)
        lam = sim.weighted_projector(psi, w, model.m_output)
        grad, _ = _backward(model, psi, lam)
        return grad, probs

    if threads <= 1 or len(inputs) < 2 * threads:
        grad, probs = chunk(slice(None))
    else:
        bounds = np.linspace(0, len(inputs), threads + 1).astype(int)
        slices = [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:])]
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(chunk, slices))
        grad = sum((p[0] for p in parts), np.zeros_like(model.theta))
        probs = np.concatenate([p[1] for p in parts])
    losses = cross_entropy(probs, labels, model.n_classes)
    return float(np.mean(losses)), grad / len(inputs), probs


# ---------------------------------------------------------------------------
# training


@dataclass
class TrainConfig:
    learning_rate: float = 0.005
    batch_size: int = 256
    epochs: int = 20
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    threads: int = 1
    gradient: str = "adjoint"  # or "shift"

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ConfigurationError("learning_rate must be positive")
        if self.batch_size < 1:
            raise ConfigurationError("batch_size must be >= 1")
        if self.gradient not in ("adjoint", "shift"):
            raise ConfigurationError(f"unknown gradient mode {self.gradient!r}")


@dataclass
class ExperimentRecord:
    epoch: int
    split: str
    loss: float
    accuracy: float
    extra: dict = field(default_factory=dict)


def evaluate(model: CircuitModel, inputs, labels, chunk=1024):
    """Mean loss and accuracy over encoded ``inputs``."""
    inputs = np.atleast_2d(inputs)
    labels = np.asarray(labels)
    probs = np.concatenate(
        [forward(model, inputs[i : i + chunk]) for i in range(0, len(inputs), chunk)]
    )
    losses = cross_entropy(probs, labels, model.n_classes)
    pred, _ = predict_probs(probs, model.n_classes)
    return float(np.mean(losses)), float(np.mean(pred == labels))


def encode_dataset(dataset, n_data):
    return amplitude_encode(dataset.features, n_data)


def batch_gradient(model, inputs, labels, config: TrainConfig):
    if config.gradient == "shift":
        probs = forward(model, inputs)
        value = float(np.mean(cross_entropy(probs, labels, model.n_classes)))
        return value, parameter_shift_gradient(model, inputs, labels)
    value, grad, _ = loss_and_gradient(model, inputs, labels, config.threads)
    return value, grad


def train(model: CircuitModel, train_set, valid_set, config: TrainConfig, callback=None):
    """Mini-batch Adam; returns the best-validation model and per-epoch records.

    Records for epoch 0 describe the initial parameters.
    """
    if len(train_set) == 0 or len(valid_set) == 0:
        raise ConfigurationError("training and validation sets must be non-empty")
    for ds in (train_set, valid_set):
        if ds.labels.max() >= model.n_classes:
            raise ConfigurationError("labels exceed the model's class count")
    x_train = encode_dataset(train_set, model.n_data)
    x_valid = encode_dataset(valid_set, model.n_data)
    rng = np.random.default_rng(config.seed)
    opt = Adam(config.learning_rate, config.beta1, config.beta2, config.eps)

    records = []

    def record(epoch, m):
        for split, x, y in (("train", x_train, train_set.labels), ("valid", x_valid, valid_set.labels)):
            value, acc = evaluate(m, x, y)
            if not np.isfinite(value):
                raise TrainingError("non-finite loss", epoch)
            records.append(ExperimentRecord(epoch, split, value, acc))
        return records[-1].accuracy

    best_acc = record(0, model)
    best = model
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(train_set))
        for start in range(0, len(order), config.batch_size):
            idx = order[start : start + config.batch_size]
            value, grad = batch_gradient(model, x_train[idx], train_set.labels[idx], config)
            if not np.isfinite(value) or not np.all(np.isfinite(grad)):
                raise TrainingError("non-finite loss", epoch)
            (theta,) = opt.step([model.theta], [grad])
            model = model.with_theta(theta)
        acc = record(epoch, model)
        log.info("epoch %d valid_acc=%.4f", epoch, acc)
        if callback is not None:
            callback(epoch, model, records)
        if acc > best_acc:
            best_acc, best = acc, model
    best.metadata.update({"epoch": next(
        r.epoch for r in records if r.split == "valid" and r.accuracy == best_acc
    )})
    return best, records


# ---------------------------------------------------------------------------
# checkpoints


def model_to_dict(model: CircuitModel):
    return {
        "version": CHECKPOINT_VERSION,
        "n_data": model.n_data,
        "m_output": model.m_output,
        "depth": model.depth,
        "n_classes": model.n_classes,
        "entangler": [[list(p) for p in layer] for layer in model.entangler],
        "theta": [float(v) for v in model.theta.ravel()],
        "metadata": model.metadata,
    }


def model_from_dict(doc):
    try:
        if doc["version"] != CHECKPOINT_VERSION:
            raise ConfigurationError(f"unsupported checkpoint version {doc['version']}")
        return CircuitModel(
            int(doc["n_data"]),
            int(doc["m_output"]),
            int(doc["depth"]),
            np.asarray(doc["theta"], dtype=float),
            doc["entangler"],
            int(doc.get("n_classes") or (1 << int(doc["m_output"]))),
            dict(doc.get("metadata", {})),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(f"malformed model checkpoint: {exc}") from exc


def save_model(model, path):
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh, indent=1)


def load_model(path):
    with open(path) as fh:
        return model_from_dict(json.load(fh))
