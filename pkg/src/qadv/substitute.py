"""Classical feed-forward substitute network and black-box transfer attacks.

The network is plain numpy: dense layers with ReLU, inverted dropout after
the first hidden layer, softmax output, cross-entropy loss, Adam updates.
Adversarial images are crafted against it in pixel space and only then
shown to the quantum victim.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .attacks import AttackConfig, AttackReport, AttackResult, fidelity
from .classifier import amplitude_encode, predict
from .errors import ConfigurationError, TrainingError
from .optim import Adam

log = logging.getLogger(__name__)

DEFAULT_LAYERS = (256, 512, 53, 4)


def softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


@dataclass
class MLPModel:
    layer_sizes: tuple
    weights: list
    biases: list
    dropout: float = 0.1
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.layer_sizes = tuple(int(s) for s in self.layer_sizes)
        if len(self.weights) != len(self.layer_sizes) - 1:
            raise ConfigurationError("one weight matrix per layer transition expected")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (self.layer_sizes[i], self.layer_sizes[i + 1]):
                raise ConfigurationError(f"layer {i} weight shape {w.shape} is inconsistent")
            if b.shape != (self.layer_sizes[i + 1],):
                raise ConfigurationError(f"layer {i} bias shape {b.shape} is inconsistent")
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise ConfigurationError("weights must be finite")

    @classmethod
    def init(cls, layer_sizes=DEFAULT_LAYERS, seed=0, dropout=0.1, zero=False):
        """He-uniform weights, zero biases (``zero=True`` zeroes everything)."""
        rng = np.random.default_rng(seed)
        weights, biases = [], []
        for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
            if zero:
                weights.append(np.zeros((fan_in, fan_out)))
            else:
                lim = np.sqrt(6.0 / fan_in)
                weights.append(rng.uniform(-lim, lim, (fan_in, fan_out)))
            biases.append(np.zeros(fan_out))
        return cls(tuple(layer_sizes), weights, biases, dropout)

    @property
    def n_classes(self):
        return self.layer_sizes[-1]

    def params(self):
        return [*self.weights, *self.biases]

    def with_params(self, params):
        k = len(self.weights)
        return MLPModel(self.layer_sizes, list(params[:k]), list(params[k:]),
                        self.dropout, dict(self.metadata))

    def forward(self, x, rng=None):
        """Softmax probabilities; dropout is active only when ``rng`` is given."""
        return self._forward(x, rng)[0]

    def _forward(self, x, rng=None):
        acts, masks = [np.asarray(x, dtype=float)], []
        h = acts[0]
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = h @ w + b
            if i == last:
                return softmax(z), acts, masks
            h = np.maximum(z, 0.0)
            mask = None
            if i == 0 and rng is not None and self.dropout > 0:
                keep = 1.0 - self.dropout
                mask = (rng.random(h.shape) < keep) / keep
                h = h * mask
            masks.append(mask)
            acts.append(h)
        raise AssertionError("unreachable")

    def loss_and_grads(self, x, labels, rng=None, want_input=False):
        """Mean cross-entropy, parameter gradients and optionally ``dL/dx``."""
        labels = np.asarray(labels)
        probs, acts, masks = self._forward(x, rng)
        n = len(labels)
        rows = np.arange(n)
        value = float(np.mean(-np.log(np.maximum(probs[rows, labels], 1e-300))))
        delta = probs.copy()
        delta[rows, labels] -= 1.0
        delta /= n
        gw, gb = [None] * len(self.weights), [None] * len(self.weights)
        for i in reversed(range(len(self.weights))):
            gw[i] = acts[i].T @ delta
            gb[i] = delta.sum(axis=0)
            if i == 0 and not want_input:
                break
            delta = delta @ self.weights[i].T
            if i > 0:
                if masks[i - 1] is not None:
                    delta = delta * masks[i - 1]
                delta = delta * (acts[i] > 0)
        grads = [*gw, *gb]
        return (value, grads, delta * n) if want_input else (value, grads)

    def input_gradient(self, x, labels):
        """Per-sample ``dL_i/dx_i`` with dropout disabled."""
        return self.loss_and_grads(x, labels, want_input=True)[2]

    def predict(self, x):
        p = self.forward(x)
        return p.argmax(axis=1), p.max(axis=1)


@dataclass
class MLPTrainConfig:
    learning_rate: float = 1e-3
    batch_size: int = 256
    epochs: int = 30
    seed: int = 0


def mlp_train(model: MLPModel, train_set, config: MLPTrainConfig, valid_set=None):
    """Mini-batch Adam with inverted dropout; returns the model and epoch history."""
    if config.learning_rate <= 0 or config.batch_size < 1:
        raise ConfigurationError("invalid MLP training configuration")
    if train_set.features.shape[1] != model.layer_sizes[0]:
        raise ConfigurationError("feature width does not match the input layer")
    rng = np.random.default_rng(config.seed)
    opt = Adam(config.learning_rate)
    x, y = train_set.features, train_set.labels
    history = []
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(y))
        total = 0.0
        for start in range(0, len(order), config.batch_size):
            idx = order[start : start + config.batch_size]
            value, grads = model.loss_and_grads(x[idx], y[idx], rng)
            if not np.isfinite(value):
                raise TrainingError("non-finite loss", epoch)
            model = model.with_params(opt.step(model.params(), grads))
            total += value * len(idx)
        row = {"epoch": epoch, "train_loss": total / len(y),
               "train_accuracy": float(np.mean(model.predict(x)[0] == y))}
        if valid_set is not None:
            row["valid_accuracy"] = float(np.mean(model.predict(valid_set.features)[0]
                                                  == valid_set.labels))
        history.append(row)
    model.metadata["epochs"] = config.epochs
    return model, history


def mlp_to_dict(model: MLPModel):
    return {
        "layer_sizes": list(model.layer_sizes),
        "weights": [w.ravel().tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
        "dropout": model.dropout,
        "metadata": model.metadata,
    }


def mlp_from_dict(doc):
    try:
        sizes = [int(s) for s in doc["layer_sizes"]]
        weights = [np.asarray(w, dtype=float).reshape(a, b)
                   for w, a, b in zip(doc["weights"], sizes[:-1], sizes[1:])]
        biases = [np.asarray(b, dtype=float) for b in doc["biases"]]
        return MLPModel(tuple(sizes), weights, biases, float(doc.get("dropout", 0.1)),
                        dict(doc.get("metadata", {})))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(f"malformed MLP checkpoint: {exc}") from exc


def save_mlp(model, path):
    with open(path, "w") as fh:
        json.dump(mlp_to_dict(model), fh)


def load_mlp(path):
    with open(path) as fh:
        return mlp_from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# transfer attacks


def pixel_attack(model: MLPModel, images, labels, config: AttackConfig):
    """Signed-gradient FGSM/BIM/MIM against the substitute, clipped to [0, 1]."""
    if config.method not in ("fgsm", "bim", "mim"):
        raise ConfigurationError(f"{config.method} is not a transfer-attack method")
    x0 = np.asarray(images, dtype=float)
    labels = np.asarray(labels)
    target = labels if config.target is None else np.full_like(labels, config.target)
    direction = 1.0 if config.target is None else -1.0
    x = x0.copy()
    momentum = np.zeros_like(x)
    for _ in range(config.iterations):
        grad = model.input_gradient(x, target)
        if config.method == "mim":
            l1 = np.sum(np.abs(grad), axis=1, keepdims=True)
            momentum = config.mim_decay * momentum + grad / np.where(l1 > 0, l1, 1.0)
            grad = momentum
        x = np.clip(x + direction * config.alpha * np.sign(grad), 0.0, 1.0)
    return x


def transfer_attack(substitute: MLPModel, victim, dataset, config: AttackConfig):
    """Craft adversarial images on ``substitute`` and score them on ``victim``.

    The victim is touched only after all images exist. Returns the victim's
    attack report plus the clean accuracy ``alpha_q`` and the drop.
    """
    if substitute.n_classes != victim.n_classes:
        raise ConfigurationError(
            f"substitute has {substitute.n_classes} classes, victim {victim.n_classes}"
        )
    if dataset.labels.max() >= victim.n_classes:
        raise ConfigurationError("dataset labels exceed the class set")
    adv = pixel_attack(substitute, dataset.features, dataset.labels, config)
    clean_states = amplitude_encode(dataset.features, victim.n_data)
    adv_states = amplitude_encode(adv, victim.n_data)
    pred0, conf0 = predict(victim, clean_states)
    pred1, conf1 = predict(victim, adv_states)
    fid = fidelity(clean_states, adv_states)
    labels = dataset.labels
    trace = {
        "fidelity": np.stack([np.ones(len(labels)), fid]),
        "loss": np.full((2, len(labels)), np.nan),
        "pred": np.stack([pred0, pred1]),
        "conf": np.stack([conf0, conf1]),
    }
    result = AttackResult(
        states=adv_states, original=clean_states, labels=labels, fidelity=fid,
        pred_before=pred0, conf_before=conf0, pred_after=pred1, conf_after=conf1,
        success=pred1 != labels, found=np.ones(len(labels), dtype=bool), trace=trace,
        features=adv, sample_ids=np.arange(len(labels)),
    )
    alpha_q = float(np.mean(pred0 == labels))
    alpha_adv = float(np.mean(pred1 == labels))
    report = AttackReport(
        config=config, accuracy=alpha_adv, mean_fidelity=float(np.mean(fid)),
        clean_accuracy=alpha_q, success_rate=float(np.mean(result.success)),
        n_samples=len(labels), n_not_found=0,
        curve=[(0, alpha_q, 1.0), (1, alpha_adv, float(np.mean(fid)))], result=result,
    )
    return report, {"alpha_q": alpha_q, "alpha_q_adv": alpha_adv, "drop": alpha_q - alpha_adv}
