"""Adversarial training: the inner attack maximises the loss, Adam minimises it."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .attacks import AttackConfig, run_attack
from .classifier import (
    CircuitModel,
    ExperimentRecord,
    TrainConfig,
    batch_gradient,
    encode_dataset,
    evaluate,
)
from .errors import ConfigurationError, TrainingError
from .optim import Adam

log = logging.getLogger(__name__)


@dataclass
class DefenseConfig:
    inner_attack: AttackConfig = field(
        default_factory=lambda: AttackConfig.steps("bim", 3, 0.05)
    )
    outer: TrainConfig = field(default_factory=TrainConfig)
    mix_ratio: float = 0.5
    refresh: str = "epoch"  # or "step"
    attack_chunk: int = 256

    def __post_init__(self):
        if not 0.0 < self.mix_ratio <= 1.0:
            raise ConfigurationError("mix_ratio must lie in (0, 1]")
        if self.inner_attack.targeted:
            raise ConfigurationError("the inner attack must be untargeted")
        if self.refresh not in ("epoch", "step"):
            raise ConfigurationError(f"unknown refresh cadence {self.refresh!r}")


def adversarial_states(model, dataset, attack: AttackConfig, chunk=256, index=None):
    """Attacked, encoded inputs for ``dataset`` (clean rows where no perturbation exists)."""
    index = np.arange(len(dataset)) if index is None else np.asarray(index)
    parts = []
    for start in range(0, len(index), chunk):
        ids = index[start : start + chunk]
        res = run_attack(model, dataset.features[ids], dataset.labels[ids], attack, ids)
        states = res.states
        if not np.all(res.found):
            log.info("%d samples fall back to clean inputs", int(np.sum(~res.found)))
            states = np.where(res.found[:, None], states, res.original)
        parts.append(states)
    return np.concatenate(parts) if parts else np.empty((0, 1 << model.n_data))


def adversarial_evaluate(model, dataset, attack: AttackConfig, chunk=256):
    """Loss and accuracy of ``model`` on attacks freshly generated against it."""
    adv = adversarial_states(model, dataset, attack, chunk)
    return evaluate(model, adv, dataset.labels)


def adversarial_train(
    model: CircuitModel,
    train_set,
    valid_set,
    config: DefenseConfig,
    adv_test_set=None,
    callback=None,
):
    """Min-max training; returns the final model and per-epoch records.

    Each epoch (or each step, with ``refresh="step"``) regenerates adversarial
    counterparts against the current parameters. In every batch a
    ``mix_ratio`` fraction of rows is swapped for its adversarial version.
    Records carry ``adv_loss``/``adv_accuracy`` measured on ``adv_test_set``
    (default: the validation set) under freshly generated attacks.
    """
    if len(train_set) == 0 or len(valid_set) == 0:
        raise ConfigurationError("training and validation sets must be non-empty")
    outer = config.outer
    adv_test_set = valid_set if adv_test_set is None else adv_test_set
    x_train = encode_dataset(train_set, model.n_data)
    x_valid = encode_dataset(valid_set, model.n_data)
    order_rng = np.random.default_rng(outer.seed)
    mix_rng = np.random.default_rng([outer.seed, 1])
    opt = Adam(outer.learning_rate, outer.beta1, outer.beta2, outer.eps)
    records = []

    def record(epoch, m):
        adv_loss, adv_acc = adversarial_evaluate(m, adv_test_set, config.inner_attack,
                                                 config.attack_chunk)
        extra = {"adv_loss": adv_loss, "adv_accuracy": adv_acc}
        for split, x, y in (("train", x_train, train_set.labels),
                            ("valid", x_valid, valid_set.labels)):
            value, acc = evaluate(m, x, y)
            if not np.isfinite(value):
                raise TrainingError("non-finite loss", epoch)
            records.append(ExperimentRecord(epoch, split, value, acc, dict(extra)))

    record(0, model)
    for epoch in range(1, outer.epochs + 1):
        order = order_rng.permutation(len(train_set))
        adv_all = None
        if config.refresh == "epoch":
            adv_all = adversarial_states(model, train_set, config.inner_attack,
                                         config.attack_chunk)
        for start in range(0, len(order), outer.batch_size):
            idx = order[start : start + outer.batch_size]
            batch = x_train[idx].astype(complex) if config.mix_ratio < 1 else None
            n_adv = int(round(config.mix_ratio * len(idx)))
            pick = np.sort(mix_rng.permutation(len(idx))[:n_adv])
            if adv_all is not None:
                adv = adv_all[idx[pick]]
            else:
                adv = adversarial_states(model, train_set, config.inner_attack,
                                         config.attack_chunk, idx[pick])
            if batch is None:
                batch = np.empty((len(idx), x_train.shape[1]), dtype=adv.dtype)
                batch[:] = x_train[idx]
            batch[pick] = adv
            value, grad = batch_gradient(model, batch, train_set.labels[idx], outer)
            if not np.isfinite(value) or not np.all(np.isfinite(grad)):
                raise TrainingError("non-finite loss", epoch)
            (theta,) = opt.step([model.theta], [grad])
            model = model.with_theta(theta)
        record(epoch, model)
        last = records[-1]
        log.info("epoch %d valid_acc=%.4f adv_acc=%.4f", epoch, last.accuracy,
                 last.extra["adv_accuracy"])
        if callback is not None:
            callback(epoch, model, records)
    model.metadata.update({"epoch": outer.epochs, "defense": "adversarial"})
    return model, records
