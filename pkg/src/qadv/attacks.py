"""Adversarial attacks on circuit classifiers.

Additive attacks move the raw (zero-padded) feature vector with signed
gradient steps and rescale back to the original norm after every step, so the
encoded state is always the unit renormalisation of the working vector.
Functional attacks instead rotate the encoded state with a layer of local
Euler rotations ``U(omega)`` whose angles stay within ``[-eps, eps]``.

All attacks are vectorised over a batch of samples; per-sample randomness is
derived from ``(seed, sample_id)`` so results do not depend on batching.
"""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import simulator as sim
from .classifier import CircuitModel, predict_probs
from .errors import ConfigurationError, InputError
from .losses import cross_entropy, cross_entropy_weights

log = logging.getLogger(__name__)

METHODS = ("fgsm", "bim", "pgd", "mim", "zoo")
SPACES = ("additive", "functional")
DOMAINS = ("features", "state")


@dataclass
class AttackConfig:
    """Attack hyperparameters.

    ``step_size=None`` uses ``epsilon / iterations``. Configs quoted as
    ``BIM(T, s)`` are built with :meth:`steps`, which sets ``step_size=s`` and
    ``epsilon=T*s``.

    ``domain`` selects where additive steps are taken: on the raw feature
    vector (rescaled to its own norm after each step) or directly on the
    unit-norm encoded amplitudes. The two coincide for normalised inputs.
    """

    method: str = "fgsm"
    epsilon: float = 0.03
    iterations: int = 1
    step_size: float | None = None
    space: str = "additive"
    target: int | None = None
    mim_decay: float = 1.0
    pgd_restarts: int = 1
    pgd_start_radius: float | None = None
    zoo_h: float = 1e-3
    zoo_batch: int = 32
    domain: str = "features"
    seed: int = 0

    def __post_init__(self):
        self.method = self.method.lower()
        if self.method not in METHODS:
            raise ConfigurationError(f"unknown attack method {self.method!r}")
        if self.domain not in DOMAINS:
            raise ConfigurationError(f"unknown additive domain {self.domain!r}")
        if self.space not in SPACES:
            raise ConfigurationError(f"unknown attack space {self.space!r}")
        if self.epsilon < 0 or not np.isfinite(self.epsilon):
            raise ConfigurationError("epsilon must be finite and >= 0")
        if self.method == "fgsm" and self.iterations != 1:
            raise ConfigurationError("FGSM is a single step (iterations=1)")
        if self.iterations < 0 or (self.iterations == 0 and self.method != "zoo"):
            raise ConfigurationError("iterations must be >= 1")
        if self.step_size is not None and self.step_size < 0:
            raise ConfigurationError("step_size must be >= 0")
        if self.mim_decay < 0:
            raise ConfigurationError("mim_decay must be >= 0")
        if self.pgd_restarts < 1:
            raise ConfigurationError("pgd_restarts must be >= 1")
        if self.method == "zoo" and self.space != "additive":
            raise ConfigurationError("ZOO is only defined for additive perturbations")

    @classmethod
    def steps(cls, method, iterations, step_size, **kw):
        return cls(method, iterations * step_size, iterations, step_size, **kw)

    @property
    def alpha(self):
        if self.step_size is not None:
            return self.step_size
        return self.epsilon / max(self.iterations, 1)

    @property
    def targeted(self):
        return self.target is not None


def fidelity(a, b):
    """``|<a|b>|^2`` for (batched) normalised state vectors."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape[-1] != b.shape[-1]:
        raise InputError(f"state sizes differ: {a.shape[-1]} vs {b.shape[-1]}")
    f = np.abs(np.sum(np.conj(a) * b, axis=-1)) ** 2
    return np.clip(f, 0.0, 1.0)


# ---------------------------------------------------------------------------
# gradients with respect to the input


def _unit(x):
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def state_cotangent(model: CircuitModel, states, labels):
    """Loss, probs and ``lambda`` with ``dL = 2 Re <lambda|d phi>`` for inputs ``phi``."""
    psi = model.apply(model.prepare(states))
    probs = sim.output_probabilities(psi, model.m_output)
    w = cross_entropy_weights(probs, labels, model.n_classes)
    lam = model.apply_adjoint(sim.weighted_projector(psi, w, model.m_output))
    losses = cross_entropy(probs, labels, model.n_classes)
    return np.atleast_1d(losses), probs, sim.restrict_input(lam, model.m_output)


def feature_gradient(model: CircuitModel, x, labels):
    """Per-sample loss and ``dL/dx`` for raw (unnormalised) real vectors ``x``."""
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise InputError("zero-norm input has no amplitude encoding")
    x_hat = x / norms
    losses, probs, lam = state_cotangent(model, x_hat, labels)
    g_hat = 2.0 * np.real(lam)
    radial = np.sum(g_hat * x_hat, axis=1, keepdims=True)
    return losses, probs, (g_hat - radial * x_hat) / norms


def local_layer(omega):
    """Per-qubit Euler rotations ``(B, n, 2, 2)`` from angles ``(B, n, 3)``."""
    return sim.euler_zxz(omega)


def apply_local_layer(states, omega):
    n = omega.shape[1]
    mats = local_layer(omega)
    out = np.asarray(states, dtype=complex)
    for q in range(n):
        out = sim.apply_1q(out, mats[:, q], q, n)
    return out


def omega_gradient(model: CircuitModel, base, omega, labels):
    """Loss and ``dL/d omega`` for the functional perturbation ``U(omega)|base>``."""
    n = omega.shape[1]
    phi = apply_local_layer(base, omega)
    losses, probs, lam = state_cotangent(model, phi, labels)
    mats = local_layer(omega)
    dmats = sim.euler_zxz_derivatives(omega)  # (B, n, 3, 2, 2)
    grad = np.zeros_like(omega)
    for q in range(n):
        # ket with every rotation except qubit q applied
        partial = np.asarray(base, dtype=complex)
        for j in range(n):
            if j != q:
                partial = sim.apply_1q(partial, mats[:, j], j, n)
        for a in range(3):
            d_phi = sim.apply_1q(partial, dmats[:, q, a], q, n)
            grad[:, q, a] = 2.0 * np.real(np.sum(np.conj(lam) * d_phi, axis=1))
    return losses, probs, phi, grad


# ---------------------------------------------------------------------------
# results


@dataclass
class AttackResult:
    """Batch of adversarial samples plus per-iteration traces ``(T+1, B)``."""

    states: np.ndarray
    original: np.ndarray
    labels: np.ndarray
    fidelity: np.ndarray
    pred_before: np.ndarray
    conf_before: np.ndarray
    pred_after: np.ndarray
    conf_after: np.ndarray
    success: np.ndarray
    found: np.ndarray
    trace: dict
    features: np.ndarray | None = None
    omega: np.ndarray | None = None
    queries: np.ndarray | None = None
    sample_ids: np.ndarray | None = None

    def __len__(self):
        return len(self.labels)


def _signed(v):
    return np.sign(v)  # sign(0) = 0


class _Tracker:
    def __init__(self, model, original, labels, target):
        self.model = model
        self.original = original
        self.labels = labels
        self.target = target
        self.rows = {"fidelity": [], "loss": [], "pred": [], "conf": []}

    def __call__(self, states):
        probs = _forward_states(self.model, states)
        pred, conf = predict_probs(probs, self.model.n_classes)
        self.rows["fidelity"].append(fidelity(self.original, states))
        self.rows["loss"].append(cross_entropy(probs, self.labels, self.model.n_classes))
        self.rows["pred"].append(pred)
        self.rows["conf"].append(conf)
        return pred, conf

    def trace(self):
        return {k: np.array(v) for k, v in self.rows.items()}


def _forward_states(model, states):
    return sim.output_probabilities(model.apply(model.prepare(states)), model.m_output)


def _success(pred, labels, target):
    if target is None:
        return pred != labels
    return pred == target


def _attack_labels(labels, config, n_classes):
    """Labels the loss is taken against, and the sign of the step."""
    if config.target is None:
        return labels, 1.0
    if not 0 <= config.target < n_classes:
        raise ConfigurationError(f"target class {config.target} out of range")
    return np.full_like(labels, config.target), -1.0


def _pad(features, model):
    x = np.asarray(features, dtype=float)
    dim = 1 << model.n_data
    if x.shape[1] > dim:
        raise ConfigurationError(f"{x.shape[1]} features do not fit in {model.n_data} qubits")
    return np.pad(x, [(0, 0), (0, dim - x.shape[1])])


def _finish(model, x0_states, labels, config, tracker, states, found, **extra):
    trace = tracker.trace()
    pred, conf = trace["pred"][-1], trace["conf"][-1]
    return AttackResult(
        states=states,
        original=x0_states,
        labels=labels,
        fidelity=trace["fidelity"][-1],
        pred_before=trace["pred"][0],
        conf_before=trace["conf"][0],
        pred_after=pred,
        conf_after=conf,
        success=_success(pred, labels, config.target) & found,
        found=found,
        trace=trace,
        **extra,
    )


def _rescale(x, norms):
    # pi_C: back onto the sphere of the original vector (unit state after encoding)
    cur = np.linalg.norm(x, axis=1, keepdims=True)
    return x * (norms / np.where(cur > 0, cur, 1.0))


def _additive(model, features, labels, config, sample_ids, noise=None, project=None):
    """Shared FGSM/BIM/MIM/PGD loop over raw feature vectors."""
    x0 = _pad(features, model)
    norms = np.linalg.norm(x0, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise InputError("zero-norm input has no amplitude encoding")
    if config.domain == "state":
        x0 = x0 / norms
        norms = np.ones_like(norms)
    s0 = x0 / norms
    loss_labels, direction = _attack_labels(labels, config, model.n_classes)
    tracker = _Tracker(model, s0, labels, config.target)
    tracker(s0)
    x = x0.copy() if noise is None else _rescale(x0 + noise, norms)
    alive = np.ones(len(x), dtype=bool)
    found = np.ones(len(x), dtype=bool)
    momentum = np.zeros_like(x)
    alpha = config.alpha
    for it in range(config.iterations):
        _, _, grad = feature_gradient(model, x, loss_labels)
        if config.method == "mim":
            l1 = np.sum(np.abs(grad), axis=1, keepdims=True)
            dead = l1[:, 0] == 0
            momentum = config.mim_decay * momentum + grad / np.where(l1 > 0, l1, 1.0)
            step = _signed(momentum)
            alive &= ~dead
        else:
            step = _signed(grad)
            if it == 0:
                found &= np.any(step != 0, axis=1)
        step[~alive] = 0.0
        x = x + direction * alpha * step
        if project is not None:
            x = project(x, x0)
        x = _rescale(x, norms)
        tracker(x / norms)
    if config.method == "mim":
        found &= alive
    _log_unfound(found, sample_ids)
    return _finish(
        model, s0, labels, config, tracker, x / norms, found,
        features=x, sample_ids=sample_ids,
    )


def _log_unfound(found, sample_ids):
    if not np.all(found):
        ids = np.asarray(sample_ids)[~found]
        log.warning("no perturbation found for samples %s (zero gradient)", ids[:10].tolist())


def _functional(model, features, labels, config, sample_ids, omega0=None):
    x0 = _pad(features, model)
    s0 = _unit(x0).astype(complex)
    loss_labels, direction = _attack_labels(labels, config, model.n_classes)
    tracker = _Tracker(model, s0, labels, config.target)
    tracker(s0)
    omega = np.zeros((len(x0), model.n_data, 3)) if omega0 is None else omega0.copy()
    found = np.ones(len(x0), dtype=bool)
    alive = np.ones(len(x0), dtype=bool)
    momentum = np.zeros_like(omega)
    eps, alpha = config.epsilon, config.alpha
    for it in range(config.iterations):
        _, _, _, grad = omega_gradient(model, s0, omega, loss_labels)
        if config.method == "mim":
            l1 = np.sum(np.abs(grad), axis=(1, 2), keepdims=True)
            alive &= l1[:, 0, 0] > 0
            momentum = config.mim_decay * momentum + grad / np.where(l1 > 0, l1, 1.0)
            step = _signed(momentum)
        else:
            step = _signed(grad)
            if it == 0:
                found &= np.any(step != 0, axis=(1, 2))
        step[~alive] = 0.0
        omega = np.clip(omega + direction * alpha * step, -eps, eps)
        tracker(apply_local_layer(s0, omega))
    if config.method == "mim":
        found &= alive
    _log_unfound(found, sample_ids)
    states = apply_local_layer(s0, omega)
    return _finish(
        model, s0, labels, config, tracker, states, found,
        omega=omega, sample_ids=sample_ids,
    )


def _rngs(config, sample_ids):
    return [np.random.default_rng([config.seed, int(i)]) for i in sample_ids]


def _ball_projector(eps):
    def project(x, x0):
        return np.clip(x, x0 - eps, x0 + eps)

    return project


def _ids(n, sample_ids):
    return np.arange(n) if sample_ids is None else np.asarray(sample_ids)


def fgsm(model, features, labels, config: AttackConfig, sample_ids=None):
    """Single signed-gradient step of size ``epsilon``."""
    labels = np.asarray(labels)
    ids = _ids(len(labels), sample_ids)
    cfg = AttackConfig(**{**asdict(config), "method": "fgsm", "iterations": 1, "step_size": None})
    if cfg.space == "functional":
        return _functional(model, features, labels, cfg, ids)
    return _additive(model, features, labels, cfg, ids)


def bim(model, features, labels, config: AttackConfig, sample_ids=None):
    """Iterated FGSM with step ``alpha``; traces every iteration."""
    labels = np.asarray(labels)
    ids = _ids(len(labels), sample_ids)
    cfg = AttackConfig(**{**asdict(config), "method": "bim"})
    if cfg.space == "functional":
        return _functional(model, features, labels, cfg, ids)
    return _additive(model, features, labels, cfg, ids)


def mim(model, features, labels, config: AttackConfig, sample_ids=None):
    """Momentum iterative method with l1-normalised gradient accumulation."""
    labels = np.asarray(labels)
    ids = _ids(len(labels), sample_ids)
    cfg = AttackConfig(**{**asdict(config), "method": "mim"})
    if cfg.space == "functional":
        return _functional(model, features, labels, cfg, ids)
    return _additive(model, features, labels, cfg, ids)


def pgd(model, features, labels, config: AttackConfig, sample_ids=None):
    """BIM from a random start inside the eps-ball, projected back after each step.

    The l-infinity ball is centred on the clean vector (additive) or on
    ``omega = 0`` (functional). With several restarts the run with the highest
    final loss is kept per sample.
    """
    labels = np.asarray(labels)
    ids = _ids(len(labels), sample_ids)
    cfg = AttackConfig(**{**asdict(config), "method": "pgd"})
    radius = cfg.epsilon if cfg.pgd_start_radius is None else cfg.pgd_start_radius
    rngs = _rngs(cfg, ids)
    x0 = _pad(features, model)
    best, best_loss = None, None
    _, direction = _attack_labels(labels, cfg, model.n_classes)
    for _ in range(cfg.pgd_restarts):
        if cfg.space == "functional":
            shape = (model.n_data, 3)
            omega0 = np.array([r.uniform(-radius, radius, shape) for r in rngs])
            res = _functional(model, features, labels, cfg, ids, omega0=omega0)
        else:
            noise = np.array([r.uniform(-radius, radius, x0.shape[1]) for r in rngs])
            res = _additive(model, features, labels, cfg, ids, noise=noise,
                            project=_ball_projector(cfg.epsilon))
        final = direction * _objective(model, res, cfg)
        if best is None:
            best, best_loss = res, final
            continue
        better = final > best_loss
        best = _merge(best, res, better)
        best_loss = np.where(better, final, best_loss)
    return best


def _objective(model, res, cfg):
    """Loss of the final states against the attack labels (true or target)."""
    loss_labels, _ = _attack_labels(res.labels, cfg, model.n_classes)
    probs = _forward_states(model, res.states)
    return cross_entropy(probs, loss_labels, model.n_classes)


def _merge(a: AttackResult, b: AttackResult, take_b):
    def pick(u, v):
        if u is None:
            return None
        mask = take_b.reshape((-1,) + (1,) * (np.ndim(u) - 1))
        return np.where(mask, v, u)

    trace = {k: np.where(take_b[None, :], b.trace[k], a.trace[k]) for k in a.trace}
    out = {}
    for name in a.__dataclass_fields__:
        if name == "trace":
            out[name] = trace
        else:
            out[name] = pick(getattr(a, name), getattr(b, name))
    return AttackResult(**out)


# ---------------------------------------------------------------------------
# black box


class QueryOracle:
    """Probability-only access to a model; counts every queried input."""

    def __init__(self, model: CircuitModel):
        self._model = model
        self.n_classes = model.n_classes
        self.n_data = model.n_data
        self.queries = 0

    def __call__(self, features):
        x = np.atleast_2d(features)
        self.queries += len(x)
        return _forward_states(self._model, _unit(x))


def zoo_gradient(oracle, x, labels, coords, h=1e-3):
    """Symmetric-difference loss gradient on ``coords`` (B, k); other entries 0."""
    b, k = coords.shape
    rows = np.repeat(np.arange(b), k)
    probe = np.repeat(x[:, None, :], 2 * k, axis=1)
    probe[np.arange(b)[:, None], np.arange(k)[None, :], coords] += h
    probe[np.arange(b)[:, None], np.arange(k, 2 * k)[None, :], coords] -= h
    probs = oracle(probe.reshape(b * 2 * k, -1))
    rep = np.repeat(np.asarray(labels), 2 * k)
    losses = cross_entropy(probs, rep, oracle.n_classes).reshape(b, 2 * k)
    grad = np.zeros_like(x)
    grad[rows, coords.ravel()] = ((losses[:, :k] - losses[:, k:]) / (2 * h)).ravel()
    return grad


def zoo(oracle: QueryOracle, features, labels, config: AttackConfig, sample_ids=None,
        query_budget=None):
    """Zeroth-order attack: coordinate finite differences then a signed step.

    ``oracle`` returns output probabilities only. Each iteration probes
    ``zoo_batch`` random coordinates per sample (two queries each). Runs
    ``config.iterations`` steps or until ``query_budget`` queries per sample.
    """
    labels = np.asarray(labels)
    ids = _ids(len(labels), sample_ids)
    dim = 1 << oracle.n_data
    x = np.pad(np.asarray(features, dtype=float), [(0, 0), (0, dim - np.shape(features)[1])])
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise InputError("zero-norm input has no amplitude encoding")
    s0 = x / norms
    loss_labels, direction = _attack_labels(labels, config, oracle.n_classes)
    rngs = _rngs(config, ids)
    k = min(config.zoo_batch, dim)
    per_iter = 2 * k
    steps = config.iterations
    if query_budget is not None:
        steps = min(steps, query_budget // per_iter)
    trace = {"fidelity": [], "loss": [], "pred": [], "conf": []}

    def observe(v):
        probs = oracle(v)
        pred, conf = predict_probs(probs, oracle.n_classes)
        trace["fidelity"].append(fidelity(s0, _unit(v)))
        trace["loss"].append(cross_entropy(probs, labels, oracle.n_classes))
        trace["pred"].append(pred)
        trace["conf"].append(conf)
        return pred

    observe(x)
    queries = np.ones(len(x), dtype=np.int64)
    for _ in range(steps):
        coords = np.array([r.choice(dim, k, replace=False) for r in rngs])
        grad = zoo_gradient(oracle, x, loss_labels, coords, config.zoo_h)
        x = _rescale(x + direction * config.alpha * _signed(grad), norms)
        queries += per_iter + 1
        pred = observe(x)
    trace = {kk: np.array(v) for kk, v in trace.items()}
    pred, conf = trace["pred"][-1], trace["conf"][-1]
    success = _success(pred, labels, config.target)
    if query_budget is not None and not np.all(success):
        log.info("ZOO budget of %d queries exhausted for %d samples",
                 query_budget, int(np.sum(~success)))
    return AttackResult(
        states=x / norms, original=s0, labels=labels, fidelity=trace["fidelity"][-1],
        pred_before=trace["pred"][0], conf_before=trace["conf"][0],
        pred_after=pred, conf_after=conf, success=success,
        found=np.ones(len(x), dtype=bool), trace=trace, features=x,
        queries=queries, sample_ids=ids,
    )


# ---------------------------------------------------------------------------
# evaluation and export

_DISPATCH = {"fgsm": fgsm, "bim": bim, "pgd": pgd, "mim": mim}


def run_attack(model, features, labels, config: AttackConfig, sample_ids=None):
    if config.method == "zoo":
        return zoo(QueryOracle(model), features, labels, config, sample_ids)
    return _DISPATCH[config.method](model, features, labels, config, sample_ids)


@dataclass
class AttackReport:
    config: AttackConfig
    accuracy: float
    mean_fidelity: float
    clean_accuracy: float
    success_rate: float
    n_samples: int
    n_not_found: int
    curve: list = field(default_factory=list)  # per iteration: (iteration, accuracy, mean_fidelity)
    result: AttackResult | None = None

    def summary(self):
        return {
            "method": self.config.method,
            "config": asdict(self.config),
            "accuracy": self.accuracy,
            "mean_fidelity": self.mean_fidelity,
            "clean_accuracy": self.clean_accuracy,
            "success_rate": self.success_rate,
            "n_samples": self.n_samples,
            "n_not_found": self.n_not_found,
            "curve": [
                {"iteration": i, "accuracy": a, "mean_fidelity": f} for i, a, f in self.curve
            ],
        }

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.summary(), fh, indent=1, sort_keys=True)

    def write_csv(self, path):
        res = self.result
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["sample_id", "iteration", "fidelity", "loss", "pred_class",
                        "confidence", "success"])
            tr = res.trace
            for it in range(tr["pred"].shape[0]):
                ok = _success(tr["pred"][it], res.labels, self.config.target) & res.found
                for j, sid in enumerate(res.sample_ids):
                    w.writerow([
                        int(sid), it, f"{tr['fidelity'][it, j]:.10g}",
                        f"{tr['loss'][it, j]:.10g}", int(tr["pred"][it, j]),
                        f"{tr['conf'][it, j]:.10g}", int(ok[j]),
                    ])


def _concat(parts):
    if len(parts) == 1:
        return parts[0]
    out = {}
    for name in parts[0].__dataclass_fields__:
        vals = [getattr(p, name) for p in parts]
        if name == "trace":
            out[name] = {k: np.concatenate([v[k] for v in vals], axis=1) for k in vals[0]}
        elif vals[0] is None:
            out[name] = None
        else:
            out[name] = np.concatenate(vals)
    return AttackResult(**out)


def evaluate_attack(model, dataset, config: AttackConfig, chunk=256, threads=1):
    """Attack every sample of ``dataset`` and aggregate accuracy and fidelity.

    For targeted attacks samples already belonging to the target class are
    left out, since they cannot be pushed "towards" their own label.
    """
    if len(dataset) == 0:
        raise InputError("empty dataset")
    ids = np.arange(len(dataset))
    if config.targeted:
        ids = ids[dataset.labels != config.target]
    feats, labels = dataset.features[ids], dataset.labels[ids]
    bounds = list(range(0, len(ids), chunk)) + [len(ids)]
    slices = [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:])]

    def work(sl):
        return run_attack(model, feats[sl], labels[sl], config, ids[sl])

    if threads > 1 and len(slices) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(work, slices))
    else:
        parts = [work(sl) for sl in slices]
    res = _concat(parts)
    correct = res.trace["pred"] == res.labels[None, :]
    curve = [
        (it, float(np.mean(correct[it])), float(np.mean(res.trace["fidelity"][it])))
        for it in range(correct.shape[0])
    ]
    return AttackReport(
        config=config,
        accuracy=float(np.mean(res.pred_after == res.labels)),
        mean_fidelity=float(np.mean(res.fidelity)),
        clean_accuracy=float(np.mean(res.pred_before == res.labels)),
        success_rate=float(np.mean(res.success)),
        n_samples=len(res),
        n_not_found=int(np.sum(~res.found)),
        curve=curve,
        result=res,
    )


__all__ = [
    "AttackConfig", "AttackReport", "AttackResult", "QueryOracle",
    "bim", "evaluate_attack", "feature_gradient", "fgsm", "fidelity", "mim",
    "omega_gradient", "pgd", "run_attack", "zoo", "zoo_gradient",
]
