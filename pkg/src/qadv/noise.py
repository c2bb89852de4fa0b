"""Depolarizing-noise robustness via Monte Carlo Pauli trajectories.

Each trajectory draws, independently per data qubit, the identity with
probability ``1 - beta`` or one of X, Y, Z with probability ``beta / 3``.
Averaging the resulting pure states reproduces the single-layer depolarizing
channel on the encoded input.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import simulator as sim
from .classifier import CircuitModel, amplitude_encode, predict_probs
from .errors import ConfigurationError

PAULIS = np.stack([sim.IDENTITY, sim.PAULI_X, sim.PAULI_Y, sim.PAULI_Z])


@dataclass
class NoiseConfig:
    beta: float = 0.0
    trajectories: int = 1000
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise ConfigurationError("beta must lie in [0, 1]")
        if self.trajectories < 1:
            raise ConfigurationError("trajectories must be >= 1")


def sample_paulis(beta, shape, rng):
    """Integer Pauli codes (0=I, 1=X, 2=Y, 3=Z) with depolarizing weights."""
    if not 0.0 <= beta <= 1.0:
        raise ConfigurationError("beta must lie in [0, 1]")
    p = [1.0 - beta, beta / 3, beta / 3, beta / 3]
    return rng.choice(4, size=shape, p=p)


def apply_paulis(states, codes):
    """Apply per-row Pauli strings ``codes (B, n)`` to states ``(B, 2**n)``."""
    states = np.asarray(states, dtype=complex)
    codes = np.asarray(codes)
    n = codes.shape[-1]
    out = states.reshape(-1, 1 << n)
    codes = codes.reshape(-1, n)
    for q in range(n):
        if np.any(codes[:, q]):
            out = sim.apply_1q(out, PAULIS[codes[:, q]], q, n)
    return out.reshape(states.shape)


def apply_depolarizing_trajectory(state, beta, rng):
    """One noisy realisation of ``state``; returns the state and its Pauli record."""
    state = np.asarray(state, dtype=complex)
    n = sim.n_qubits_of(state)
    codes = sample_paulis(beta, state.shape[:-1] + (n,), rng)
    return apply_paulis(state, codes), codes


def depolarize_density(rho, beta):
    """Exact single-layer channel on a dense density matrix (small ``n`` only)."""
    rho = np.asarray(rho, dtype=complex)
    n = sim.n_qubits_of(rho[0])
    for q in range(n):
        out = (1.0 - beta) * rho
        for pauli in PAULIS[1:]:
            op = np.kron(np.kron(np.eye(1 << q), pauli), np.eye(1 << (n - q - 1)))
            out = out + (beta / 3.0) * op @ rho @ op.conj().T
        rho = out
    return rho


@dataclass
class NoisePoint:
    beta: float
    mean_fidelity: float
    mean_accuracy: float
    stderr: float


def noise_sweep(model: CircuitModel, dataset, beta_grid, trajectories=1000, seed=0):
    """Accuracy and fidelity of ``model`` on noisy copies of every sample.

    Noise acts on the encoded data register before the circuit. Each
    ``(beta, sample)`` pair uses its own seeded generator, so the curve does
    not depend on evaluation order. ``stderr`` is the standard error of the
    mean accuracy over all trajectories.
    """
    if trajectories < 1:
        raise ConfigurationError("trajectories must be >= 1")
    states = amplitude_encode(dataset.features, model.n_data).astype(complex)
    labels = dataset.labels
    points = []
    for bi, beta in enumerate(beta_grid):
        beta = float(beta)
        correct = np.empty((len(states), trajectories))
        fid = np.empty((len(states), trajectories))
        for i, psi in enumerate(states):
            rng = np.random.default_rng([seed, bi, i])
            codes = sample_paulis(beta, (trajectories, model.n_data), rng)
            noisy = apply_paulis(np.broadcast_to(psi, (trajectories, psi.size)), codes)
            probs = sim.output_probabilities(model.apply(model.prepare(noisy)), model.m_output)
            pred, _ = predict_probs(probs, model.n_classes)
            correct[i] = pred == labels[i]
            fid[i] = np.abs(noisy @ psi.conj()) ** 2
        acc = correct.ravel()
        points.append(NoisePoint(
            beta,
            float(np.mean(fid)),
            float(np.mean(acc)),
            float(np.std(acc, ddof=1) / np.sqrt(acc.size)) if acc.size > 1 else 0.0,
        ))
    return points


def linear_fit_r2(x, y):
    """Slope, intercept and R^2 of an ordinary least-squares line."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    total = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / total if total > 0 else 1.0
    return float(slope), float(intercept), float(r2)


def write_curve(points, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["beta", "mean_fidelity", "mean_accuracy", "stderr"])
        for p in points:
            w.writerow([f"{p.beta:.6g}", f"{p.mean_fidelity:.10g}",
                        f"{p.mean_accuracy:.10g}", f"{p.stderr:.10g}"])


def parse_grid(text):
    """``"0:0.3:0.02"`` (start:stop:step, stop inclusive) or a comma list."""
    if ":" in text:
        parts = [float(v) for v in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise ConfigurationError(f"bad grid {text!r}; expected start:stop:step")
        start, stop, step = parts
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(count)]
    return [float(v) for v in text.split(",") if v.strip()]
