"""Dense state-vector kernels.

States are complex numpy arrays whose last axis has length ``2**n``; any
leading axes are treated as a batch. Qubit 0 is the most significant bit of
the basis index, and measured output qubits are the last ``m`` qubits.

Rotations follow ``R_a(theta) = exp(-i theta sigma_a / 2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, InputError
from .losses import cross_entropy_weights

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)


def n_qubits_of(states) -> int:
    dim = np.shape(states)[-1]
    n = int(dim).bit_length() - 1
    if dim < 2 or 1 << n != dim:
        raise ConfigurationError(f"state length {dim} is not a power of two >= 2")
    return n


def rx(theta):
    """``exp(-i theta X / 2)``; broadcasts over array-valued ``theta``."""
    theta = np.asarray(theta, dtype=float)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    out = np.empty(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c
    out[..., 1, 1] = c
    out[..., 0, 1] = -1j * s
    out[..., 1, 0] = -1j * s
    return out


def rz(theta):
    """``exp(-i theta Z / 2)``; broadcasts over array-valued ``theta``."""
    theta = np.asarray(theta, dtype=float)
    out = np.zeros(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = np.exp(-0.5j * theta)
    out[..., 1, 1] = np.exp(0.5j * theta)
    return out


def euler_zxz(angles):
    """``Z_c X_b Z_a`` for ``angles[..., :] = (a, b, c)``; ``a`` acts first."""
    angles = np.asarray(angles, dtype=float)
    return rz(angles[..., 2]) @ rx(angles[..., 1]) @ rz(angles[..., 0])


def euler_zxz_derivatives(angles):
    """Derivatives of :func:`euler_zxz` with respect to ``a``, ``b`` and ``c``.

    Returns an array of shape ``angles.shape[:-1] + (3, 2, 2)``.
    """
    angles = np.asarray(angles, dtype=float)
    za, xb, zc = rz(angles[..., 0]), rx(angles[..., 1]), rz(angles[..., 2])
    half_z = -0.5j * PAULI_Z
    half_x = -0.5j * PAULI_X
    da = zc @ xb @ za @ half_z
    db = zc @ xb @ half_x @ za
    dc = half_z @ zc @ xb @ za
    return np.stack([da, db, dc], axis=-3)


# ---------------------------------------------------------------------------
# gate kernels


def _split(states, qubit, n):
    return states.reshape(-1, 1 << qubit, 2, 1 << (n - qubit - 1))


def apply_1q(states, matrix, qubit, n=None):
    """Apply a 2x2 ``matrix`` to ``qubit``; returns a new array.

    ``matrix`` is either ``(2, 2)`` or ``(B, 2, 2)`` with one matrix per batch
    row of ``states``.
    """
    states = np.asarray(states)
    n = n_qubits_of(states) if n is None else n
    matrix = np.asarray(matrix)
    rest = 1 << (n - qubit - 1)
    if matrix.ndim == 2:
        if rest == 1:
            return (states.reshape(-1, 2) @ matrix.T).reshape(states.shape)
        return np.matmul(matrix, states.reshape(-1, 2, rest)).reshape(states.shape)
    s = _split(states, qubit, n)
    return np.matmul(matrix.reshape(-1, 1, 2, 2), s).reshape(states.shape)


def pair_contraction(bra, ket, qubit, n):
    """``M[b, s, t] = sum conj(bra[b, .., s, ..]) * ket[b, .., t, ..]`` on ``qubit``.

    For any 2x2 ``D`` acting on ``qubit``, ``<bra|D|ket> = sum(D * M)``
    per batch row; used for adjoint-mode derivatives.
    """
    b = _split(np.conj(bra), qubit, n)
    k = _split(ket, qubit, n)
    return np.einsum("xasc,xatc->xst", b, k)


def cnot_permutation(pairs, n):
    """Index map ``perm`` with ``(CNOT_k ... CNOT_1 psi) = psi[..., perm]``.

    ``pairs`` is a sequence of ``(control, target)`` applied in order.
    """
    idx = np.arange(1 << n)
    for control, target in pairs:
        _check_qubit(control, n)
        _check_qubit(target, n)
        if control == target:
            raise ConfigurationError("CNOT control and target coincide")
        cbit = 1 << (n - 1 - control)
        tbit = 1 << (n - 1 - target)
        # new[i] = old[i ^ tbit if control set]; compose right-to-left
        src = np.where(np.arange(1 << n) & cbit, np.arange(1 << n) ^ tbit, np.arange(1 << n))
        idx = idx[src]
    return idx


def apply_cnot(states, control, target, n=None):
    states = np.asarray(states)
    n = n_qubits_of(states) if n is None else n
    return states[..., cnot_permutation([(control, target)], n)]


def _check_qubit(q, n):
    if not (0 <= int(q) < n):
        raise ConfigurationError(f"qubit index {q} out of range for {n} qubits")


@dataclass(frozen=True)
class Gate:
    """One circuit element: ``RZ``/``RX`` with an angle, or ``CNOT``.

    ``qubits`` is ``(target,)`` for rotations and ``(control, target)`` for CNOT.
    """

    kind: str
    qubits: tuple
    angle: float = 0.0

    def matrix(self):
        if self.kind == "RZ":
            return rz(self.angle)
        if self.kind == "RX":
            return rx(self.angle)
        raise ConfigurationError(f"gate {self.kind} has no single-qubit matrix")


def apply_gate(state, gate: Gate):
    """Exact action of ``gate`` on ``state`` (batched states allowed)."""
    state = np.asarray(state, dtype=complex)
    n = n_qubits_of(state)
    if gate.kind == "CNOT":
        if len(gate.qubits) != 2:
            raise ConfigurationError("CNOT needs (control, target)")
        return apply_cnot(state, gate.qubits[0], gate.qubits[1], n)
    if gate.kind not in ("RZ", "RX"):
        raise ConfigurationError(f"unknown gate kind {gate.kind!r}")
    if len(gate.qubits) != 1:
        raise ConfigurationError(f"{gate.kind} acts on exactly one qubit")
    _check_qubit(gate.qubits[0], n)
    if not np.isfinite(gate.angle):
        raise InputError(f"non-finite rotation angle {gate.angle}")
    return apply_1q(state, gate.matrix(), gate.qubits[0], n)


class GateSequence:
    """A fixed list of gates usable as a circuit closure."""

    def __init__(self, gates, n_qubits):
        self.gates = list(gates)
        self.n_qubits = n_qubits

    def apply(self, states):
        for g in self.gates:
            states = apply_gate(states, g)
        return states

    def apply_adjoint(self, states):
        states = np.asarray(states, dtype=complex)
        for g in reversed(self.gates):
            if g.kind == "CNOT":
                states = apply_gate(states, g)
            else:
                states = apply_1q(states, g.matrix().conj().T, g.qubits[0], self.n_qubits)
        return states


# ---------------------------------------------------------------------------
# measurement


def output_probabilities(states, m_output):
    """Diagonal of the reduced density matrix of the last ``m_output`` qubits."""
    states = np.asarray(states)
    n = n_qubits_of(states)
    if not (1 <= m_output <= n):
        raise ConfigurationError(f"m_output={m_output} invalid for {n} qubits")
    p = np.abs(states) ** 2
    return p.reshape(states.shape[:-1] + (-1, 1 << m_output)).sum(axis=-2)


def embed_input(x_hat, m_output):
    """``x_hat (x) |1...1>`` over ``m_output`` ancilla qubits (batched)."""
    x_hat = np.asarray(x_hat)
    batch = x_hat.reshape(-1, x_hat.shape[-1])
    out = np.zeros((batch.shape[0], batch.shape[1] << m_output), dtype=complex)
    out[:, (1 << m_output) - 1 :: 1 << m_output] = batch
    return out.reshape(x_hat.shape[:-1] + (-1,))


def restrict_input(states, m_output):
    """Inverse of :func:`embed_input`: the ``|1...1>`` slice of the ancillas."""
    states = np.asarray(states)
    return states[..., (1 << m_output) - 1 :: 1 << m_output]


def weighted_projector(states, weights, m_output):
    """``O psi`` with ``O = sum_k w_k |k><k|`` on the output register."""
    states = np.asarray(states)
    w = np.asarray(weights)
    shaped = states.reshape(states.shape[:-1] + (-1, 1 << m_output))
    return (shaped * w[..., None, :]).reshape(states.shape)


def input_gradient(circuit, x, label, m_output, n_classes=None):
    """Gradient of the cross-entropy loss with respect to a real input vector.

    ``circuit`` exposes ``apply`` and ``apply_adjoint`` on batched states over
    ``n + m_output`` qubits; ``x`` has length ``2**n`` and need not be
    normalised. The encoding projection ``x -> x / |x|`` is part of the chain,
    so the result is orthogonal to ``x``.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    norms = np.linalg.norm(x, axis=1)
    if np.any(norms == 0):
        raise InputError("zero-norm input has no amplitude encoding")
    x_hat = x / norms[:, None]
    psi = circuit.apply(embed_input(x_hat, m_output))
    probs = output_probabilities(psi, m_output)
    w = cross_entropy_weights(probs, label, n_classes)
    lam = circuit.apply_adjoint(weighted_projector(psi, w, m_output))
    g_hat = 2.0 * np.real(restrict_input(lam, m_output))
    radial = np.sum(g_hat * x_hat, axis=1, keepdims=True)
    grad = (g_hat - radial * x_hat) / norms[:, None]
    return grad[0] if single else grad
