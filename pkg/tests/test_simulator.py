import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qadv import simulator as sim
from qadv.errors import ConfigurationError, InputError
from qadv.simulator import Gate, apply_gate


def random_state(n, rng, batch=None):
    shape = (1 << n,) if batch is None else (batch, 1 << n)
    v = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def dense_1q(matrix, q, n):
    return np.kron(np.kron(np.eye(1 << q), matrix), np.eye(1 << (n - q - 1)))


def dense_cnot(c, t, n):
    dim = 1 << n
    out = np.zeros((dim, dim))
    for i in range(dim):
        bits = [(i >> (n - 1 - k)) & 1 for k in range(n)]
        if bits[c]:
            bits[t] ^= 1
        j = sum(b << (n - 1 - k) for k, b in enumerate(bits))
        out[j, i] = 1
    return out


def test_rz_zero_is_identity():
    psi = random_state(3, np.random.default_rng(0))
    out = apply_gate(psi, Gate("RZ", (1,), 0.0))
    np.testing.assert_allclose(out, psi, atol=1e-15)


def test_cnot_truth_table():
    psi = np.zeros(4, complex)
    psi[0b10] = 1
    out = apply_gate(psi, Gate("CNOT", (0, 1)))
    assert out[0b11] == 1 and np.sum(np.abs(out)) == 1


def test_rx_pi_on_zero():
    psi = np.array([1, 0], complex)
    out = apply_gate(psi, Gate("RX", (0,), np.pi))
    np.testing.assert_allclose(out, [0, -1j], atol=1e-15)


@pytest.mark.parametrize("fn", [sim.rx, sim.rz])
def test_rotations_unitary(fn):
    for theta in np.linspace(-7, 7, 29):
        u = fn(theta)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(2), atol=1e-12)


def test_gate_errors():
    psi = random_state(2, np.random.default_rng(1))
    with pytest.raises(ConfigurationError):
        apply_gate(psi, Gate("RX", (2,), 0.1))
    with pytest.raises(ConfigurationError):
        apply_gate(psi, Gate("CNOT", (1, 1)))
    with pytest.raises(InputError):
        apply_gate(psi, Gate("RZ", (0,), np.nan))


def test_gate_kernels_match_dense_oracle():
    rng = np.random.default_rng(2)
    for n in range(1, 5):
        for _ in range(25):
            psi = random_state(n, rng)
            q = rng.integers(n)
            u = sim.euler_zxz(rng.uniform(0, 2 * np.pi, 3))
            np.testing.assert_allclose(sim.apply_1q(psi, u, q, n), dense_1q(u, q, n) @ psi,
                                       atol=1e-12)
            if n > 1:
                c, t = rng.choice(n, 2, replace=False)
                np.testing.assert_allclose(apply_gate(psi, Gate("CNOT", (c, t))),
                                           dense_cnot(c, t, n) @ psi, atol=1e-14)


def test_output_probabilities_product_state():
    x = np.array([0.6, 0.8])
    state = np.kron(x, [0, 1])
    np.testing.assert_allclose(sim.output_probabilities(state, 1), [0, 1])


def test_output_probabilities_uniform():
    np.testing.assert_allclose(sim.output_probabilities(np.full(4, 0.5), 1), [0.5, 0.5])


def test_output_probabilities_partial_trace_oracle():
    rng = np.random.default_rng(3)
    for n in range(1, 5):
        for m in range(1, min(n, 2) + 1):
            psi = random_state(n, rng)
            rho = np.outer(psi, psi.conj()).reshape(1 << (n - m), 1 << m, 1 << (n - m), 1 << m)
            reduced = np.einsum("aiaj->ij", rho)
            np.testing.assert_allclose(sim.output_probabilities(psi, m),
                                       np.real(np.diag(reduced)), atol=1e-12)


def test_output_probabilities_rejects_large_m():
    with pytest.raises(ConfigurationError):
        sim.output_probabilities(np.ones(4) / 2, 3)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1), st.integers(1, 30))
def test_norm_preservation(n, seed, n_gates):
    rng = np.random.default_rng(seed)
    psi = random_state(n, rng)
    for _ in range(n_gates):
        if n > 1 and rng.random() < 0.3:
            c, t = rng.choice(n, 2, replace=False)
            psi = apply_gate(psi, Gate("CNOT", (int(c), int(t))))
        else:
            kind = "RX" if rng.random() < 0.5 else "RZ"
            psi = apply_gate(psi, Gate(kind, (int(rng.integers(n)),), rng.uniform(-5, 5)))
    assert abs(np.linalg.norm(psi) - 1) < 1e-10 * n_gates + 1e-14


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_linearity(n, seed):
    rng = np.random.default_rng(seed)
    a, b = random_state(n, rng), random_state(n, rng)
    alpha, beta = rng.normal(size=2) + 1j * rng.normal(size=2)
    gate = Gate("RX", (int(rng.integers(n)),), rng.uniform(-3, 3))
    lhs = apply_gate(alpha * a + beta * b, gate)
    rhs = alpha * apply_gate(a, gate) + beta * apply_gate(b, gate)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


class _Dense:
    """Closure over an explicit unitary, used as a circuit stand-in."""

    def __init__(self, u):
        self.u = u

    def apply(self, states):
        return states @ self.u.T

    def apply_adjoint(self, states):
        return states @ self.u.conj()


def random_unitary(dim, rng):
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _loss(u, x, label, m):
    x_hat = x / np.linalg.norm(x)
    p = sim.output_probabilities(u @ sim.embed_input(x_hat, m), m)
    return -np.log(p[label])


def test_input_gradient_identity_optimum():
    # the ancilla starts in |1>, so class 1 is predicted with certainty
    circuit = _Dense(np.eye(4))
    g = sim.input_gradient(circuit, np.array([1.0, 0.0]), np.array([0.0, 1.0]), 1)
    np.testing.assert_allclose(g, [0.0, 0.0], atol=1e-15)


def test_input_gradient_finite_differences():
    rng = np.random.default_rng(4)
    worst = 0.0
    for trial in range(20):
        n = int(rng.integers(1, 5))
        m = int(rng.integers(1, 3))
        u = random_unitary(1 << (n + m), rng)
        x = rng.normal(size=1 << n)
        label = int(rng.integers(1 << m))
        g = sim.input_gradient(_Dense(u), x, label, m)
        h = 1e-5
        fd = np.array([
            (_loss(u, x + h * e, label, m) - _loss(u, x - h * e, label, m)) / (2 * h)
            for e in np.eye(len(x))
        ])
        worst = max(worst, np.max(np.abs(g - fd)))
        assert abs(np.dot(g, x)) < 1e-8
    assert worst < 1e-6


def test_input_gradient_zero_norm():
    with pytest.raises(InputError):
        sim.input_gradient(_Dense(np.eye(4)), np.zeros(2), 0, 1)
