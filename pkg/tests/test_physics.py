import numpy as np
import pytest

from qadv.data import physics as ph
from qadv.data.physics import IsingParams, QAHParams
from qadv.errors import ConfigurationError, DegenerateParameterError

X = np.array([[0, 1], [1, 0]])
Z = np.diag([1.0, -1.0])


def kron_all(ops):
    out = np.eye(1)
    for op in ops:
        out = np.kron(out, op)
    return out


@pytest.mark.parametrize("mu,t,expect", [
    (1.0, 0.5, -1), (-1.0, 0.5, 1), (1.0, 0.2, 0), (3.0, 1.0, -1), (-5.0, 1.0, 0),
])
def test_chern_analytic_phases(mu, t, expect):
    assert ph.chern_number(QAHParams(1.0, 1.0, t, mu)) == expect


def test_chern_sweep_matches_rule_and_is_grid_stable():
    rng = np.random.default_rng(0)
    for _ in range(20):
        t = rng.uniform(0.1, 1.0)
        mu = rng.uniform(-6, 6) * t
        if abs(abs(mu) - 4 * t) < 0.2 * t or abs(mu) < 0.2 * t:
            continue
        p = QAHParams(rng.uniform(0.3, 1.0), rng.uniform(0.3, 1.0), t, mu)
        rule = -int(np.sign(mu)) if abs(mu) < 4 * t else 0
        assert ph.chern_number(p, 24) == rule
        assert ph.chern_number(p, 48) == rule


def test_chern_gap_closing_raises():
    with pytest.raises(DegenerateParameterError):
        ph.chern_number(QAHParams(1.0, 1.0, 0.25, 1.0), 24)


def test_bloch_hamiltonian_hermitian_and_spectrum():
    p = QAHParams(0.7, 0.4, 0.3, 0.9)
    k = np.linspace(-np.pi, np.pi, 7)
    h = ph.bloch_hamiltonian(p, k[:, None], k[None, :])
    np.testing.assert_allclose(h, np.conj(np.swapaxes(h, -1, -2)), atol=1e-15)
    dz = p.mu - 2 * p.t * (np.cos(k[:, None]) + np.cos(k[None, :]))
    dx = -2 * p.j_so_y * np.sin(k[None, :]) + 0 * k[:, None]
    dy = -2 * p.j_so_x * np.sin(k[:, None]) + 0 * k[None, :]
    e = np.linalg.eigvalsh(h)
    np.testing.assert_allclose(e[..., 1], np.sqrt(dx**2 + dy**2 + dz**2), atol=1e-12)


def test_real_space_hamiltonian_hermitian():
    h = ph.real_space_hamiltonian(QAHParams(0.6, 0.8, 0.3, 1.0, L=5))
    np.testing.assert_allclose(h, h.conj().T, atol=1e-15)


def test_tof_densities_conserve_particles():
    p = QAHParams(0.5, 0.5, 0.2, 0.5, L=6)
    d = ph.tof_densities(p)
    assert d.shape == (72,)
    assert np.all(d >= -1e-12)
    assert d.sum() == pytest.approx(36, abs=1e-9)


def test_strong_zeeman_fills_spin_down():
    t = 0.1
    d = ph.tof_densities(QAHParams(0.05, 0.05, t, 8 * t, L=6))
    up, down = d[:36], d[36:]
    assert down.min() > 0.95 and up.max() < 0.05


def test_generate_tof_labels_and_shape():
    ds = ph.generate_tof(12, L=6, seed=3, gap_margin=0.2)
    assert ds.features.shape == (12, 72)
    for (lam, t, mu), y in zip(ds.params, ds.labels):
        assert y == int(abs(mu) < 4 * t)
    again = ph.generate_tof(12, L=6, seed=3, gap_margin=0.2)
    np.testing.assert_array_equal(ds.features, again.features)


def test_qah_params_validation():
    with pytest.raises(ConfigurationError):
        QAHParams(t=0.0)
    with pytest.raises(ConfigurationError):
        QAHParams(L=2)


def test_ising_two_site_oracle():
    jx = 0.7
    h = -kron_all([Z, Z]) - jx * (kron_all([X, np.eye(2)]) + kron_all([np.eye(2), X]))
    np.testing.assert_allclose(ph.ising_hamiltonian(IsingParams(2, jx)), h, atol=1e-15)
    psi, e = ph.ising_ground_state(IsingParams(2, jx), return_energy=True)
    assert e == pytest.approx(-np.sqrt(1 + 4 * jx**2), abs=1e-12)
    np.testing.assert_allclose(h @ psi, e * psi, atol=1e-12)


def test_ising_strong_field_is_plus_state():
    psi = ph.ising_ground_state(IsingParams(6, 50.0))
    plus = np.full(64, 1 / 8)
    assert abs(plus @ psi) ** 2 > 0.99


def test_ising_ground_state_has_even_parity_and_fixed_phase():
    L = 5
    psi = ph.ising_ground_state(IsingParams(L, 0.6))
    parity = kron_all([X] * L)
    np.testing.assert_allclose(parity @ psi, psi, atol=1e-10)
    assert psi[np.flatnonzero(np.abs(psi) > 1e-12)[0]] > 0
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)


def test_ising_params_validation():
    with pytest.raises(ConfigurationError):
        IsingParams(13, 1.0)
    with pytest.raises(ConfigurationError):
        IsingParams(4, -0.1)


def test_ising_dataset_labels_and_dead_zone():
    ds = ph.generate_ising_dataset(4, [0.3, 0.9, 1.1, 1.8])
    np.testing.assert_array_equal(ds.labels, [0, 0, 1, 1])
    with pytest.raises(ConfigurationError):
        ph.generate_ising_dataset(4, [1.01])
    with pytest.raises(ConfigurationError):
        ph.generate_ising_dataset(4, [0.0])


def test_ising_grid_sizes():
    for n in (1182, 395):
        grid = ph.ising_jx_grid(n)
        assert len(grid) == n and len(np.unique(grid)) == n
        assert np.all(np.abs(grid - 1) >= 0.02) and np.all(grid > 0)
    rand = ph.ising_jx_grid(50, seed=1)
    np.testing.assert_array_equal(rand, ph.ising_jx_grid(50, seed=1))
