import csv

import numpy as np
import pytest

from qadv import noise
from qadv.classifier import CircuitModel
from qadv.dataset import Dataset
from qadv.errors import ConfigurationError


def test_beta_zero_leaves_state_untouched():
    rng = np.random.default_rng(0)
    psi = rng.normal(size=8) + 0j
    psi /= np.linalg.norm(psi)
    out, codes = noise.apply_depolarizing_trajectory(np.tile(psi, (50, 1)), 0.0, rng)
    assert not codes.any()
    np.testing.assert_array_equal(out, np.tile(psi, (50, 1)))


def test_full_depolarizing_single_qubit_average():
    # beta = 1 on |0><0| gives diag(1/3, 2/3)
    rng = np.random.default_rng(1)
    n = 100_000
    states, _ = noise.apply_depolarizing_trajectory(np.tile([1.0 + 0j, 0.0], (n, 1)), 1.0, rng)
    rho = states.T @ states.conj() / n
    np.testing.assert_allclose(rho, np.diag([1 / 3, 2 / 3]), atol=5e-3)
    np.testing.assert_allclose(noise.depolarize_density(np.diag([1.0, 0.0]), 1.0),
                               np.diag([1 / 3, 2 / 3]), atol=1e-15)


def test_trajectory_average_matches_channel():
    rng = np.random.default_rng(2)
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi /= np.linalg.norm(psi)
    beta, n = 0.3, 40_000
    states, _ = noise.apply_depolarizing_trajectory(np.tile(psi, (n, 1)), beta, rng)
    outer = np.einsum("bi,bj->bij", states, states.conj())
    mean = outer.mean(axis=0)
    sigma = outer.std(axis=0) / np.sqrt(n)
    exact = noise.depolarize_density(np.outer(psi, psi.conj()), beta)
    assert np.all(np.abs(mean - exact) <= 3 * np.abs(sigma) + 1e-12)


def test_pauli_frequencies():
    rng = np.random.default_rng(3)
    codes = noise.sample_paulis(0.3, 200_000, rng)
    freq = np.bincount(codes, minlength=4) / codes.size
    np.testing.assert_allclose(freq, [0.7, 0.1, 0.1, 0.1], atol=4e-3)
    with pytest.raises(ConfigurationError):
        noise.sample_paulis(1.5, 3, rng)


def test_apply_paulis_dense_oracle():
    rng = np.random.default_rng(4)
    psi = rng.normal(size=(1, 8)) + 0j
    codes = np.array([[1, 2, 3]])
    op = np.kron(np.kron(noise.PAULIS[1], noise.PAULIS[2]), noise.PAULIS[3])
    np.testing.assert_allclose(noise.apply_paulis(psi, codes)[0], op @ psi[0], atol=1e-14)


def _toy():
    rng = np.random.default_rng(5)
    return CircuitModel.random(2, 2, 2, seed=6), Dataset(rng.random((6, 4)), rng.integers(0, 2, 6))


def test_noise_sweep_deterministic_and_exact_at_zero():
    model, ds = _toy()
    a = noise.noise_sweep(model, ds, [0.0, 0.1], trajectories=20, seed=1)
    b = noise.noise_sweep(model, ds, [0.0, 0.1], trajectories=20, seed=1)
    assert a == b
    assert a[0].mean_fidelity == pytest.approx(1.0)
    assert a[1].mean_fidelity < 1.0
    # the beta = 0.1 point does not depend on what precedes it in the grid
    c = noise.noise_sweep(model, ds, [0.0, 0.1], trajectories=20, seed=1)[1]
    assert c == a[1]


def test_noise_sweep_rejects_zero_trajectories():
    model, ds = _toy()
    with pytest.raises(ConfigurationError):
        noise.noise_sweep(model, ds, [0.1], trajectories=0)


def test_linear_fit_and_curve_output(tmp_path):
    slope, intercept, r2 = noise.linear_fit_r2([0, 1, 2], [1, 3, 5])
    assert (slope, intercept, r2) == pytest.approx((2, 1, 1))
    points = [noise.NoisePoint(0.0, 1.0, 0.9, 0.01), noise.NoisePoint(0.1, 0.8, 0.7, 0.02)]
    noise.write_curve(points, tmp_path / "c.csv")
    rows = list(csv.reader(open(tmp_path / "c.csv")))
    assert rows[0] == ["beta", "mean_fidelity", "mean_accuracy", "stderr"]
    assert len(rows) == 3


def test_parse_grid():
    assert noise.parse_grid("0:0.3:0.02")[-1] == pytest.approx(0.3)
    assert len(noise.parse_grid("0:0.3:0.02")) == 16
    assert noise.parse_grid("0, 0.1,0.5") == [0.0, 0.1, 0.5]
    with pytest.raises(ConfigurationError):
        noise.parse_grid("0:1")
