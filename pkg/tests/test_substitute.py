import numpy as np
import pytest

from qadv import substitute as sub
from qadv.attacks import AttackConfig
from qadv.classifier import CircuitModel
from qadv.dataset import Dataset
from qadv.errors import ConfigurationError


def _net(seed=0):
    return sub.MLPModel.init((6, 5, 4, 3), seed=seed, dropout=0.0)


def _mean_loss(model, x, y):
    p = model.forward(x)
    return np.mean(-np.log(p[np.arange(len(y)), y]))


def test_backprop_matches_finite_differences():
    rng = np.random.default_rng(1)
    model = _net()
    x, y = rng.random((7, 6)), rng.integers(0, 3, 7)
    _, grads = model.loss_and_grads(x, y)
    h = 1e-6
    params = model.params()
    for k, p in enumerate(params):
        for idx in list(np.ndindex(p.shape))[:6]:
            plus = [q.copy() for q in params]
            minus = [q.copy() for q in params]
            plus[k][idx] += h
            minus[k][idx] -= h
            fd = (_mean_loss(model.with_params(plus), x, y)
                  - _mean_loss(model.with_params(minus), x, y)) / (2 * h)
            assert grads[k][idx] == pytest.approx(fd, abs=1e-7)


def test_input_gradient_matches_finite_differences():
    rng = np.random.default_rng(2)
    model = _net(3)
    x, y = rng.random((2, 6)), np.array([0, 2])
    g = model.input_gradient(x, y)
    h = 1e-6
    for j in range(6):
        e = np.zeros(6)
        e[j] = h
        for i in range(2):
            lp = _mean_loss(model, (x[i] + e)[None], y[i:i + 1])
            lm = _mean_loss(model, (x[i] - e)[None], y[i:i + 1])
            assert g[i, j] == pytest.approx((lp - lm) / (2 * h), abs=1e-7)


def test_zero_weights_give_uniform_softmax():
    model = sub.MLPModel.init((6, 5, 3), zero=True)
    np.testing.assert_allclose(model.forward(np.random.default_rng(0).random((4, 6))), 1 / 3)


def test_dropout_only_in_training_mode():
    model = sub.MLPModel.init((6, 8, 3), seed=1, dropout=0.5)
    x = np.random.default_rng(0).random((3, 6))
    np.testing.assert_array_equal(model.forward(x), model.forward(x))
    assert not np.allclose(model.forward(x, np.random.default_rng(1)), model.forward(x))


def test_shape_validation():
    with pytest.raises(ConfigurationError):
        sub.MLPModel((3, 2), [np.zeros((2, 2))], [np.zeros(2)])
    with pytest.raises(ConfigurationError):
        sub.MLPModel((2, 2), [np.full((2, 2), np.nan)], [np.zeros(2)])


def test_training_learns_and_round_trips(tmp_path):
    rng = np.random.default_rng(4)
    y = rng.integers(0, 3, 300)
    x = rng.random((300, 6)) * 0.2
    x[np.arange(300), y] += 1.0
    ds = Dataset(x, y)
    model, hist = sub.mlp_train(sub.MLPModel.init((6, 16, 3), seed=0), ds,
                                sub.MLPTrainConfig(learning_rate=0.01, batch_size=32, epochs=20))
    assert hist[-1]["train_accuracy"] > 0.95
    sub.save_mlp(model, tmp_path / "m.json")
    back = sub.load_mlp(tmp_path / "m.json")
    np.testing.assert_array_equal(back.forward(x), model.forward(x))
    with pytest.raises(ConfigurationError):
        sub.mlp_from_dict({"layer_sizes": [2, 2]})


def _pixels(n, seed):
    rng = np.random.default_rng(seed)
    return Dataset(rng.random((n, 16)), rng.integers(0, 2, n))


def test_pixel_attack_stays_in_unit_box():
    model = sub.MLPModel.init((16, 8, 2), seed=2)
    ds = _pixels(20, 0)
    for method in ("fgsm", "bim", "mim"):
        cfg = AttackConfig.steps(method, 1 if method == "fgsm" else 4, 0.3)
        adv = sub.pixel_attack(model, ds.features, ds.labels, cfg)
        assert adv.min() >= 0.0 and adv.max() <= 1.0
    with pytest.raises(ConfigurationError):
        sub.pixel_attack(model, ds.features, ds.labels, AttackConfig("pgd", 0.1, 2))


class _CountingVictim:
    def __init__(self, model):
        self._m = model
        self.calls = 0

    def __getattr__(self, name):
        return getattr(self._m, name)

    def apply(self, states):
        self.calls += 1
        return self._m.apply(states)

    def prepare(self, states):
        return self._m.prepare(states)


def test_transfer_zero_epsilon_has_no_drop():
    victim = _CountingVictim(CircuitModel.random(4, 2, 2, seed=1))
    ds = _pixels(12, 1)
    report, stats = sub.transfer_attack(sub.MLPModel.init((16, 8, 2), seed=2), victim, ds,
                                        AttackConfig("fgsm", 0.0))
    assert stats["drop"] == 0.0
    np.testing.assert_allclose(report.result.fidelity, 1.0, atol=1e-12)
    # clean and adversarial passes only
    assert victim.calls == 2


def test_transfer_class_mismatch():
    with pytest.raises(ConfigurationError):
        sub.transfer_attack(sub.MLPModel.init((16, 8, 3)), CircuitModel.random(4, 2, 1),
                            _pixels(4, 0), AttackConfig("fgsm", 0.1))
