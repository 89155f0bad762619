"""SGD training: separable toys, determinism, degenerate configs."""

import numpy as np
import pytest

from advlab.errors import EmptyDatasetError
from advlab.gradnet import TrainConfig, build, dense, evaluate, flatten, relu, sigmoid, train


def two_pixel_set(n=40, seed=0):
    """Linearly separable: label 1 iff first pixel > second pixel."""
    rng = np.random.default_rng(seed)
    xs = rng.random((n, 1, 2, 1))
    ys = (xs[:, 0, 0, 0] > xs[:, 0, 1, 0]).astype(int)
    return xs, ys


def fresh_net(seed=0):
    return build([flatten(), dense(1), sigmoid()], (1, 2, 1), seed=seed)


class TestTrain:
    def test_separable_set_reaches_perfect_accuracy(self):
        xs, ys = two_pixel_set()
        net, history = train(
            fresh_net(), (xs, ys), TrainConfig(epochs=200, batch_size=8, learning_rate=0.5, seed=1)
        )
        assert max(history["accuracy"]) == 1.0

    def test_zero_learning_rate_keeps_parameters(self):
        xs, ys = two_pixel_set()
        net = fresh_net(seed=3)
        before = [
            {name: arr.copy() for name, arr in layer.items()} for layer in net.params
        ]
        train(net, (xs, ys), TrainConfig(epochs=3, batch_size=8, learning_rate=0.0, seed=1))
        for layer, snap in zip(net.params, before):
            for name in layer:
                assert np.array_equal(layer[name], snap[name])

    def test_same_seed_bit_identical(self):
        xs, ys = two_pixel_set()
        cfg = TrainConfig(epochs=5, batch_size=8, learning_rate=0.3, seed=7)
        net_a, hist_a = train(fresh_net(seed=2), (xs, ys), cfg)
        net_b, hist_b = train(fresh_net(seed=2), (xs, ys), cfg)
        for pa, pb in zip(net_a.params, net_b.params):
            for name in pa:
                assert np.array_equal(pa[name], pb[name])
        assert hist_a == hist_b

    def test_dropout_training_deterministic(self):
        from advlab.gradnet import dropout

        xs, ys = two_pixel_set()
        specs = [flatten(), dense(6), relu(), dropout(0.3), dense(1), sigmoid()]
        cfg = TrainConfig(epochs=4, batch_size=8, learning_rate=0.2, seed=11)
        net_a, _ = train(build(specs, (1, 2, 1), seed=5), (xs, ys), cfg)
        net_b, _ = train(build(specs, (1, 2, 1), seed=5), (xs, ys), cfg)
        for pa, pb in zip(net_a.params, net_b.params):
            for name in pa:
                assert np.array_equal(pa[name], pb[name])

    def test_history_shape(self):
        xs, ys = two_pixel_set()
        _, history = train(fresh_net(), (xs, ys), TrainConfig(epochs=3, batch_size=16, seed=0))
        assert len(history["loss"]) == 3
        assert len(history["accuracy"]) == 3

    def test_empty_dataset(self):
        with pytest.raises(EmptyDatasetError):
            train(fresh_net(), (np.zeros((0, 1, 2, 1)), np.zeros(0, dtype=int)), TrainConfig())

    def test_dropout_eval_identity(self):
        from advlab.gradnet import dropout

        net = build([flatten(), dropout(0.9), dense(1), sigmoid()], (1, 2, 1), seed=0)
        net.eval_mode()
        x = np.array([[[0.3], [0.9]]])
        a = net.forward(x)
        b = net.forward(x)
        assert a == b  # no stochasticity in eval mode


class TestEvaluate:
    def test_counts_correct(self):
        xs, ys = two_pixel_set()
        net = fresh_net()
        loss, acc = evaluate(net, xs, ys)
        assert 0.0 <= acc <= 1.0
        assert loss > 0.0

    def test_empty(self):
        with pytest.raises(EmptyDatasetError):
            evaluate(fresh_net(), np.zeros((0, 1, 2, 1)), np.zeros(0, dtype=int))
