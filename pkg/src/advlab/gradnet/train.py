"""Plain SGD training with seeded shuffling and per-epoch history."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyDatasetError, InvalidLabelError
from .network import Network


@dataclass
class TrainConfig:
    epochs: int = 10
    batch_size: int = 32
    learning_rate: float = 0.1
    seed: int = 0
    loss: str = "auto"  # "bce" | "cross_entropy" | "auto" (match the head)
    stop_accuracy: float | None = None  # early-stop once train accuracy reaches this

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError("learning rate must be >= 0")
        if self.loss not in ("auto", "bce", "cross_entropy"):
            raise ValueError(f"unknown loss {self.loss!r}")


def _check_loss_matches_head(net: Network, loss: str) -> None:
    head = net.head.kind
    if loss == "bce" and head != "sigmoid":
        raise InvalidLabelError("bce loss requires a sigmoid head")
    if loss == "cross_entropy" and head != "softmax":
        raise InvalidLabelError("cross_entropy loss requires a softmax head")


def train(net: Network, dataset: tuple[np.ndarray, np.ndarray], cfg: TrainConfig):
    """SGD-train the network in place; returns (net, history).

    Deterministic for a fixed config seed: the same shuffles, the same
    dropout draws, the same parameters. History records per-epoch mean
    batch loss and full-train accuracy (measured with dropout off).
    """
    xs, ys = dataset
    xs = np.asarray(xs, dtype=float)
    n = xs.shape[0]
    if n == 0:
        raise EmptyDatasetError("training set is empty")
    _check_loss_matches_head(net, cfg.loss)

    shuffle_rng = np.random.default_rng(cfg.seed)
    history = {"loss": [], "accuracy": []}
    ys_arr = np.asarray(ys)
    for _ in range(cfg.epochs):
        order = shuffle_rng.permutation(n)
        net.train_mode()
        epoch_losses = []
        for start in range(0, n, cfg.batch_size):
            take = order[start : start + cfg.batch_size]
            loss, grads = net.param_gradients(xs[take], ys_arr[take])
            epoch_losses.append(loss)
            for layer_params, layer_grads in zip(net.params, grads):
                for name, g in layer_grads.items():
                    layer_params[name] -= cfg.learning_rate * g
        net.eval_mode()
        history["loss"].append(float(np.mean(epoch_losses)))
        history["accuracy"].append(evaluate(net, xs, ys_arr)[1])
        if cfg.stop_accuracy is not None and history["accuracy"][-1] >= cfg.stop_accuracy:
            break
    return net, history


def evaluate(net: Network, xs: np.ndarray, ys, batch_size: int = 256) -> tuple[float, float]:
    """(mean loss, accuracy) over a labelled set, dropout off."""
    net.eval_mode()
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys)
    n = xs.shape[0]
    if n == 0:
        raise EmptyDatasetError("evaluation set is empty")
    losses = []
    correct = 0
    for start in range(0, n, batch_size):
        xb = xs[start : start + batch_size]
        yb = ys[start : start + batch_size]
        losses.append(net.loss(xb, yb) * xb.shape[0])
        preds = net.predict(xb)
        hard = yb if yb.ndim == 1 else yb.argmax(axis=1)
        correct += int((preds == hard).sum())
    return float(sum(losses) / n), correct / n
