"""Defences: adversarial training, pixel deflection, defensive distillation.

Pixel deflection replaces low-saliency pixels with random neighbours and
median-denoises the result; the saliency map is the normalized magnitude
of the input gradient. Distillation trains a teacher at temperature T on
hard labels, a same-architecture student on the teacher's soft labels at
T, and evaluates the student at T = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .attacks import AttackConfig, run_attack
from .errors import NonPositiveTemperatureError
from .gradnet import TrainConfig, build, evaluate, promote_to_softmax, train
from .gradnet.network import Network
from .imagekit import validate_image


@dataclass
class DefenceConfig:
    kind: str = "adv_train"  # adv_train | pixel_deflect | distill
    adversarial_fraction: float = 0.65
    attack_name: str = "fgsm"
    attack: AttackConfig = field(default_factory=lambda: AttackConfig(epsilon=0.1))
    regenerate: str = "per_epoch"  # or "once"
    deflections: int = 120
    window: int = 3
    denoise: bool = True
    temperature: float = 20.0
    seed: int = 0
    train: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        if not 0.0 <= self.adversarial_fraction <= 1.0:
            raise ValueError("adversarial fraction must lie in [0, 1]")
        if self.deflections < 0:
            raise ValueError("deflections must be >= 0")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.temperature <= 0:
            raise NonPositiveTemperatureError("temperature must be > 0")
        if self.regenerate not in ("per_epoch", "once"):
            raise ValueError("regenerate must be 'per_epoch' or 'once'")


def adversarial_train(
    net: Network, dataset: tuple[np.ndarray, np.ndarray], cfg: DefenceConfig
) -> tuple[Network, dict]:
    """Retrain from scratch on a clean/adversarial mix.

    A fixed subset (cfg.adversarial_fraction of the training set) is
    replaced by adversarial versions: before the first epoch they are
    generated against the incoming network, and with the per-epoch
    schedule they are regenerated against the evolving network at each
    later epoch. With fraction 0 the run is bit-identical to plain
    training under the same seed.
    """
    xs, ys = dataset
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys)
    n = xs.shape[0]
    fresh = build(net.specs, net.input_shape, seed=cfg.train.seed)

    sel_rng = np.random.default_rng(cfg.seed)
    k = round(cfg.adversarial_fraction * n)
    chosen = np.sort(sel_rng.choice(n, size=k, replace=False)) if k else np.array([], dtype=int)

    # Mirrors the plain training loop exactly so the fraction-0 case
    # consumes the same random streams.
    shuffle_rng = np.random.default_rng(cfg.train.seed)
    mixed = xs.copy()
    for epoch in range(cfg.train.epochs):
        if k and (epoch == 0 or cfg.regenerate == "per_epoch"):
            source = net if epoch == 0 else fresh
            source.eval_mode()
            for i in chosen:
                mixed[i] = run_attack(cfg.attack_name, source, xs[i], ys[i], cfg.attack).adversarial
        order = shuffle_rng.permutation(n)
        fresh.train_mode()
        for start in range(0, n, cfg.train.batch_size):
            take = order[start : start + cfg.train.batch_size]
            _, grads = fresh.param_gradients(mixed[take], ys[take])
            for layer_params, layer_grads in zip(fresh.params, grads):
                for name, g in layer_grads.items():
                    layer_params[name] -= cfg.train.learning_rate * g
        fresh.eval_mode()

    report = {"clean_accuracy": evaluate(fresh, xs, ys)[1]}
    adv_correct = 0
    for i in range(n):
        res = run_attack(cfg.attack_name, fresh, xs[i], ys[i], cfg.attack)
        adv_correct += int(int(fresh.predict(res.adversarial)) == int(ys[i]))
    report["adversarial_accuracy"] = adv_correct / n
    return fresh, report


def gradient_saliency(net: Network, x: np.ndarray, y=None) -> np.ndarray:
    """|input gradient| collapsed over channels and scaled to [0, 1]."""
    if y is None:
        y = int(net.predict(x))
    g = np.abs(net.input_gradient(x, y)).sum(axis=2)
    peak = g.max()
    return g / peak if peak > 0 else g


def median_filter3(img: np.ndarray) -> np.ndarray:
    """3x3 per-channel median with edge-replicated borders."""
    h, w, _ = img.shape
    padded = np.pad(img, ((1, 1), (1, 1), (0, 0)), mode="edge")
    windows = np.stack(
        [padded[1 + di : h + 1 + di, 1 + dj : w + 1 + dj, :] for di in (-1, 0, 1) for dj in (-1, 0, 1)]
    )
    return np.median(windows, axis=0)


def pixel_deflect(x: np.ndarray, saliency: np.ndarray, cfg: DefenceConfig) -> np.ndarray:
    """Swap low-saliency pixels with random window neighbours, then denoise.

    Targets are drawn with probability proportional to (1 - saliency);
    each target copies the value of a pixel chosen uniformly in its
    (2*window+1)^2 neighbourhood (offsets clamped at the borders). With
    deflections = 0 and denoise off this is the identity.
    """
    validate_image(x)
    if saliency.ndim == 3:
        saliency = saliency.mean(axis=2)
    if saliency.shape != x.shape[:2]:
        raise ValueError("saliency must match the image grid")
    h, w, _ = x.shape
    out = x.copy()
    if cfg.deflections > 0:
        rng = np.random.default_rng(cfg.seed)
        weights = (1.0 - saliency).ravel() + 1e-3
        p = weights / weights.sum()
        targets = rng.choice(h * w, size=cfg.deflections, p=p)
        offsets = rng.integers(-cfg.window, cfg.window + 1, size=(cfg.deflections, 2))
        for t, (dr, dc) in zip(targets, offsets):
            r, c = divmod(int(t), w)
            sr = min(max(r + int(dr), 0), h - 1)
            sc = min(max(c + int(dc), 0), w - 1)
            out[r, c, :] = out[sr, sc, :]
    if cfg.denoise:
        out = median_filter3(out)
    return np.clip(out, 0.0, 1.0)


def distill(
    specs,
    input_shape: tuple,
    dataset: tuple[np.ndarray, np.ndarray],
    cfg: DefenceConfig,
) -> tuple[Network, Network]:
    """Defensive distillation; returns (student, teacher).

    Both networks share the architecture (a sigmoid head is promoted to a
    2-logit softmax). The teacher trains on hard labels at temperature T;
    the student trains on the teacher's temperature-T soft labels; the
    student is returned with its head reset to temperature 1.
    """
    xs, ys = dataset
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys)
    soft_specs = promote_to_softmax(list(specs), temperature=cfg.temperature)
    train_cfg = TrainConfig(
        epochs=cfg.train.epochs,
        batch_size=cfg.train.batch_size,
        learning_rate=cfg.train.learning_rate,
        seed=cfg.train.seed,
        loss="cross_entropy",
    )
    teacher = build(soft_specs, input_shape, seed=cfg.train.seed)
    train(teacher, (xs, ys.astype(int)), train_cfg)
    soft_labels = np.asarray(teacher.forward(xs))
    student = build(soft_specs, input_shape, seed=cfg.train.seed + 1)
    train(student, (xs, soft_labels), train_cfg)
    student.set_temperature(1.0)
    return student, teacher
