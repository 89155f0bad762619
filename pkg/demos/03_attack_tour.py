#!/usr/bin/env python3
"""Run all six attacks against one trained classifier and compare them.

Shows the L-infinity budget being respected, the relative perturbation
sizes, and the RoI-guided attack's per-step momentum bookkeeping.
"""

import numpy as np

from advlab.attacks import (
    AttackConfig,
    deepfool_linf,
    fgsm,
    ifgsm,
    kryptonite,
    kryptonite_masked,
    mifgsm,
    pgd,
)
from advlab.bench import generate_images
from advlab.gradnet import TrainConfig, build, train
from advlab.bench import network_specs
from advlab.imagekit import roi_mask, square_kernel

images, labels, _ = generate_images(1300, size=32, seed=11)
specs, shape = network_specs("blob_cnn", 32)
net = build(specs, shape, seed=1)
train(net, (images[:1200], labels[:1200]), TrainConfig(epochs=20, batch_size=16, learning_rate=0.1, seed=1, stop_accuracy=0.995))

eps = 0.04
base = dict(epsilon=eps, initial_decay=0.5, seed=9)
configs = {
    "fgsm": (fgsm, AttackConfig(**base)),
    "ifgsm": (ifgsm, AttackConfig(**base, iterations=16)),
    "pgd": (pgd, AttackConfig(**base, iterations=20, alpha=2.5 * eps / 20)),
    "mifgsm": (mifgsm, AttackConfig(**base, iterations=12)),
    "deepfool": (deepfool_linf, AttackConfig(iterations=50, overshoot=0.06)),
    "kryptonite": (kryptonite, AttackConfig(**base, iterations=16, decay_weight=0.006)),
    "kryptonite_masked": (kryptonite_masked, AttackConfig(**base, iterations=16, decay_weight=0.006)),
}

print(f"{'attack':18s} {'flips':>5s} {'mean linf':>9s} {'mean L2%':>8s} {'ms/sample':>9s}")
for name, (fn, cfg) in configs.items():
    flips, linfs, perts, times = 0, [], [], []
    for i in range(1200, 1260):
        x, y = images[i], int(labels[i])
        if fn is deepfool_linf:
            res = fn(net, x, cfg)
        elif fn in (kryptonite, kryptonite_masked):
            res = fn(net, x, y, roi_mask(x, square_kernel(5)), cfg)
        else:
            res = fn(net, x, y, cfg)
        flips += int(int(net.predict(res.adversarial)) != y)
        linfs.append(res.linf)
        perts.append(res.l2_percent)
        times.append(res.elapsed)
    print(
        f"{name:18s} {flips:5d} {np.mean(linfs):9.4f} {np.mean(perts):8.2f} {np.mean(times)*1e3:9.2f}"
    )

# Peek at the adaptive momentum trace for one sample.
x, y = images[1200], int(labels[1200])
res = kryptonite(net, x, y, roi_mask(x, square_kernel(5)), configs["kryptonite"][1])
print("\nRoI-guided momentum per iteration (progress -> decay factor):")
for t, state in enumerate(res.trace):
    print(f"  t={t:2d} progress={state.progress:.5f} mu={state.mu:.3f}")
