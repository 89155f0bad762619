"""Experiment orchestration: train, attack, defend, sweep, aggregate.

Every number an experiment emits is a function of (config, seed): trial t
offsets the dataset, initialization, training and attack seeds by t, and
all reductions run in fixed order.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

import numpy as np

from ..attacks import AttackConfig, extract_roi_or_full, run_attack
from ..errors import ZeroGradientError
from ..defences import DefenceConfig, adversarial_train, distill, gradient_saliency, pixel_deflect
from ..gradnet import (
    TrainConfig,
    build,
    conv,
    dense,
    dropout,
    evaluate,
    flatten,
    maxpool,
    reference_cnn_specs,
    relu,
    sigmoid,
    train,
)
from ..metrics import accuracy, roc_auc
from .config import ExperimentConfig, SweepSpec
from .dataset import load_dataset
from .report import ReportRow
from .synth import generate_images


def network_specs(arch: str, input_hw: int, scale: float = 1.0):
    """Named architectures usable in experiment configs."""
    if arch == "reference":
        return reference_cnn_specs(input_hw=input_hw, scale=scale)
    if arch == "blob_cnn":
        def s(w):
            return max(1, round(w * scale))

        specs = [
            conv(s(8), 3),
            relu(),
            maxpool(2, 2),
            conv(s(16), 3),
            relu(),
            maxpool(2, 2),
            flatten(),
            dense(s(64)),
            relu(),
            dense(1),
            sigmoid(),
        ]
        return specs, (input_hw, input_hw, 1)
    raise ValueError(f"unknown architecture {arch!r}")


@dataclass
class TrialData:
    train_x: np.ndarray
    train_y: np.ndarray
    test_x: np.ndarray
    test_y: np.ndarray
    test_rois: np.ndarray | None


def prepare_trial_data(cfg: ExperimentConfig, trial: int) -> TrialData:
    ds = cfg.dataset
    if ds.manifest:
        loaded = load_dataset(ds.manifest)
        tr = loaded.split_indices["train"]
        te = loaded.split_indices["test"]
        return TrialData(
            loaded.images[tr],
            loaded.labels[tr],
            loaded.images[te],
            loaded.labels[te],
            loaded.rois[te] if loaded.rois is not None else None,
        )
    images, labels, rois = generate_images(ds.n, ds.size, seed=ds.seed + trial)
    k = int(round(ds.train_fraction * ds.n))
    return TrialData(images[:k], labels[:k], images[k:], labels[k:], rois[k:])


def train_network(cfg: ExperimentConfig, data: TrialData, trial: int):
    specs, shape = network_specs(cfg.network.arch, data.train_x.shape[1], cfg.network.scale)
    tcfg = replace(cfg.train, seed=cfg.train.seed + trial)
    net = build(specs, shape, seed=tcfg.seed)
    train(net, (data.train_x, data.train_y), tcfg)
    return net


def _attack_stats(net, kind: str, acfg: AttackConfig, xs, ys) -> dict:
    """Per-sample attack loop. A sample whose loss gradient vanishes
    cannot be moved by any sign-step attack; it counts as an unperturbed
    miss for the attacker rather than aborting the run."""
    preds, scores, perts, times = [], [], [], []
    for i in range(xs.shape[0]):
        t0 = time.perf_counter()
        try:
            res = run_attack(kind, net, xs[i], int(ys[i]), acfg)
            adv = res.adversarial
            perts.append(res.l2_percent)
            times.append(res.elapsed)
        except ZeroGradientError:
            adv = xs[i]
            perts.append(0.0)
            times.append(time.perf_counter() - t0)
        preds.append(int(net.predict(adv)))
        scores.append(float(net.score(adv)))
    kept = [p for p in perts if not math.isnan(p)]
    return {
        "accuracy": accuracy(np.array(preds), ys),
        "auc": roc_auc(np.array(scores), ys),
        "pert_mean": float(np.mean(kept)) if kept else math.nan,
        "pert_worst": float(np.max(kept)) if kept else math.nan,
        "sec_per_sample": float(np.mean(times)),
    }


def _clean_stats(net, xs, ys) -> tuple[float, float]:
    preds = net.predict(xs)
    scores = net.score(xs)
    return accuracy(np.asarray(preds), ys), roc_auc(np.asarray(scores), ys)


def run_experiment(cfg: ExperimentConfig) -> list[ReportRow]:
    """Full protocol: per trial, train, run every attack, then every
    defence against every attack; append mean rows (trial = -1)."""
    rows: list[ReportRow] = []
    net_id = f"{cfg.network.arch}x{cfg.network.scale:g}"
    for trial in range(cfg.trials):
        data = prepare_trial_data(cfg, trial)
        net = train_network(cfg, data, trial)
        clean_acc, clean_auc = _clean_stats(net, data.test_x, data.test_y)
        rows.append(
            ReportRow(
                row="clean",
                network=net_id,
                trial=trial,
                clean_accuracy=clean_acc,
                roc_auc=clean_auc,
            )
        )
        for name, (kind, acfg) in cfg.attacks.items():
            acfg_t = replace(acfg, seed=acfg.seed + trial)
            stats = _attack_stats(net, kind, acfg_t, data.test_x, data.test_y)
            rows.append(
                ReportRow(
                    row="attack",
                    network=net_id,
                    attack=name,
                    trial=trial,
                    clean_accuracy=clean_acc,
                    accuracy_under_attack=stats["accuracy"],
                    roc_auc=stats["auc"],
                    pert_mean_percent=stats["pert_mean"],
                    pert_worst_percent=stats["pert_worst"],
                    seconds_per_sample=stats["sec_per_sample"],
                )
            )
        for dname, dcfg in cfg.defences.items():
            rows.extend(
                _defence_rows(cfg, dcfg, dname, net_id, net, data, trial)
            )
    rows.extend(mean_rows(rows))
    return rows


def _defence_rows(cfg, dcfg: DefenceConfig, dname, net_id, net, data: TrialData, trial):
    dcfg_t = replace(dcfg, seed=dcfg.seed + trial, train=replace(dcfg.train, seed=dcfg.train.seed + trial))
    out = []
    if dcfg.kind == "adv_train":
        defended, _ = adversarial_train(net, (data.train_x, data.train_y), dcfg_t)
        d_clean, _ = _clean_stats(defended, data.test_x, data.test_y)
        target = defended
        transform = None
    elif dcfg.kind == "distill":
        specs, shape = network_specs(cfg.network.arch, data.train_x.shape[1], cfg.network.scale)
        student, _ = distill(specs, shape, (data.train_x, data.train_y), dcfg_t)
        d_clean, _ = _clean_stats(student, data.test_x, data.test_y)
        target = student
        transform = None
    elif dcfg.kind == "pixel_deflect":
        target = net

        def transform(img):
            sal = gradient_saliency(net, img)
            return pixel_deflect(img, sal, dcfg_t)

        preds = [int(net.predict(transform(data.test_x[i]))) for i in range(data.test_x.shape[0])]
        d_clean = accuracy(np.array(preds), data.test_y)
    else:
        raise ValueError(f"unknown defence kind {dcfg.kind!r}")

    for aname, (kind, acfg) in cfg.attacks.items():
        acfg_t = replace(acfg, seed=acfg.seed + trial)
        preds, scores = [], []
        for i in range(data.test_x.shape[0]):
            res = run_attack(kind, target, data.test_x[i], int(data.test_y[i]), acfg_t)
            adv = transform(res.adversarial) if transform is not None else res.adversarial
            preds.append(int(target.predict(adv)))
            scores.append(float(target.score(adv)))
        out.append(
            ReportRow(
                row="defence",
                network=net_id,
                attack=aname,
                defence=dname,
                trial=trial,
                clean_accuracy=d_clean,
                accuracy_under_attack=accuracy(np.array(preds), data.test_y),
                roc_auc=roc_auc(np.array(scores), data.test_y),
            )
        )
    return out


def mean_rows(rows: list[ReportRow]) -> list[ReportRow]:
    """One trial = -1 row per (row, attack, defence, network) group."""
    groups: dict[tuple, list[ReportRow]] = {}
    for r in rows:
        if r.trial < 0:
            continue
        groups.setdefault((r.row, r.attack, r.defence, r.network), []).append(r)
    out = []
    numeric = (
        "clean_accuracy",
        "accuracy_under_attack",
        "roc_auc",
        "pert_mean_percent",
        "pert_worst_percent",
        "seconds_per_sample",
    )
    for (row, attack, defence, network), members in groups.items():
        agg = ReportRow(row=row, network=network, attack=attack, defence=defence, trial=-1)
        for name in numeric:
            vals = [getattr(m, name) for m in members if not math.isnan(getattr(m, name))]
            if vals:
                setattr(agg, name, float(np.mean(vals)))
        out.append(agg)
    return out


def sweep(cfg: ExperimentConfig, spec: SweepSpec | None = None) -> list[dict]:
    """One (attack, value, ROC-AUC) record per grid point.

    epsilon sweeps every listed attack; decay_weight applies to the
    RoI-guided attack and overshoot to the hyperplane-stepping one (other
    attacks are unaffected by those axes and are skipped).
    """
    spec = spec or cfg.sweep
    if spec is None:
        raise ValueError("no sweep requested")
    data = prepare_trial_data(cfg, 0)
    net = train_network(cfg, data, 0)
    take = min(spec.samples, data.test_x.shape[0])
    xs, ys = data.test_x[:take], data.test_y[:take]

    roster = spec.attacks or tuple(cfg.attacks)
    records = []
    for name in roster:
        kind, acfg = cfg.attacks[name]
        if spec.axis == "decay_weight" and kind not in ("kryptonite", "kryptonite_masked"):
            continue
        if spec.axis == "overshoot" and kind != "deepfool":
            continue
        for value in spec.values:
            acfg_v = replace(acfg, **{spec.axis: float(value)})
            stats = _attack_stats(net, kind, acfg_v, xs, ys)
            records.append(
                {"attack": name, "axis": spec.axis, "value": float(value), "roc_auc": stats["auc"]}
            )
    return records


def sweep_to_csv(records: list[dict], out_path) -> None:
    import csv
    from pathlib import Path

    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["attack", "axis", "value", "roc_auc"])
        writer.writeheader()
        writer.writerows(records)


def time_attacks(cfg: ExperimentConfig, samples: int = 50) -> dict[str, float]:
    """Mean wall-clock seconds per adversarial sample, attack call only.

    RoI masks are an input of the RoI-guided attacks, so they are
    extracted before the clock starts, mirroring how a batch attack would
    reuse one extractor pass per image.
    """
    data = prepare_trial_data(cfg, 0)
    net = train_network(cfg, data, 0)
    xs, ys = data.test_x[:samples], data.test_y[:samples]
    rois = [extract_roi_or_full(xs[i], AttackConfig(epsilon=1.0)) for i in range(xs.shape[0])]
    out = {}
    for name, (kind, acfg) in cfg.attacks.items():
        needs_roi = kind in ("kryptonite", "kryptonite_masked")
        t0 = time.perf_counter()
        for i in range(xs.shape[0]):
            try:
                run_attack(kind, net, xs[i], int(ys[i]), acfg, roi=rois[i] if needs_roi else None)
            except ZeroGradientError:
                pass
        out[name] = (time.perf_counter() - t0) / xs.shape[0]
    return out
