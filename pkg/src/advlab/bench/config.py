"""Experiment configuration: a nested-section key-value text format.

One file describes one experiment: dataset, network, training, the attack
roster, optional defences, and an optional sweep axis. Sections
[attack.<name>] and [defence.<name>] append to the rosters; defence
sections reference attacks by name and inherit [train] unless they
override epochs/batch_size/learning_rate.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from ..attacks import ATTACK_NAMES, AttackConfig
from ..defences import DefenceConfig
from ..errors import BadFormatError
from ..gradnet import TrainConfig


@dataclass
class DatasetSpec:
    n: int = 500
    size: int = 32
    seed: int = 100
    train_fraction: float = 0.8
    manifest: str | None = None


@dataclass
class NetworkSpec:
    arch: str = "blob_cnn"  # or "reference"
    scale: float = 1.0


@dataclass
class SweepSpec:
    axis: str = "epsilon"  # epsilon | decay_weight | overshoot
    values: tuple = ()
    attacks: tuple = ()
    samples: int = 100

    def __post_init__(self):
        if self.axis not in ("epsilon", "decay_weight", "overshoot"):
            raise ValueError(f"unknown sweep axis {self.axis!r}")
        if len(self.values) == 0:
            raise ValueError("sweep values must be nonempty")


@dataclass
class ExperimentConfig:
    name: str = "experiment"
    trials: int = 1
    seed: int = 0
    dataset: DatasetSpec = field(default_factory=DatasetSpec)
    network: NetworkSpec = field(default_factory=NetworkSpec)
    train: TrainConfig = field(default_factory=TrainConfig)
    attacks: dict = field(default_factory=dict)
    defences: dict = field(default_factory=dict)
    sweep: SweepSpec | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


# Option names are unique across sections, so one type table covers all.
_FIELD_TYPES = {
    "n": int, "size": int, "seed": int, "train_fraction": float, "manifest": str,
    "arch": str, "scale": float,
    "epochs": int, "batch_size": int, "learning_rate": float, "loss": str,
    "stop_accuracy": float,
    "epsilon": float, "iterations": int, "alpha": float, "decay_weight": float,
    "initial_decay": float, "overshoot": float, "kernel_size": int,
    "roi_reextract": bool,
    "kind": str, "adversarial_fraction": float, "attack_name": str,
    "regenerate": str, "deflections": int, "window": int, "denoise": bool,
    "temperature": float,
}


def _coerce(raw: str, target_type):
    if target_type is bool:
        low = raw.strip().lower()
        if low in ("true", "yes", "1", "on"):
            return True
        if low in ("false", "no", "0", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if target_type is int:
        return int(raw)
    if target_type is float:
        return float(raw)
    return raw.strip()


def _fill_dataclass(cls, options: dict, context: str, base=None):
    allowed = {f.name for f in fields(cls)}
    kwargs = {}
    for key, raw in options.items():
        if key not in allowed:
            raise BadFormatError(f"{context}: unknown option {key!r}")
        try:
            kwargs[key] = _coerce(raw, _FIELD_TYPES.get(key, str))
        except ValueError as exc:
            raise BadFormatError(f"{context}.{key}: {exc}") from exc
    if base is not None:
        return replace(base, **kwargs)
    return cls(**kwargs)


def _values_tuple(raw: str) -> tuple:
    return tuple(float(tok) for tok in raw.replace(",", " ").split())


def _names_tuple(raw: str) -> tuple:
    return tuple(tok.strip() for tok in raw.split(",") if tok.strip())


def parse_config(path: str | Path) -> ExperimentConfig:
    """Parse an experiment file; raises BadFormatError with context."""
    path = Path(path)
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = parser.read(path)
    if not read:
        raise BadFormatError(f"cannot read config {path}")

    cfg = ExperimentConfig()
    if parser.has_section("experiment"):
        opts = dict(parser.items("experiment"))
        cfg.name = opts.pop("name", cfg.name)
        cfg.trials = int(opts.pop("trials", cfg.trials))
        cfg.seed = int(opts.pop("seed", cfg.seed))
        if opts:
            raise BadFormatError(f"[experiment]: unknown options {sorted(opts)}")
    if parser.has_section("dataset"):
        cfg.dataset = _fill_dataclass(DatasetSpec, dict(parser.items("dataset")), "[dataset]")
    if parser.has_section("network"):
        cfg.network = _fill_dataclass(NetworkSpec, dict(parser.items("network")), "[network]")
    if parser.has_section("train"):
        cfg.train = _fill_dataclass(TrainConfig, dict(parser.items("train")), "[train]")

    for section in parser.sections():
        if section.startswith("attack."):
            name = section.split(".", 1)[1]
            opts = dict(parser.items(section))
            kind = opts.pop("kind", name)
            if kind not in ATTACK_NAMES:
                raise BadFormatError(f"[{section}]: unknown attack kind {kind!r}")
            acfg = _fill_dataclass(AttackConfig, opts, f"[{section}]")
            cfg.attacks[name] = (kind, acfg)
        elif section.startswith("defence."):
            name = section.split(".", 1)[1]
            opts = dict(parser.items(section))
            kind = opts.pop("kind", name)
            attack_ref = opts.pop("attack", None)
            train_over = {
                k: opts.pop(k) for k in ("epochs", "batch_size", "learning_rate") if k in opts
            }
            dcfg = _fill_dataclass(DefenceConfig, {"kind": kind, **opts}, f"[{section}]")
            dcfg.train = _fill_dataclass(
                TrainConfig, train_over, f"[{section}] train overrides", base=cfg.train
            )
            if attack_ref is not None:
                dcfg.attack_name = attack_ref
            cfg.defences[name] = dcfg
    if parser.has_section("sweep"):
        opts = dict(parser.items("sweep"))
        cfg.sweep = SweepSpec(
            axis=opts.get("axis", "epsilon"),
            values=_values_tuple(opts.get("values", "")),
            attacks=_names_tuple(opts.get("attacks", "")),
            samples=int(opts.get("samples", 100)),
        )

    # Defence attack references must resolve against the attack roster.
    for name, dcfg in cfg.defences.items():
        if dcfg.kind == "adv_train":
            if dcfg.attack_name in cfg.attacks:
                kind, acfg = cfg.attacks[dcfg.attack_name]
                dcfg.attack_name = kind
                dcfg.attack = acfg
            elif dcfg.attack_name not in ATTACK_NAMES:
                raise BadFormatError(
                    f"[defence.{name}]: attack {dcfg.attack_name!r} is neither a "
                    "configured attack nor a known kind"
                )
    return cfg
