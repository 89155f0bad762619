"""Benchmark harness: synthetic data, experiment runner, sweeps, reports."""

from .config import DatasetSpec, ExperimentConfig, NetworkSpec, SweepSpec, parse_config
from .dataset import DatasetManifest, LoadedDataset, load_dataset, synth_dataset
from .report import ReportRow, emit_report, load_report_json
from .runner import (
    network_specs,
    prepare_trial_data,
    run_experiment,
    sweep,
    sweep_to_csv,
    time_attacks,
    train_network,
)
from .synth import generate_images

__all__ = [
    "DatasetManifest",
    "DatasetSpec",
    "ExperimentConfig",
    "LoadedDataset",
    "NetworkSpec",
    "ReportRow",
    "SweepSpec",
    "emit_report",
    "generate_images",
    "load_dataset",
    "load_report_json",
    "network_specs",
    "parse_config",
    "prepare_trial_data",
    "run_experiment",
    "sweep",
    "sweep_to_csv",
    "synth_dataset",
    "time_attacks",
    "train_network",
]
