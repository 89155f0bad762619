"""CLI surface: subcommands, exit codes, file outputs."""

import json

import numpy as np
import pytest

from advlab.cli import main
from advlab.imagekit import read_mask, write_image

SMALL_CONFIG = """
[experiment]
name = clismoke
trials = 1
seed = 0

[dataset]
n = 24
size = 32
seed = 4
train_fraction = 0.75

[network]
arch = blob_cnn
scale = 0.5

[train]
epochs = 1
batch_size = 8
learning_rate = 0.2
seed = 0

[attack.fgsm]
epsilon = 0.1

[sweep]
axis = epsilon
values = 0, 0.1
attacks = fgsm
samples = 4
"""


@pytest.fixture
def config_file(tmp_path):
    p = tmp_path / "exp.ini"
    p.write_text(SMALL_CONFIG)
    return p


class TestCli:
    def test_synth_writes_dataset(self, tmp_path, capsys):
        out = tmp_path / "ds"
        assert main(["synth", "--n", "6", "--size", "32", "--seed", "1", "--out", str(out)]) == 0
        assert (out / "manifest.json").exists()
        assert len(list(out.glob("img_*.pgm"))) == 6

    def test_roi_extracts_mask(self, tmp_path):
        from advlab.bench import generate_images

        xs, _, _ = generate_images(4, 32, seed=2)
        img_path = tmp_path / "sample.pgm"
        write_image(img_path, xs[0])
        out = tmp_path / "mask.pgm"
        assert main(["roi", "--image", str(img_path), "--out", str(out)]) == 0
        mask = read_mask(out)
        assert mask.sum() >= 1

    def test_train_saves_model(self, tmp_path, config_file):
        out = tmp_path / "model"
        assert main(["train", "--config", str(config_file), "--out", str(out)]) == 0
        assert (out / "clismoke.net").exists()
        assert (out / "clismoke.net.json").exists()

    def test_attack_writes_records(self, tmp_path, config_file):
        out = tmp_path / "attacks"
        assert (
            main(["attack", "--config", str(config_file), "--out", str(out), "--samples", "3"])
            == 0
        )
        records = json.loads((out / "attack_records.json").read_text())
        assert len(records) == 3
        assert {"attack", "linf", "success"} <= set(records[0])
        for rec in records:  # stored norms never exceed the configured budget
            assert rec["linf"] <= 0.1 + 1e-6

    def test_sweep_writes_csv(self, tmp_path, config_file):
        out = tmp_path / "sweep"
        assert main(["sweep", "--config", str(config_file), "--out", str(out)]) == 0
        csv_text = (out / "clismoke_sweep_epsilon.csv").read_text()
        assert csv_text.splitlines()[0] == "attack,axis,value,roc_auc"
        assert len(csv_text.splitlines()) == 3

    def test_report_writes_csv_and_json(self, tmp_path, config_file):
        out = tmp_path / "report"
        assert main(["report", "--config", str(config_file), "--out", str(out)]) == 0
        assert (out / "clismoke.csv").exists()
        assert (out / "clismoke.json").exists()

    def test_error_exit_nonzero(self, tmp_path, capsys):
        assert main(["roi", "--image", str(tmp_path / "missing.pgm"), "--out", str(tmp_path)]) == 2
        assert "error" in capsys.readouterr().err

    def test_defend_requires_defences(self, tmp_path, config_file, capsys):
        assert main(["defend", "--config", str(config_file), "--out", str(tmp_path)]) == 2
        assert "defence" in capsys.readouterr().err
