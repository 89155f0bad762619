#!/usr/bin/env python3
"""A miniature end-to-end benchmark: config -> experiment -> reports.

Writes the same CSV/JSON artifacts the command-line harness produces,
then prints the per-attack mean rows.
"""

from pathlib import Path

from advlab.bench import emit_report, parse_config, run_experiment, sweep, sweep_to_csv

CONFIG = """
[experiment]
name = mini
trials = 2
seed = 0

[dataset]
n = 300
size = 32
seed = 40

[network]
arch = blob_cnn

[train]
epochs = 20
batch_size = 16
learning_rate = 0.1
stop_accuracy = 0.995
seed = 0

[attack.fgsm]
epsilon = 0.04

[attack.mifgsm]
epsilon = 0.04
iterations = 12
initial_decay = 0.5

[attack.kryptonite]
epsilon = 0.04
iterations = 16
decay_weight = 0.006
initial_decay = 0.5

[sweep]
axis = epsilon
values = 0, 0.02, 0.04
attacks = fgsm, mifgsm
samples = 40
"""

out = Path("demo_out")
out.mkdir(exist_ok=True)
cfg_path = out / "mini.ini"
cfg_path.write_text(CONFIG)

cfg = parse_config(cfg_path)
rows = run_experiment(cfg)
emit_report(rows, "csv", out / "mini.csv")
emit_report(rows, "json", out / "mini.json")

print(f"{'row':8s} {'attack':12s} {'trial':>5s} {'acc@attack':>10s} {'auc':>6s} {'L2%':>6s}")
for r in rows:
    if r.trial == -1 and r.row == "attack":
        print(
            f"{r.row:8s} {r.attack:12s} {'mean':>5s} "
            f"{r.accuracy_under_attack:10.3f} {r.roc_auc:6.3f} {r.pert_mean_percent:6.2f}"
        )

records = sweep(cfg)
sweep_to_csv(records, out / "mini_sweep.csv")
print(f"\nepsilon sweep ({len(records)} points):")
for rec in records:
    print(f"  {rec['attack']:8s} eps={rec['value']:.2f} auc={rec['roc_auc']:.3f}")
print(f"\nartifacts in {out}/")
