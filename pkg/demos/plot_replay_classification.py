"""
Replay evaluation on a classification table
===========================================

A labelled dataset turns into a contextual bandit: each row is a user,
its features are the context and the class label is the only arm with
reward 1.  Here a small synthetic table stands in for a real file, is
written to CSV, loaded back, and replayed with LinUCB and LinTS.
"""
import tempfile
from pathlib import Path

import numpy as np

from pbsb.environments import load_classification_table
from pbsb.runner import ExperimentConfig, run_experiment

###############################################################################
# Five classes, each a blob in eight dimensions.
rng = np.random.default_rng(1)
n, d, classes = 600, 8, 5
centers = rng.normal(0, 2, size=(classes, d))
labels = rng.integers(0, classes, n)
features = centers[labels] + rng.normal(size=(n, d))

tmp = Path(tempfile.mkdtemp())
path = tmp / "blobs.csv"
cols = [f"f{i}" for i in range(d)]
with open(path, "w") as fh:
    fh.write(",".join(cols + ["label"]) + "\n")
    for row, y in zip(features, labels):
        fh.write(",".join(f"{v:.4f}" for v in row) + f",{y}\n")

env = load_classification_table(path, cols, "label")
print(env.metadata()["m"], "arms,", env.d, "features,", env.n_rows, "rows")

###############################################################################
# With ``k = 2`` a round succeeds when the true class is among the two
# recommended arms.  Random guessing would score 2/5.
cfg = ExperimentConfig.from_mapping({
    "horizon": "3000",
    "runs": "3",
    "k": "2",
    "grid.policies": "linucb, lints",
    "grid.strategies": "bandit, pbsb-oe",
})
report = run_experiment(cfg, env, grid=True)
for cell in report.cells:
    d_ = cell.as_dict()
    print(f"{d_['policy']:>7} {d_['strategy']:>8}  Acc(T)={d_['acc_T']['mean']:.3f}")
