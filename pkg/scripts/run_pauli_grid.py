"""Train the vertical-dataset single-qubit classifier and emit the
(p_X, p_Y) misclassification heat grid plus the per-channel robustness
reports. Output lands in results/pauli_grid/."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from vqlab.cli import run
from vqlab.config import ExperimentConfig

cfg = ExperimentConfig({
    "run": {"seed": 2},
    "dataset": {"name": "vertical", "n_points": 100},
    "encoding": {"kind": "dense_angle"},
    "optimizer": {"epochs": 150, "eta_init": 0.1},
    "channel": {"spec": "dephasing(p=0.3)", "grid": 21},
})

if __name__ == "__main__":
    sys.exit(run(cfg, "classify", "robust",
                 out_dir=Path("results") / "pauli_grid"))
