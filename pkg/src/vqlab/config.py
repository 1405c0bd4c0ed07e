"""Experiment configuration: sectioned key=value text files with strict
unknown-key rejection, plus the run-summary document.

Format example::

    [run]
    seed = 7
    out_dir = results/

    [born]
    n_qubits = 3
    cost = sinkhorn
    epsilon = 0.1
"""

from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path


class ConfigError(ValueError):
    pass


# every known key with a parser; unknown keys are rejected with their path
_SCHEMAS = {
    "run": {
        "seed": int,
        "out_dir": str,
        "exact": lambda v: v.lower() in ("1", "true", "yes"),
        "shots": int,
    },
    "dataset": {
        "name": str,            # vertical | diagonal | moons | iris | toy | csv
        "n_points": int,
        "noise": float,
        "csv_path": str,
        "n_bits": int,
        "n_modes": int,
        "flip_p": float,
        "n_samples": int,
    },
    "ansatz": {
        "kind": str,            # qcibm | hardware_efficient | ideal_cloner
        "n_qubits": int,
        "layers": int,
        "final_angles": str,    # qaoa | iqp | zero
        "cloner": str,          # universal | phase_covariant
    },
    "cost": {
        "kind": str,            # mmd | kl | stein | sinkhorn | local | squared | global | asymmetric
        "kernel": str,
        "epsilon": float,
        "score": str,
        "score_eta": float,
        "score_eigs": int,
        "batch_model": int,
        "batch_data": int,
        "asymmetry_p": float,
    },
    "optimizer": {
        "eta_init": float,
        "epochs": int,
        "restarts": int,
    },
    "channel": {
        "spec": str,
        "placement": str,
        "grid": int,
    },
    "encoding": {
        "kind": str,
        "theta": float,
        "phi": float,
    },
    "search": {
        "seq_len": int,
        "iterations": int,
        "epochs_per_iteration": int,
        "early_stop_epochs": int,
        "n_seeds": int,
        "k_states": int,
        "connectivity": str,    # full | nn
    },
    "clone": {
        "family": str,          # haar | phase_covariant_xy | fixed_overlap | four_state
        "phi": float,
        "m_inputs": int,
        "n_outputs": int,
        "n_ancilla": int,
    },
    "crypt": {
        "cloner": str,          # ideal | circuit
        "circuit_path": str,
        "phi": float,
        "f_l": float,
        "overlap": float,
    },
    "compare": {
        "layers": int,
        "n_seeds": int,
    },
}


@dataclass
class ExperimentConfig:
    sections: dict
    path: str = ""

    @property
    def seed(self) -> int:
        return self.sections["run"]["seed"]

    def get(self, section: str, key: str, default=None):
        return self.sections.get(section, {}).get(key, default)

    def section(self, name: str) -> dict:
        return self.sections.get(name, {})

    def digest(self) -> str:
        """Stable digest of the parsed content (field order independent)."""
        canon = json.dumps(self.sections, sort_keys=True, default=str)
        return hashlib.sha256(canon.encode()).hexdigest()[:16]


def parse_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    cp = configparser.ConfigParser(interpolation=None, strict=True)
    try:
        cp.read_string(path.read_text(encoding="utf-8"), source=str(path))
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"duplicate key: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    sections: dict = {}
    for sec in cp.sections():
        if sec not in _SCHEMAS:
            raise ConfigError(f"unknown section [{sec}] in {path}")
        schema = _SCHEMAS[sec]
        out = {}
        for key, raw in cp.items(sec):
            if key not in schema:
                raise ConfigError(f"unknown key [{sec}].{key} in {path}")
            try:
                out[key] = schema[key](raw)
            except (TypeError, ValueError) as exc:
                raise ConfigError(
                    f"malformed value [{sec}].{key} = {raw!r}: {exc}") from exc
        sections[sec] = out
    if "run" not in sections or "seed" not in sections["run"]:
        raise ConfigError(f"[run].seed is mandatory ({path})")
    return ExperimentConfig(sections, str(path))


def write_config(cfg: ExperimentConfig, path):
    lines = []
    for sec, kv in cfg.sections.items():
        lines.append(f"[{sec}]")
        for key, val in kv.items():
            lines.append(f"{key} = {val}")
        lines.append("")
    Path(path).write_text("\n".join(lines), encoding="utf-8")


def run_summary_text(cfg: ExperimentConfig, subcommand: str, metrics: dict,
                     artifacts: list, wallclock_s: float,
                     status: str = "ok", version: str = "0.1.0") -> str:
    """Structured run-summary document (one `key: value` per line)."""
    lines = [
        "vqlab run summary",
        "=================",
        f"subcommand: {subcommand}",
        f"status: {status}",
        f"config_digest: {cfg.digest()}",
        f"seed: {cfg.seed}",
        f"tool_version: {version}",
        f"wallclock_s: {wallclock_s:.3f}",
        "",
        "[metrics]",
    ]
    for key in sorted(metrics):
        lines.append(f"{key}: {metrics[key]}")
    lines.append("")
    lines.append("[artifacts]")
    for art in artifacts:
        lines.append(f"- {art}")
    lines.append("")
    lines.append("[config]")
    for sec, kv in sorted(cfg.sections.items()):
        for key, val in sorted(kv.items()):
            lines.append(f"{sec}.{key}: {val}")
    return "\n".join(lines) + "\n"
