import csv
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from vqlab import cli
from vqlab.config import ConfigError, ExperimentConfig, parse_config


def write_cfg(tmp_path, body):
    path = tmp_path / "exp.ini"
    path.write_text(body, encoding="utf-8")
    return path


BORN_CFG = """[run]
seed = 5

[dataset]
n_bits = 2
n_modes = 2
flip_p = 0.8
n_samples = 200

[cost]
kind = sinkhorn
epsilon = 0.1

[optimizer]
epochs = 25
"""


# ---------------------------------------------------------------------------
# config parsing


def test_minimal_config_roundtrip(tmp_path):
    path = write_cfg(tmp_path, "[run]\nseed = 7\n")
    cfg = parse_config(path)
    assert cfg.seed == 7
    from vqlab.config import write_config
    out = tmp_path / "copy.ini"
    write_config(cfg, out)
    assert parse_config(out).sections == cfg.sections


def test_unknown_key_rejected_with_path(tmp_path):
    path = write_cfg(tmp_path, "[run]\nseed = 1\nwobble = 2\n")
    with pytest.raises(ConfigError, match=r"\[run\].wobble"):
        parse_config(path)


def test_unknown_section_rejected(tmp_path):
    path = write_cfg(tmp_path, "[run]\nseed = 1\n\n[nope]\nx = 1\n")
    with pytest.raises(ConfigError, match=r"\[nope\]"):
        parse_config(path)


def test_duplicate_key_rejected(tmp_path):
    path = write_cfg(tmp_path, "[run]\nseed = 1\nseed = 2\n")
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config(path)


def test_missing_seed_rejected(tmp_path):
    path = write_cfg(tmp_path, "[dataset]\nname = vertical\n")
    with pytest.raises(ConfigError, match="seed"):
        parse_config(path)


def test_malformed_value_rejected(tmp_path):
    path = write_cfg(tmp_path, "[run]\nseed = banana\n")
    with pytest.raises(ConfigError, match=r"\[run\].seed"):
        parse_config(path)


def test_digest_stable_under_reordering(tmp_path):
    a = parse_config(write_cfg(tmp_path, "[run]\nseed = 1\nout_dir = x\n"))
    b = parse_config(write_cfg(tmp_path, "[run]\nout_dir = x\nseed = 1\n"))
    assert a.digest() == b.digest()


# ---------------------------------------------------------------------------
# run dispatch


def test_born_train_writes_trace_with_expected_header(tmp_path):
    cfg = parse_config(write_cfg(tmp_path, BORN_CFG))
    code = cli.run(cfg, "born", "train", out_dir=tmp_path / "out")
    assert code == 0
    with open(tmp_path / "out" / "trace.csv", encoding="utf-8") as fh:
        header = fh.readline().strip()
    assert header == "epoch,cost_train,cost_test,tv,wallclock_ms"
    assert (tmp_path / "out" / "summary.txt").exists()


def test_identical_config_and_seed_identical_digests(tmp_path):
    cfg = parse_config(write_cfg(tmp_path, BORN_CFG))
    cli.run(cfg, "born", "train", out_dir=tmp_path / "a")
    cli.run(cfg, "born", "train", out_dir=tmp_path / "b")

    def result_columns(path):
        with open(path, encoding="utf-8") as fh:
            return [row[:4] for row in csv.reader(fh)]  # wallclock excluded

    assert result_columns(tmp_path / "a" / "trace.csv") == \
        result_columns(tmp_path / "b" / "trace.csv")
    sa = (tmp_path / "a" / "summary.txt").read_text()
    sb = (tmp_path / "b" / "summary.txt").read_text()
    get = lambda s: [l for l in s.splitlines() if "trace_digest" in l]
    assert get(sa) == get(sb)


def test_crypt_aharonov2_one_line_report(tmp_path):
    cfg = ExperimentConfig({"run": {"seed": 0}})
    code = cli.run(cfg, "crypt", "aharonov2", out_dir=tmp_path)
    assert code == 0
    summary = (tmp_path / "summary.txt").read_text()
    assert "bias: 0.25" in summary
    with open(tmp_path / "attack.csv", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 2  # header + one report row


def test_sim_selftest(tmp_path):
    cfg = ExperimentConfig({"run": {"seed": 0}})
    assert cli.run(cfg, "sim", "selftest", out_dir=tmp_path) == 0
    text = (tmp_path / "summary.txt").read_text()
    assert "bell_pmf_ok: True" in text


def test_failed_run_still_writes_summary(tmp_path):
    cfg = ExperimentConfig({"run": {"seed": 0},
                            "dataset": {"name": "csv",
                                        "csv_path": "/nonexistent.csv"}})
    code = cli.run(cfg, "classify", "train", out_dir=tmp_path)
    assert code == 3
    text = (tmp_path / "summary.txt").read_text()
    assert "status: error:runtime" in text


def test_unknown_subcommand_raises():
    cfg = ExperimentConfig({"run": {"seed": 0}})
    with pytest.raises(ConfigError):
        cli.run(cfg, "born", "destroy")


def test_main_entrypoint_and_seed_override(tmp_path):
    out = tmp_path / "o"
    rc = cli.main(["crypt", "qkd", "--seed", "3", "--out-dir", str(out)])
    assert rc == 0
    assert "d_crit: 0.1464" in (out / "summary.txt").read_text()


def test_main_bad_config_returns_2(tmp_path):
    bad = write_cfg(tmp_path, "[run]\nseed = 1\nbogus = 1\n")
    rc = cli.main(["sim", "selftest", "--config", str(bad)])
    assert rc == 2


# ---------------------------------------------------------------------------
# plot data


def test_emit_plotdata_tv_series(tmp_path):
    cfg = parse_config(write_cfg(tmp_path, BORN_CFG))
    cli.run(cfg, "born", "train", out_dir=tmp_path / "out")
    dest = tmp_path / "plot.csv"
    cli.emit_plotdata([str(tmp_path / "out" / "trace.csv")], "tv_series", dest)
    with open(dest, encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["series", "epoch", "tv"]
    assert len(rows) == 26


def test_emit_plotdata_fidelity_violin(tmp_path):
    cfg = ExperimentConfig({"run": {"seed": 0},
                            "ansatz": {"cloner": "phase_covariant"},
                            "clone": {"family": "phase_covariant_xy"},
                            "search": {"k_states": 8}})
    cli.run(cfg, "clone", "eval", out_dir=tmp_path)
    dest = tmp_path / "violin.csv"
    cli.emit_plotdata([str(tmp_path / "clone_eval.csv")],
                      "fidelity_violin", dest)
    with open(dest, encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["series", "state_index", "fidelity"]
    assert len(rows) == 1 + 8 * 3  # F_1, F_2, F_G per state


def test_emit_plotdata_robust_grid(tmp_path):
    src_csv = tmp_path / "pauli_grid.csv"
    src_csv.write_text("p_x,p_y,misclassified_fraction\n"
                       "0.0,0.0,0.0\n0.3,0.3,0.8\n")
    dest = tmp_path / "grid.csv"
    cli.emit_plotdata([str(src_csv)], "robust_grid", dest)
    with open(dest, encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["p_x", "p_y", "misclassified_fraction"]
    assert len(rows) == 3


def test_emit_plotdata_unknown_kind(tmp_path):
    with pytest.raises(ValueError):
        cli.emit_plotdata([], "wat", tmp_path / "x.csv")
