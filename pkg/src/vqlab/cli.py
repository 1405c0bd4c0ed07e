"""Experiment runner: subcommand dispatch, seed management, result
persistence, and plot-data emission.

Every run writes a `summary.txt` (also on failure, with an error category)
and CSV artifacts into the output directory. All randomness flows from the
single [run].seed via labeled stream derivation, so identical configs give
identical result files in exact mode (wallclock columns excluded).
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path

import numpy as np

from . import born as bn
from . import classify as cl
from . import clone as cn
from . import cryptattack as ca
from . import metrics as mx
from . import noise as nz
from .circuits import (StructureSearchConfig, build_hardware_efficient,
                       build_ideal_cloner, build_qcibm,
                       param_shift_gradient, qaoa_final_angles,
                       qcibm_couplings)
from .config import ConfigError, ExperimentConfig, parse_config, run_summary_text
from .rng import derive
from .simcore import dumps_circuit, loads_circuit


def _write_csv(path: Path, header: list[str], rows) -> str:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow(row)
    return str(path)


def _dataset_from_config(cfg: ExperimentConfig):
    sec = cfg.section("dataset")
    name = sec.get("name", "vertical")
    n = sec.get("n_points", 100)
    noise_level = sec.get("noise", 0.0)
    seed = cfg.seed
    if name == "vertical":
        return cl.gen_vertical(n, noise_level, seed)
    if name == "diagonal":
        return cl.gen_diagonal(n, noise_level, seed)
    if name == "moons":
        return cl.gen_moons(n, sec.get("noise", 0.05), seed)
    if name == "iris":
        return cl.iris_binary(seed)
    if name == "csv":
        return cl.load_labeled_csv(sec["csv_path"], seed)
    raise ConfigError(f"unknown dataset {name!r}")


def _encoding_from_config(cfg: ExperimentConfig, n_features: int):
    sec = cfg.section("encoding")
    kind = sec.get("kind", "dense_angle")
    theta = sec.get("theta", np.pi / 2)
    phi = sec.get("phi", np.pi)
    if kind == "dense_angle":
        return cl.dense_angle_encoding(n_features, theta, phi)
    if kind == "superdense":
        return cl.superdense_encoding(n_features, theta, phi)
    if kind == "amplitude":
        return cl.amplitude_encoding(n_features)
    if kind == "angle":
        return cl.angle_encoding(n_features)
    raise ConfigError(f"unknown encoding {kind!r}")


def _ansatz_for_classifier(n_qubits: int):
    return cl.single_qubit_ansatz() if n_qubits == 1 else cl.two_qubit_ansatz()


def _family_from_config(cfg: ExperimentConfig) -> cn.StateFamily:
    sec = cfg.section("clone")
    return cn.StateFamily(sec.get("family", "phase_covariant_xy"),
                          sec.get("phi", np.pi / 8))


def _clone_task_from_config(cfg: ExperimentConfig) -> cn.CloneTask:
    sec = cfg.section("clone")
    fam = _family_from_config(cfg)
    m = sec.get("m_inputs", 1)
    n_out = sec.get("n_outputs", 2)
    n_anc = sec.get("n_ancilla", 1)
    return cn.CloneTask.general(m, n_out, fam, n_anc)


# ---------------------------------------------------------------------------
# runners; each returns (metrics dict, artifact list)


def run_sim_selftest(cfg, out):
    rng = derive(cfg.seed, "selftest")
    from .simcore import (FULL, HALF, Gate, Statevector, circuit_unitary,
                          exact_pmf, run_circuit)
    checks = {}
    bell = run_circuit([Gate("H", (0,)), Gate("CNOT", (0, 1))],
                       Statevector.zero(2))
    checks["bell_pmf_ok"] = bool(np.allclose(exact_pmf(bell),
                                             [0.5, 0, 0, 0.5], atol=1e-12))
    u = circuit_unitary([Gate("Rx", (0,), 0.7), Gate("ExpZZ", (0, 1), 0.3, FULL)], 2)
    checks["unitarity_ok"] = bool(np.allclose(u @ u.conj().T, np.eye(4),
                                              atol=1e-12))
    qc = build_qcibm(2, qcibm_couplings(2),
                     rng.uniform(0, 2 * np.pi, 3), qaoa_final_angles())
    pmf = bn.BornMachine(qc, cfg.seed).exact_pmf()
    checks["qcibm_normalized"] = bool(abs(pmf.to_dense().sum() - 1) < 1e-10)
    return {k: str(v) for k, v in checks.items()}, []


def run_classify_train(cfg, out):
    ds = _dataset_from_config(cfg)
    enc = _encoding_from_config(cfg, ds.points.shape[1])
    opt = cfg.section("optimizer")
    res = cl.train_classifier(ds, enc, _ansatz_for_classifier(enc.n_qubits),
                              epochs=opt.get("epochs", 150),
                              eta_init=opt.get("eta_init", 0.1),
                              seed=cfg.seed,
                              restarts=opt.get("restarts", 3))
    art = _write_csv(out / "cost_history.csv", ["epoch", "cost"],
                     list(enumerate(res.cost_history)))
    theta_art = out / "model_theta.csv"
    np.savetxt(theta_art, res.model.circuit.theta)
    return ({"train_accuracy": res.train_accuracy,
             "test_accuracy": res.test_accuracy},
            [art, str(theta_art)])


def run_classify_robust(cfg, out):
    ds = _dataset_from_config(cfg)
    enc = _encoding_from_config(cfg, ds.points.shape[1])
    opt = cfg.section("optimizer")
    res = cl.train_classifier(ds, enc, _ansatz_for_classifier(enc.n_qubits),
                              epochs=opt.get("epochs", 150),
                              eta_init=opt.get("eta_init", 0.1), seed=cfg.seed)
    chan_sec = cfg.section("channel")
    spec = chan_sec.get("spec", "dephasing(p=0.3)")
    channel = nz.parse_channel_spec(spec)
    report = cl.robust_set(res.model, ds, [channel], label=spec)
    rows = [[i, int(a), int(b), int(f)] for i, (a, b, f) in enumerate(
        zip(report.ideal_labels, report.noisy_labels, report.robust_flags))]
    art = _write_csv(out / "robustness.csv",
                     ["index", "ideal_label", "noisy_label", "robust"], rows)
    grid_n = chan_sec.get("grid", 0)
    arts = [art]
    metrics = {"delta_robustness": report.delta,
               "train_accuracy": res.train_accuracy}
    if grid_n:
        grid = np.linspace(0.0, 0.5, grid_n)
        rows = []
        for px in grid:
            for py in grid:
                chan = nz.pauli_channel(1 - px - py, px, py, 0.0)
                rep = cl.robust_set(res.model, ds, [chan])
                rows.append([float(px), float(py), 1.0 - rep.delta])
        arts.append(_write_csv(out / "pauli_grid.csv",
                               ["p_x", "p_y", "misclassified_fraction"], rows))
    return metrics, arts


def run_classify_qela(cfg, out):
    ds = _dataset_from_config(cfg)
    chan = nz.parse_channel_spec(
        cfg.section("channel").get("spec", "amplitude_damping(p=0.3)"))
    grid = [np.array([t, p]) for t in np.linspace(0.4, np.pi, 8)
            for p in np.linspace(0.4, 2 * np.pi, 8)]
    family = [lambda h: cl.dense_angle_encoding(2, h[0], h[1]),
              lambda h: cl.superdense_encoding(2, h[0], h[1])]
    resq = cl.qela(ds, family, [chan], cl.single_qubit_ansatz,
                   [grid, grid], epochs=cfg.section("optimizer").get("epochs", 80),
                   seed=cfg.seed)
    art = _write_csv(out / "qela.csv", ["family", "cost", "hyper"],
                     [[r["family"], r["cost"], ";".join(map(str, r["hyper"]))]
                      for r in resq.per_family])
    return {"best_cost": resq.best_cost,
            "best_encoding": resq.best_encoding.kind}, [art]


def run_classify_boundary(cfg, out):
    ds = _dataset_from_config(cfg)
    enc = _encoding_from_config(cfg, ds.points.shape[1])
    res = cl.train_classifier(ds, enc, _ansatz_for_classifier(enc.n_qubits),
                              seed=cfg.seed)
    grid = np.linspace(0, 1, 41)
    rows = cl.decision_boundary_trace(res.model, grid, grid)
    art = _write_csv(out / "boundary.csv", ["x1", "x2", "label", "p0"], rows)
    return {"train_accuracy": res.train_accuracy}, [art]


def _born_spec_from_config(cfg, n):
    sec = cfg.section("cost")
    kind = sec.get("kind", "sinkhorn")
    kernel = None
    if kind in ("mmd", "stein"):
        kernel = mx.parse_kernel_spec(sec.get("kernel", "gauss"), n)
        if kind == "stein" and sec.get("kernel") is None:
            kernel = mx.exp_hamming_kernel(n)
    return bn.CostSpec(kind, kernel=kernel,
                       epsilon=sec.get("epsilon", 0.1),
                       score=sec.get("score", "exact"),
                       score_eta=sec.get("score_eta", 0.01),
                       score_eigs=sec.get("score_eigs", 3),
                       batch_model=sec.get("batch_model", 250),
                       batch_data=sec.get("batch_data", 250))


def run_born_train(cfg, out):
    sec = cfg.section("dataset")
    n = sec.get("n_bits", 3)
    ds, exact = bn.gen_toy_data(n, sec.get("n_modes", 2),
                                sec.get("flip_p", 0.8),
                                sec.get("n_samples", 500), seed=cfg.seed)
    split = int(0.8 * len(ds.samples))
    train = mx.Pmf.from_samples(ds.samples[:split], n)
    test = mx.Pmf.from_samples(ds.samples[split:], n)
    couplings = qcibm_couplings(n)
    rng = derive(cfg.seed, "born/init")
    circuit = build_qcibm(n, couplings,
                          rng.uniform(0, 2 * np.pi, len(couplings)),
                          qaoa_final_angles())
    bm = bn.BornMachine(circuit, cfg.seed)
    opt = cfg.section("optimizer")
    mode = "exact" if cfg.get("run", "exact", True) else "sampled"
    trace = bn.train_born(bm, train, _born_spec_from_config(cfg, n),
                          epochs=opt.get("epochs", 200),
                          eta_init=opt.get("eta_init", 0.05),
                          seed=cfg.seed, data_test=test, exact_data=exact,
                          mode=mode)
    art = out / "trace.csv"
    trace.write_csv(art)
    return ({"final_tv": trace.final_tv(),
             "initial_tv": trace.records[0]["tv"],
             "trace_digest": trace.digest()}, [str(art)])


def run_born_compile(cfg, out):
    sec = cfg.section("dataset")
    n = sec.get("n_bits", 2)
    target, _ = bn.gen_weak_compile_target(n, seed=cfg.seed)
    couplings = qcibm_couplings(n)
    rng = derive(cfg.seed, "compile/init")
    circuit = build_qcibm(n, couplings,
                          rng.uniform(0, 2 * np.pi, len(couplings)),
                          qaoa_final_angles())
    bm = bn.BornMachine(circuit, cfg.seed)
    opt = cfg.section("optimizer")
    spec = _born_spec_from_config(cfg, n)
    trace = bn.train_born(bm, target, spec, epochs=opt.get("epochs", 200),
                          eta_init=opt.get("eta_init", 0.05), seed=cfg.seed,
                          exact_data=target)
    art = out / "trace.csv"
    trace.write_csv(art)
    return {"final_tv": trace.final_tv(),
            "trace_digest": trace.digest()}, [str(art)]


def run_born_compare(cfg, out):
    sec = cfg.section("dataset")
    n = sec.get("n_bits", 4)
    ds, exact = bn.gen_toy_data(n, sec.get("n_modes", 2),
                                sec.get("flip_p", 0.75),
                                sec.get("n_samples", 500), seed=cfg.seed)
    train = mx.Pmf.from_samples(ds.samples, n)
    comp = cfg.section("compare")
    rows = bn.compare_born_vs_rbm(n, comp.get("layers", 2), train, exact,
                                  seeds=range(comp.get("n_seeds", 5)),
                                  epochs=cfg.section("optimizer").get("epochs", 150))
    art = _write_csv(out / "comparison.csv",
                     ["seed", "n_params", "tv_born", "tv_rbm"],
                     [[r["seed"], r["n_params"], r["tv_born"], r["tv_rbm"]]
                      for r in rows])
    return {"median_tv_born": float(np.median([r["tv_born"] for r in rows])),
            "median_tv_rbm": float(np.median([r["tv_rbm"] for r in rows]))}, [art]


def run_clone_train(cfg, out):
    task = _clone_task_from_config(cfg)
    sec = cfg.section("search")
    nn = sec.get("connectivity", "full") == "nn"
    pool = cn.default_pool_1to2(task.n_qubits, nearest_neighbour=nn)
    cost_kind = cfg.section("cost").get("kind", "local")
    best = None
    for s in range(sec.get("n_seeds", 1)):
        scfg = StructureSearchConfig(
            seq_len=sec.get("seq_len", 35),
            iterations=sec.get("iterations", 50),
            epochs_per_iteration=sec.get("epochs_per_iteration", 100),
            early_stop_epochs=sec.get("early_stop_epochs", 30),
            eta_init=cfg.section("optimizer").get("eta_init", 0.05),
            seed=cfg.seed + s)
        circuit, ev, cost, trace = cn.train_cloner(
            task, pool, scfg, cost_kind, k_states=sec.get("k_states", 30))
        if best is None or cost < best[2]:
            best = (circuit, ev, cost, trace)
    circuit, ev, cost, trace = best
    arts = [_write_csv(out / "search_trace.csv",
                       ["iteration", "epoch", "cost", "best_cost",
                        "gate_sequence_hash"],
                       [[t["iteration"], t["epochs"], t["cost"],
                         t["best_cost"], t["gate_sequence_hash"]]
                        for t in trace])]
    (out / "circuit.txt").write_text(dumps_circuit(circuit.bind()),
                                     encoding="utf-8")
    arts.append(str(out / "circuit.txt"))
    arts.append(_write_csv(out / "clone_eval.csv",
                           ["state_index"]
                           + [f"F_{j+1}" for j in range(task.n_outputs)]
                           + ["F_G"], ev.rows()))
    return {"best_cost": cost,
            "mean_local_fidelities": ev.mean_local.tolist(),
            "mean_global_fidelity": ev.mean_global}, arts


def _circuit_task_from_config(cfg):
    task = _clone_task_from_config(cfg)
    path = cfg.section("crypt").get("circuit_path") or \
        cfg.section("ansatz").get("cloner")
    sec = cfg.section("ansatz")
    kind = sec.get("cloner", "phase_covariant")
    circuit = build_ideal_cloner(kind)
    ideal_task = cn.CloneTask(1, 2, 3, (0,), (1, 2), task.family)
    return circuit, ideal_task


def run_clone_eval(cfg, out):
    circuit, task = _circuit_task_from_config(cfg)
    states = task.family.draw(cfg.section("search").get("k_states", 64),
                              cfg.seed)
    ev = cn.evaluate_cloner(task, circuit, states)
    art = _write_csv(out / "clone_eval.csv",
                     ["state_index"]
                     + [f"F_{j+1}" for j in range(task.n_outputs)] + ["F_G"],
                     ev.rows())
    return {"mean_local_fidelities": ev.mean_local.tolist(),
            "mean_global_fidelity": ev.mean_global}, [art]


def run_clone_faithfulness(cfg, out):
    circuit, task = _circuit_task_from_config(cfg)
    which = cfg.section("cost").get("kind", "squared")
    rep = cn.faithfulness_check(task, circuit, which, seed=cfg.seed)
    return ({"epsilon": rep.epsilon, "ba_bound": rep.ba_bound,
             "tr_bound": rep.tr_bound, "max_ba": rep.max_ba,
             "max_tr": rep.max_tr, "satisfied": str(rep.satisfied),
             "normalization": rep.normalization}, [])


def run_clone_ordering(cfg, out):
    circuit, task = _circuit_task_from_config(cfg)
    res = cn.cost_ordering_check(task, circuit, seed=cfg.seed)
    return {k: (str(v) if isinstance(v, bool) else v)
            for k, v in res.items()}, []


def _crypt_cloner(cfg):
    """'ideal' or (circuit, task) loaded from [crypt].circuit_path."""
    sec = cfg.section("crypt")
    if sec.get("cloner", "ideal") != "circuit":
        return "ideal"
    gates = loads_circuit(Path(sec["circuit_path"]).read_text(encoding="utf-8"))
    from .circuits import ParamCircuit
    n = max(q for g in gates for q in g.targets) + 1
    circuit = ParamCircuit(n, gates, [None] * len(gates), np.zeros(0))
    task = _clone_task_from_config(cfg)
    if task.n_qubits != n:
        task = cn.CloneTask(1, 2, n, (0,), (0, 1), task.family)
    return circuit, task


def run_crypt_mayers(cfg, out):
    rep = ca.mayers_attack(cloner=_crypt_cloner(cfg))
    art = _write_csv(out / "attack.csv",
                     ["protocol", "p_guess", "p_detect", "p_success", "bias"],
                     [[rep.protocol, rep.p_guess, rep.p_detect,
                       rep.p_success, rep.bias]])
    return {"p_guess": rep.p_guess, "p_fail": 1 - rep.p_guess,
            "bias": rep.bias, "F_L": rep.inputs["F_L"]}, [art]


def run_crypt_aharonov1(cfg, out):
    rep = ca.aharonov_attack1(cfg.section("crypt").get("phi", np.pi / 8),
                              cloner=_crypt_cloner(cfg))
    art = _write_csv(out / "attack.csv",
                     ["protocol", "p_guess", "p_detect", "p_success", "bias"],
                     [[rep.protocol, rep.p_guess, rep.p_detect,
                       rep.p_success, rep.bias]])
    return {"p_success": rep.p_success, "bias": rep.bias}, [art]


def run_crypt_aharonov2(cfg, out):
    rep = ca.aharonov_attack2_exact(cfg.section("crypt").get("phi", np.pi / 8))
    sec = cfg.section("crypt")
    lo, hi = ca.aharonov_attack2_bounds(sec.get("f_l", 0.989),
                                        sec.get("overlap", 1 / np.sqrt(2)))
    art = _write_csv(out / "attack.csv",
                     ["protocol", "p_guess", "p_detect", "p_success", "bias"],
                     [[rep.protocol, rep.p_guess, rep.p_detect,
                       rep.p_success, rep.bias]])
    return {"p_success": rep.p_success, "bias": rep.bias,
            "bound_lower": lo, "bound_upper": hi}, [art]


def run_crypt_qkd(cfg, out):
    rep = ca.qkd_critical_error(_crypt_cloner(cfg))
    return {"chi_min": rep.chi_min, "d_crit": rep.d_crit,
            "residual": rep.residual}, []


def run_bench_gradcheck(cfg, out):
    """Parameter-shift vs central finite differences on random circuits."""
    rng = derive(cfg.seed, "bench/gradcheck")
    from .circuits import ParamCircuit
    from .simcore import FULL, Gate
    worst = 0.0
    n_done = 0
    for trial in range(cfg.section("search").get("iterations", 20)):
        n = int(rng.integers(1, 4))
        circuit = build_hardware_efficient(
            n, int(rng.integers(1, 3)),
            [(i, i + 1) for i in range(n - 1)] or [(0, 0)] if n > 1 else [])
        theta = rng.uniform(0, 2 * np.pi, circuit.n_params)
        obs = rng.normal(size=2**n)   # shift rule needs a linear observable

        def cost(th):
            return float(circuit.run(th).probabilities() @ obs)

        g = param_shift_gradient(cost, circuit, theta)
        h = 1e-5
        for k in range(circuit.n_params):
            tp, tm = theta.copy(), theta.copy()
            tp[k] += h
            tm[k] -= h
            fd = (cost(tp) - cost(tm)) / (2 * h)
            worst = max(worst, abs(g[k] - fd))
            n_done += 1
    return {"max_abs_error": worst, "checks": n_done}, []


def run_bench_variance(cfg, out):
    res_local = cn.grad_variance_probe("local", [2, 3, 4, 5],
                                       trials=40, seed=cfg.seed)
    res_global = cn.grad_variance_probe("global", [2, 3, 4, 5],
                                        trials=40, seed=cfg.seed)
    rows = [["local", n, v] for n, v in res_local["variances"].items()]
    rows += [["global", n, v] for n, v in res_global["variances"].items()]
    art = _write_csv(out / "variance.csv", ["cost", "n", "variance"], rows)
    return {"local_exponent": res_local["exponent"],
            "global_exponent": res_global["exponent"]}, [art]


RUNNERS = {
    ("sim", "selftest"): run_sim_selftest,
    ("classify", "train"): run_classify_train,
    ("classify", "robust"): run_classify_robust,
    ("classify", "qela"): run_classify_qela,
    ("classify", "boundary"): run_classify_boundary,
    ("born", "train"): run_born_train,
    ("born", "compile"): run_born_compile,
    ("born", "compare"): run_born_compare,
    ("clone", "train"): run_clone_train,
    ("clone", "eval"): run_clone_eval,
    ("clone", "faithfulness"): run_clone_faithfulness,
    ("clone", "ordering"): run_clone_ordering,
    ("crypt", "mayers"): run_crypt_mayers,
    ("crypt", "aharonov1"): run_crypt_aharonov1,
    ("crypt", "aharonov2"): run_crypt_aharonov2,
    ("crypt", "qkd"): run_crypt_qkd,
    ("bench", "gradcheck"): run_bench_gradcheck,
    ("bench", "variance"): run_bench_variance,
}


def emit_plotdata(trace_paths: list, kind: str, out_path) -> str:
    """Long-format CSV (series,x,y) assembled from result CSVs."""
    rows = []
    if kind == "tv_series":
        for path in trace_paths:
            with open(path, encoding="utf-8") as fh:
                reader = csv.DictReader(fh)
                for rec in reader:
                    rows.append([Path(path).stem, rec["epoch"], rec["tv"]])
        header = ["series", "epoch", "tv"]
    elif kind == "fidelity_violin":
        for path in trace_paths:
            with open(path, encoding="utf-8") as fh:
                reader = csv.DictReader(fh)
                for rec in reader:
                    for key, val in rec.items():
                        if key.startswith("F_"):
                            rows.append([key, rec["state_index"], val])
        header = ["series", "state_index", "fidelity"]
    elif kind == "robust_grid":
        for path in trace_paths:
            with open(path, encoding="utf-8") as fh:
                reader = csv.DictReader(fh)
                for rec in reader:
                    rows.append([rec["p_x"], rec["p_y"],
                                 rec["misclassified_fraction"]])
        header = ["p_x", "p_y", "misclassified_fraction"]
    else:
        raise ValueError(f"unknown plotdata kind {kind!r}")
    return _write_csv(Path(out_path), header, rows)


def run(cfg: ExperimentConfig, group: str, action: str, out_dir=None) -> int:
    out = Path(out_dir or cfg.get("run", "out_dir", "results"))
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    runner = RUNNERS.get((group, action))
    if runner is None:
        raise ConfigError(f"unknown subcommand {group} {action}")
    try:
        metrics, artifacts = runner(cfg, out)
        status = "ok"
        code = 0
    except ConfigError:
        raise
    except Exception as exc:  # noqa: BLE001 - summary must record any failure
        metrics = {"error": f"{type(exc).__name__}: {exc}"}
        artifacts = []
        status = "error:runtime"
        code = 3
    summary = run_summary_text(cfg, f"{group} {action}", metrics, artifacts,
                               time.perf_counter() - t0, status=status)
    (out / "summary.txt").write_text(summary, encoding="utf-8")
    print(summary, end="")
    return code


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="vqlab",
        description="variational quantum machine-learning workbench")
    parser.add_argument("group", choices=sorted({g for g, _ in RUNNERS}))
    parser.add_argument("action")
    parser.add_argument("--config", required=False)
    parser.add_argument("--seed", type=int, default=None,
                        help="override [run].seed")
    parser.add_argument("--out-dir", default=None)
    parser.add_argument("--exact", action="store_true", default=None)
    parser.add_argument("--shots", type=int, default=None)
    parser.add_argument("--plotdata", default=None,
                        help="emit plot data of this kind from --traces")
    parser.add_argument("--traces", nargs="*", default=[])
    args = parser.parse_args(argv)
    try:
        if args.plotdata:
            out = emit_plotdata(args.traces, args.plotdata,
                                Path(args.out_dir or ".") / "plotdata.csv")
            print(out)
            return 0
        if args.config:
            cfg = parse_config(args.config)
        else:
            cfg = ExperimentConfig({"run": {"seed": 0}})
        if args.seed is not None:
            cfg.sections.setdefault("run", {})["seed"] = args.seed
        if args.exact is not None:
            cfg.sections.setdefault("run", {})["exact"] = True
        if args.shots is not None:
            cfg.sections.setdefault("run", {})["shots"] = args.shots
            cfg.sections["run"]["exact"] = False
        return run(cfg, args.group, args.action, args.out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
