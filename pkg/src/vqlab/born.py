"""Quantum-circuit Born machine training with four differentiable costs
(MMD, exact KL, kernelized Stein discrepancy, Sinkhorn divergence), TV
benchmarking, a weak-compilation task, and an exact small-scale RBM baseline.

Exact mode evaluates analytic output pmfs (and shifted pmfs for gradients);
sampling mode uses the estimator forms with per-epoch batches. Model
probability vectors are indexed by little-endian integers, matching
:mod:`vqlab.simcore`.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import metrics as mx
from .circuits import AdamState, ParamCircuit, adam_step, shifted_thetas
from .metrics import Kernel, Pmf, ScoreSource
from .rng import derive
from .simcore import int_to_bits


# ---------------------------------------------------------------------------
# model


@dataclass
class BornMachine:
    circuit: ParamCircuit
    seed: int = 0

    @property
    def n_qubits(self) -> int:
        return self.circuit.n_qubits

    def exact_pmf(self, theta: Optional[np.ndarray] = None) -> Pmf:
        if self.n_qubits > 14:
            raise ValueError("exact mode capped at 14 qubits")
        probs = self.circuit.run(theta).probabilities()
        return Pmf.dense(probs / probs.sum(), self.n_qubits)

    def sample(self, shots: int, rng: np.random.Generator,
               theta: Optional[np.ndarray] = None) -> np.ndarray:
        probs = self.circuit.run(theta).probabilities()
        return rng.choice(len(probs), size=shots, p=probs / probs.sum())

    def empirical_pmf(self, shots: int, rng: np.random.Generator,
                      theta: Optional[np.ndarray] = None) -> Pmf:
        return Pmf.from_samples(self.sample(shots, rng, theta), self.n_qubits)


def born_exact_pmf(bm: BornMachine) -> Pmf:
    return bm.exact_pmf()


def born_sample(bm: BornMachine, shots: int, seed: Optional[int] = None) -> Pmf:
    rng = derive(bm.seed if seed is None else seed, "born/sample")
    return bm.empirical_pmf(shots, rng)


# ---------------------------------------------------------------------------
# cost specifications


@dataclass
class CostSpec:
    """kind: mmd | kl | stein | sinkhorn.

    Exact mode works with full pmfs; sampling mode draws batch_model /
    batch_data samples per evaluation. Stein takes its data score from
    `score` ('exact', 'identity' or 'spectral'); Sinkhorn uses a Hamming
    ground cost with regularizer `epsilon`.
    """

    kind: str
    kernel: Optional[Kernel] = None
    epsilon: float = 0.1
    sinkhorn_iters: int = 5000
    _sinkhorn_warm: object = None  # last SinkhornState, reused across epochs
    score: str = "exact"
    score_eta: float = 0.01
    score_eigs: int = 3
    batch_model: int = 250
    batch_data: int = 250

    def needs_kernel(self) -> bool:
        return self.kind in ("mmd", "stein")


def _model_pmf_vector(bm: BornMachine, theta) -> np.ndarray:
    p = bm.circuit.run(theta).probabilities()
    return p / p.sum()


def _pmf_derivatives(bm: BornMachine, theta) -> np.ndarray:
    """(n_params, 2^n) matrix of exact dp(x)/dtheta_k via shifted pmfs."""
    out = np.empty((bm.circuit.n_params, 2**bm.n_qubits))
    for slot in range(bm.circuit.n_params):
        up, down, factor = shifted_thetas(bm.circuit, slot, theta)
        out[slot] = factor * (_model_pmf_vector(bm, up)
                              - _model_pmf_vector(bm, down))
    return out


class InfiniteCost(RuntimeError):
    """Raised when exact KL hits zero model mass on the data support."""


def _stein_gram(spec: CostSpec, data: Pmf, n: int) -> np.ndarray:
    """Stein-kernel Gram matrix over all 2^n outcomes wrt the data score."""
    if spec.score == "exact":
        score: ScoreSource = mx.score_exact(data)
    elif spec.score == "identity":
        xs, ws = data.support_weights()
        score = mx.score_identity(xs, n, spec.kernel, spec.score_eta, weights=ws)
    elif spec.score == "spectral":
        xs, ws = data.support_weights()
        score = mx.score_spectral(xs, n, spec.kernel, spec.score_eigs,
                                  weights=ws)
    else:
        raise ValueError(f"unknown score source {spec.score!r}")
    allx = np.arange(2**n)
    return mx.stein_kernel(allx, allx, score, spec.kernel)


def cost_and_grad(bm: BornMachine, data: Pmf, spec: CostSpec,
                  theta: Optional[np.ndarray] = None):
    """Exact-mode cost and full gradient vector (length = parameter count)."""
    n = bm.n_qubits
    theta = bm.circuit.theta if theta is None else np.asarray(theta, float)
    p = _model_pmf_vector(bm, theta)
    pi = data.to_dense()
    if spec.kind == "kl":
        # in bits, matching the metrics module's convention
        mask = pi > 0
        if np.any(p[mask] <= 1e-300):
            raise InfiniteCost("model assigns zero probability on data support")
        cost = float(np.sum(pi[mask] * (np.log2(pi[mask]) - np.log2(p[mask]))))
        dp = _pmf_derivatives(bm, theta)
        grad = -(dp[:, mask] @ (pi[mask] / p[mask])) / np.log(2.0)
        return cost, grad
    if spec.kind == "mmd":
        allx = np.arange(2**n)
        gram = spec.kernel.gram(allx, allx)
        diff = p - pi
        cost = float(diff @ gram @ diff)
        dp = _pmf_derivatives(bm, theta)
        grad = 2.0 * dp @ (gram @ diff)
        return cost, grad
    if spec.kind == "stein":
        gram = _stein_gram(spec, data, n)
        cost = float(p @ gram @ p)
        dp = _pmf_derivatives(bm, theta)
        grad = dp @ ((gram + gram.T) @ p)
        return cost, grad
    if spec.kind == "sinkhorn":
        p_pmf = Pmf.dense(p, n)
        value, state = mx.sinkhorn_divergence(p_pmf, data, spec.epsilon,
                                              max_iter=spec.sinkhorn_iters,
                                              warm_start=spec._sinkhorn_warm)
        spec._sinkhorn_warm = state
        phi = mx.sinkhorn_potential_phi(np.arange(2**n), state)
        dp = _pmf_derivatives(bm, theta)
        return float(value), dp @ phi
    raise ValueError(f"unknown cost kind {spec.kind!r}")


def cost_and_grad_sampled(bm: BornMachine, data_samples: np.ndarray,
                          spec: CostSpec, rng: np.random.Generator,
                          theta: Optional[np.ndarray] = None):
    """Sampling-mode estimators (MMD and Sinkhorn): batched shots for the
    model and the shifted circuits, minibatched data."""
    n = bm.n_qubits
    theta = bm.circuit.theta if theta is None else np.asarray(theta, float)
    xs = bm.sample(spec.batch_model, rng, theta)
    ys = rng.choice(data_samples, size=min(spec.batch_data, len(data_samples)),
                    replace=False)
    grad = np.zeros(bm.circuit.n_params)
    if spec.kind == "mmd":
        cost = mx.mmd_estimator(xs, ys, spec.kernel)
        for slot in range(bm.circuit.n_params):
            up, down, factor = shifted_thetas(bm.circuit, slot, theta)
            a = bm.sample(spec.batch_model, rng, up)
            b = bm.sample(spec.batch_model, rng, down)
            k_ax = spec.kernel.gram(a, xs).mean()
            k_bx = spec.kernel.gram(b, xs).mean()
            k_ay = spec.kernel.gram(a, ys).mean()
            k_by = spec.kernel.gram(b, ys).mean()
            grad[slot] = 2.0 * factor * (k_ax - k_bx - k_ay + k_by)
        return float(cost), grad
    if spec.kind == "sinkhorn":
        p_emp = Pmf.from_samples(xs, n)
        q_emp = Pmf.from_samples(ys, n)
        value, state = mx.sinkhorn_divergence(p_emp, q_emp, spec.epsilon,
                                              max_iter=spec.sinkhorn_iters)
        for slot in range(bm.circuit.n_params):
            up, down, factor = shifted_thetas(bm.circuit, slot, theta)
            a = bm.sample(spec.batch_model, rng, up)
            b = bm.sample(spec.batch_model, rng, down)
            grad[slot] = factor * (mx.sinkhorn_potential_phi(a, state).mean()
                                   - mx.sinkhorn_potential_phi(b, state).mean())
        return float(value), grad
    raise ValueError(f"sampling mode not implemented for {spec.kind!r}")


# ---------------------------------------------------------------------------
# training


@dataclass
class TrainTrace:
    records: list
    final_theta: np.ndarray
    seed: int

    def final_tv(self) -> float:
        return self.records[-1]["tv"]

    def write_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("epoch,cost_train,cost_test,tv,wallclock_ms\n")
            for r in self.records:
                fh.write(f"{r['epoch']},{r['cost_train']!r},{r['cost_test']!r},"
                         f"{r['tv']!r},{r['wallclock_ms']}\n")

    def digest(self) -> str:
        """Digest over the deterministic columns (wallclock excluded)."""
        h = hashlib.sha256()
        for r in self.records:
            h.update(f"{r['epoch']},{r['cost_train']!r},{r['cost_test']!r},"
                     f"{r['tv']!r}\n".encode())
        return h.hexdigest()[:16]


def train_born(bm: BornMachine, data_train: Pmf, spec: CostSpec,
               epochs: int, eta_init: float = 0.05, seed: int = 0,
               data_test: Optional[Pmf] = None,
               exact_data: Optional[Pmf] = None,
               mode: str = "exact") -> TrainTrace:
    """Adam training loop; per-epoch records cost on train/test and exact TV.

    `exact_data` (when the true data pmf is known) is used for the TV
    column; otherwise the train pmf stands in. Bit-for-bit reproducible in
    exact mode for a fixed seed.
    """
    theta = np.array(bm.circuit.theta, dtype=float)
    state = AdamState.init(len(theta), eta_init)
    rng = derive(seed, "born/train")
    data_samples = None
    if mode == "sampled":
        xs, ws = data_train.support_weights()
        data_samples = np.repeat(xs, np.maximum(
            1, np.round(ws * 10 * spec.batch_data).astype(int)))
    tv_ref = exact_data if exact_data is not None else data_train
    records = []
    for epoch in range(epochs):
        t0 = time.perf_counter()
        if mode == "exact":
            cost, grad = cost_and_grad(bm, data_train, spec, theta)
        else:
            cost, grad = cost_and_grad_sampled(bm, data_samples, spec, rng, theta)
        cost_test = float("nan")
        if data_test is not None:
            if spec.kind == "kl":
                cost_test = mx.kl(data_test, bm.exact_pmf(theta))
            elif spec.kind == "mmd":
                cost_test = mx.mmd(bm.exact_pmf(theta), data_test, spec.kernel)
            elif spec.kind == "stein":
                gram = _stein_gram(spec, data_test, bm.n_qubits)
                p = _model_pmf_vector(bm, theta)
                cost_test = float(p @ gram @ p)
            elif spec.kind == "sinkhorn":
                cost_test = mx.sinkhorn_divergence(
                    bm.exact_pmf(theta), data_test, spec.epsilon,
                    max_iter=spec.sinkhorn_iters)[0]
        tv_now = mx.tv(bm.exact_pmf(theta), tv_ref)
        records.append({
            "epoch": epoch,
            "cost_train": float(cost),
            "cost_test": float(cost_test),
            "tv": float(tv_now),
            "wallclock_ms": int(1000 * (time.perf_counter() - t0)),
        })
        delta, state = adam_step(state, grad)
        theta = theta + delta
    bm.circuit = bm.circuit.with_theta(theta)
    return TrainTrace(records, theta, seed)


# ---------------------------------------------------------------------------
# datasets


@dataclass
class ToyModeDataset:
    modes: np.ndarray
    p: float
    n_bits: int
    samples: np.ndarray


def toy_mode_pmf(modes: np.ndarray, p: float, n: int) -> Pmf:
    """pi(y) = mean_k p^(n - d_H(s_k, y)) (1-p)^(d_H(s_k, y))."""
    allx = np.arange(2**n)
    xb = int_to_bits(allx, n)
    probs = np.zeros(2**n)
    for s in modes:
        d = np.abs(xb - int_to_bits(np.array([s]), n)).sum(axis=1)
        probs += p ** (n - d) * (1 - p) ** d
    probs /= len(modes)
    return Pmf.dense(probs / probs.sum(), n)


def gen_toy_data(n: int, n_modes: int, p: float, n_samples: int,
                 seed: int = 0) -> tuple[ToyModeDataset, Pmf]:
    """Random-mode toy distribution plus `n_samples` draws from it."""
    if not 0 < p < 1:
        raise ValueError("flip parameter must lie in (0, 1)")
    if n_modes < 1:
        raise ValueError("need at least one mode")
    rng = derive(seed, "born/toy_modes")
    modes = rng.choice(2**n, size=n_modes, replace=False)
    pmf = toy_mode_pmf(modes, p, n)
    samples = pmf.sample(n_samples, derive(seed, "born/toy_samples"))
    return ToyModeDataset(modes, p, n, samples), pmf


def gen_weak_compile_target(n: int, seed: int = 0):
    """Output pmf of a diagonal-layer machine in its X+Z measurement setting
    (the weak-compilation target), plus the angles used."""
    from .circuits import build_qcibm, iqp_final_angles, qcibm_couplings
    rng = derive(seed, "born/compile_target")
    couplings = qcibm_couplings(n)
    alpha = rng.uniform(0, 2 * np.pi, size=len(couplings))
    target = build_qcibm(n, couplings, alpha, iqp_final_angles())
    bm = BornMachine(target, seed)
    return bm.exact_pmf(), alpha


# ---------------------------------------------------------------------------
# RBM baseline (exact marginals at <= 20 units)


@dataclass
class Rbm:
    """Bipartite +/-1-spin energy model p(v,h) = exp(E)/Z with
    E = -(v^T W h + b_v . v + b_h . h); visible marginals are exact."""

    weights: np.ndarray
    bias_v: np.ndarray
    bias_h: np.ndarray
    train_weights: bool = False
    seed: int = 0

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.bias_v = np.asarray(self.bias_v, dtype=float)
        self.bias_h = np.asarray(self.bias_h, dtype=float)
        nv, nh = self.weights.shape
        if nv + nh > 20:
            raise ValueError("exact RBM capped at 20 total units")
        if self.bias_v.shape != (nv,) or self.bias_h.shape != (nh,):
            raise ValueError("bias shape mismatch")

    @property
    def n_visible(self) -> int:
        return self.weights.shape[0]

    @property
    def n_hidden(self) -> int:
        return self.weights.shape[1]

    @property
    def n_params(self) -> int:
        base = self.n_visible + self.n_hidden
        return base + self.weights.size if self.train_weights else base

    @staticmethod
    def random(n_visible: int, n_hidden: int, seed: int = 0,
               weight_scale: float = 1.0, train_weights: bool = False) -> "Rbm":
        rng = derive(seed, "rbm/init")
        w = rng.normal(scale=weight_scale, size=(n_visible, n_hidden))
        return Rbm(w, np.zeros(n_visible), np.zeros(n_hidden),
                   train_weights, seed)

    def _spins(self) -> np.ndarray:
        """(2^nv, nv) matrix of +/-1 spins; bit b maps to spin 1 - 2b."""
        return 1.0 - 2.0 * int_to_bits(np.arange(2**self.n_visible), self.n_visible)

    def _log_unnormalized(self, spins: np.ndarray) -> np.ndarray:
        act = spins @ self.weights + self.bias_h[None, :]
        return (-spins @ self.bias_v
                + np.sum(np.log(2 * np.cosh(act)), axis=1))

    def exact_pmf(self) -> Pmf:
        spins = self._spins()
        logw = self._log_unnormalized(spins)
        logw -= logw.max()
        w = np.exp(logw)
        return Pmf.dense(w / w.sum(), self.n_visible)

    def nll(self, data: Pmf) -> float:
        p = self.exact_pmf().to_dense()
        pi = data.to_dense()
        mask = pi > 0
        return float(-np.sum(pi[mask] * np.log(p[mask])))

    def grad(self, data: Pmf) -> dict:
        """Exact gradient of the NLL: data-side minus model-side moments."""
        spins = self._spins()
        p = self.exact_pmf().to_dense()
        pi = data.to_dense()
        act = spins @ self.weights + self.bias_h[None, :]
        th = np.tanh(act)
        # d log p / d b_v = -v + E_p[v]; hidden mean is -tanh(act)
        grad_bv = spins.T @ pi - spins.T @ p
        grad_bh = -(th.T @ pi - th.T @ p)
        grad_w = -(np.einsum("xi,xj,x->ij", spins, th, pi)
                   - np.einsum("xi,xj,x->ij", spins, th, p))
        return {"weights": grad_w, "bias_v": grad_bv, "bias_h": grad_bh}


def rbm_exact_pmf(rbm: Rbm) -> Pmf:
    return rbm.exact_pmf()


def rbm_grad(rbm: Rbm, data: Pmf) -> dict:
    return rbm.grad(data)


def train_rbm(rbm: Rbm, data: Pmf, epochs: int, eta_init: float = 0.05,
              exact_data: Optional[Pmf] = None) -> TrainTrace:
    """Adam on the exact NLL; trains biases (and weights when flagged)."""
    nv, nh = rbm.n_visible, rbm.n_hidden
    def pack():
        parts = [rbm.bias_v, rbm.bias_h]
        if rbm.train_weights:
            parts.append(rbm.weights.ravel())
        return np.concatenate(parts)

    def unpack(vec):
        rbm.bias_v = vec[:nv].copy()
        rbm.bias_h = vec[nv:nv + nh].copy()
        if rbm.train_weights:
            rbm.weights = vec[nv + nh:].reshape(nv, nh).copy()

    theta = pack()
    state = AdamState.init(len(theta), eta_init)
    tv_ref = exact_data if exact_data is not None else data
    records = []
    for epoch in range(epochs):
        t0 = time.perf_counter()
        unpack(theta)
        cost = rbm.nll(data)
        g = rbm.grad(data)
        parts = [g["bias_v"], g["bias_h"]]
        if rbm.train_weights:
            parts.append(g["weights"].ravel())
        grad = np.concatenate(parts)
        records.append({
            "epoch": epoch,
            "cost_train": float(cost),
            "cost_test": float("nan"),
            "tv": float(mx.tv(rbm.exact_pmf(), tv_ref)),
            "wallclock_ms": int(1000 * (time.perf_counter() - t0)),
        })
        delta, state = adam_step(state, grad)
        theta = theta + delta
    unpack(theta)
    return TrainTrace(records, theta, rbm.seed)


# ---------------------------------------------------------------------------
# comparisons and diagnostics


def compare_born_vs_rbm(n: int, layers: int, data_train: Pmf, exact_data: Pmf,
                        seeds: Sequence[int], epochs: int = 150,
                        eta_init: float = 0.05,
                        connectivity=None) -> list[dict]:
    """Final exact TV per model per seed at matched parameter counts.

    The Born machine is a hardware-efficient circuit with n*layers
    parameters; the RBM gets n visible and n*(layers-1) hidden units with
    fixed random weights, so only its n*layers biases train.
    """
    from .circuits import build_hardware_efficient
    if connectivity is None:
        connectivity = [(i, i + 1) for i in range(n - 1)]
    rows = []
    for seed in seeds:
        ansatz = build_hardware_efficient(n, layers, connectivity)
        rng = derive(seed, "compare/born_init")
        bm = BornMachine(ansatz.with_theta(
            rng.uniform(0, 2 * np.pi, ansatz.n_params)), seed)
        spec = CostSpec("sinkhorn", epsilon=0.5)
        trace_b = train_born(bm, data_train, spec, epochs, eta_init,
                             seed=seed, exact_data=exact_data)
        rbm = Rbm.random(n, n * (layers - 1), seed=seed)
        trace_r = train_rbm(rbm, data_train, epochs, eta_init,
                            exact_data=exact_data)
        if bm.circuit.n_params != rbm.n_params:
            raise AssertionError("parameter counts must match")
        rows.append({
            "seed": seed,
            "n_params": bm.circuit.n_params,
            "tv_born": trace_b.final_tv(),
            "tv_rbm": trace_r.final_tv(),
        })
    return rows


def ent_during_training(bm: BornMachine, initial_theta: np.ndarray,
                        final_theta: np.ndarray) -> dict:
    """Meyer-Wallach entanglement of the circuit state before/after training."""
    from .metrics import meyer_wallach_q
    return {
        "initial": meyer_wallach_q(bm.circuit.run(initial_theta)),
        "final": meyer_wallach_q(bm.circuit.run(final_theta)),
    }
