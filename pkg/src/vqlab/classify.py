"""Binary quantum classifier: data encodings, decision rule, training,
noise-robustness analysis, and the encoding-learning search.

The decision rule assigns label 0 whenever Tr[Pi_0 rho] >= 1/2 on the
classification qubit (ties resolve to 0). Robustness of a data point means
the noisy and noiseless predictions agree; delta-robustness is the robust
fraction of a dataset.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import noise as nz
from ._iris import IRIS_SETOSA_VIRGINICA
from .circuits import ParamCircuit, adam_minimize, shifted_thetas
from .metrics import fidelity
from .noise import AssignmentMatrix, apply_channel, noisy_povm
from .rng import derive
from .simcore import (HALF, DensityMatrix, Gate, Statevector, partial_trace,
                      run_circuit)


class EncodingError(ValueError):
    pass


# ---------------------------------------------------------------------------
# encodings


@dataclass(frozen=True)
class Encoding:
    """Feature-vector -> pure-state map.

    kinds: basis, amplitude, angle, dense_angle(theta, phi), superdense
    (theta, phi), general_qubit(f, g callables), generalized_amplitude
    (f callable returning the amplitude vector).
    """

    kind: str
    n_features: int
    n_qubits: int
    hyper: tuple = ()
    funcs: tuple = ()

    def __call__(self, x: Sequence[float]) -> Statevector:
        return encode(self, x)


def basis_encoding(n_features: int) -> Encoding:
    return Encoding("basis", n_features, n_features)


def amplitude_encoding(n_features: int) -> Encoding:
    n_qubits = max(1, int(np.ceil(np.log2(n_features))))
    return Encoding("amplitude", n_features, n_qubits)


def angle_encoding(n_features: int) -> Encoding:
    return Encoding("angle", n_features, n_features)


def dense_angle_encoding(n_features: int, theta: float = np.pi,
                         phi: float = 2 * np.pi) -> Encoding:
    """cos(theta x_1)|0> + e^{i phi x_2} sin(theta x_1)|1> per feature pair;
    the standard map has theta = pi, phi = 2 pi."""
    return Encoding("dense_angle", n_features,
                    int(np.ceil(n_features / 2)), (float(theta), float(phi)))


def superdense_encoding(n_features: int, theta: float = np.pi,
                        phi: float = 2 * np.pi) -> Encoding:
    """cos(theta x_1 + phi x_2)|0> + sin(theta x_1 + phi x_2)|1> per pair."""
    return Encoding("superdense", n_features,
                    int(np.ceil(n_features / 2)), (float(theta), float(phi)))


def general_qubit_encoding(f: Callable, g: Callable) -> Encoding:
    """Single-qubit f(x)|0> + g(x)|1>; |f|^2 + |g|^2 must be 1 pointwise."""
    return Encoding("general_qubit", 2, 1, (), (f, g))


def generalized_amplitude_encoding(n_features: int, n_qubits: int,
                                   f: Callable) -> Encoding:
    """f(x) returns the full (normalized) amplitude vector."""
    return Encoding("generalized_amplitude", n_features, n_qubits, (), (f,))


def gae_encoding(theta: float = 0.0) -> Encoding:
    """Single-qubit generalized-amplitude family
    sqrt(1 + t x2^2) x1 |0> + sqrt(1 - t x1^2) x2 |1>, normalized by ||x||;
    the cross terms cancel, so the state is exactly normalized."""

    def f(x):
        return np.array([np.sqrt(1 + theta * x[1] ** 2) * x[0],
                         np.sqrt(max(1 - theta * x[0] ** 2, 0.0)) * x[1]],
                        dtype=complex) / np.linalg.norm(x)

    return Encoding("generalized_amplitude", 2, 1, (float(theta),), (f,))


def encode(enc: Encoding, x) -> Statevector:
    x = np.asarray(x, dtype=float)
    if x.shape != (enc.n_features,):
        raise EncodingError(
            f"expected {enc.n_features} features, got shape {x.shape}")
    if enc.kind == "basis":
        bits = x.astype(int)
        if not np.all((bits == 0) | (bits == 1)):
            raise EncodingError("basis encoding needs binary features")
        idx = int(np.sum(bits * (2 ** np.arange(len(bits)))))
        amps = np.zeros(2**enc.n_qubits, dtype=complex)
        amps[idx] = 1.0
        return Statevector(enc.n_qubits, amps)
    if enc.kind == "amplitude":
        norm = np.linalg.norm(x)
        if norm < 1e-12:
            raise EncodingError("cannot amplitude-encode the zero vector")
        amps = np.zeros(2**enc.n_qubits, dtype=complex)
        amps[: len(x)] = x / norm
        return Statevector(enc.n_qubits, amps)
    if enc.kind == "angle":
        qubits = [np.array([np.cos(v), np.sin(v)]) for v in x]
        return Statevector.from_qubit_states(qubits)
    if enc.kind in ("dense_angle", "superdense"):
        theta, phi = enc.hyper
        pairs = np.concatenate([x, [0.0]]) if len(x) % 2 else x
        qubits = []
        for k in range(0, len(pairs), 2):
            x1, x2 = pairs[k], pairs[k + 1]
            if enc.kind == "dense_angle":
                qubits.append(np.array([np.cos(theta * x1),
                                        np.exp(1j * phi * x2) * np.sin(theta * x1)]))
            else:
                a = theta * x1 + phi * x2
                qubits.append(np.array([np.cos(a), np.sin(a)]))
        return Statevector.from_qubit_states(qubits)
    if enc.kind == "general_qubit":
        f, g = enc.funcs
        amp = np.array([f(x), g(x)], dtype=complex)
        if abs(np.linalg.norm(amp) - 1.0) > 1e-10:
            raise EncodingError("|f|^2 + |g|^2 != 1 at this point")
        return Statevector(1, amp)
    if enc.kind == "generalized_amplitude":
        amp = np.asarray(enc.funcs[0](x), dtype=complex)
        return Statevector(enc.n_qubits, amp)
    raise EncodingError(f"unknown encoding kind {enc.kind!r}")


# ---------------------------------------------------------------------------
# datasets


@dataclass
class LabeledDataset:
    points: np.ndarray
    labels: np.ndarray
    train_mask: np.ndarray
    seed: int

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        self.labels = np.asarray(self.labels, dtype=int)
        if len(self.points) != len(self.labels):
            raise ValueError("points/labels length mismatch")
        if not np.all((self.labels == 0) | (self.labels == 1)):
            raise ValueError("labels must be binary")

    @property
    def train(self):
        return self.points[self.train_mask], self.labels[self.train_mask]

    @property
    def test(self):
        return self.points[~self.train_mask], self.labels[~self.train_mask]


def _split_mask(n: int, train_frac: float, rng: np.random.Generator) -> np.ndarray:
    mask = np.zeros(n, dtype=bool)
    order = rng.permutation(n)
    mask[order[: int(round(train_frac * n))]] = True
    return mask


def gen_vertical(n: int, noise: float = 0.0, seed: int = 0,
                 train_frac: float = 0.8) -> LabeledDataset:
    """Points in the unit square, label 1 iff x1 > 0.5 (plus label noise)."""
    rng = derive(seed, "dataset/vertical")
    pts = rng.uniform(0, 1, size=(n, 2))
    labels = (pts[:, 0] > 0.5).astype(int)
    if noise > 0:
        flip = rng.random(n) < noise
        labels = labels ^ flip
    return LabeledDataset(pts, labels, _split_mask(n, train_frac, rng), seed)


def gen_diagonal(n: int, noise: float = 0.0, seed: int = 0,
                 train_frac: float = 0.8) -> LabeledDataset:
    rng = derive(seed, "dataset/diagonal")
    pts = rng.uniform(0, 1, size=(n, 2))
    labels = (pts[:, 1] > pts[:, 0]).astype(int)
    if noise > 0:
        flip = rng.random(n) < noise
        labels = labels ^ flip
    return LabeledDataset(pts, labels, _split_mask(n, train_frac, rng), seed)


def gen_moons(n: int, noise: float = 0.05, seed: int = 0,
              train_frac: float = 0.8) -> LabeledDataset:
    """Two interleaved half circles with gaussian jitter, scaled to [0,1]^2."""
    rng = derive(seed, "dataset/moons")
    n0 = n // 2
    n1 = n - n0
    t0 = rng.uniform(0, np.pi, n0)
    t1 = rng.uniform(0, np.pi, n1)
    outer = np.stack([np.cos(t0), np.sin(t0)], axis=1)
    inner = np.stack([1 - np.cos(t1), 0.5 - np.sin(t1)], axis=1)
    pts = np.concatenate([outer, inner])
    labels = np.concatenate([np.zeros(n0, int), np.ones(n1, int)])
    pts = pts + rng.normal(scale=noise, size=pts.shape)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    pts = (pts - lo) / np.where(hi - lo > 0, hi - lo, 1.0)
    return LabeledDataset(pts, labels, _split_mask(n, train_frac, rng), seed)


def iris_binary(seed: int = 0, train_frac: float = 0.8) -> LabeledDataset:
    """Iris setosa-vs-virginica, min-max scaled to the unit hypercube."""
    arr = np.array(IRIS_SETOSA_VIRGINICA, dtype=float)
    pts, labels = arr[:, :4], arr[:, 4].astype(int)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    pts = (pts - lo) / (hi - lo)
    rng = derive(seed, "dataset/iris")
    return LabeledDataset(pts, labels, _split_mask(len(pts), train_frac, rng), seed)


def load_labeled_csv(path, seed: int = 0, train_frac: float = 0.8) -> LabeledDataset:
    """CSV rows `f1,...,fk,label`; features min-max scaled per column."""
    pts, labels = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].startswith("#"):
                continue
            try:
                *feats, lab = row
                pts.append([float(v) for v in feats])
                labels.append(int(lab))
            except ValueError as exc:
                raise ValueError(f"bad csv row {lineno}: {row}") from exc
    pts = np.asarray(pts, dtype=float)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    pts = (pts - lo) / np.where(hi - lo > 0, hi - lo, 1.0)
    rng = derive(seed, "dataset/csv")
    return LabeledDataset(pts, np.asarray(labels), _split_mask(len(pts), train_frac, rng), seed)


def save_labeled_csv(ds: LabeledDataset, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        for x, y in zip(ds.points, ds.labels):
            w.writerow([repr(float(v)) for v in x] + [int(y)])


# ---------------------------------------------------------------------------
# prediction


def prob_zero(state, classification_qubit: int = 0, basis: str = "Z") -> float:
    """Tr[Pi rho] for the label-0 effect on the classification qubit."""
    rho = state.to_density() if isinstance(state, Statevector) else state
    reduced = partial_trace(rho, [classification_qubit]).matrix
    if basis == "Z":
        return float(np.real(reduced[0, 0]))
    if basis == "Hadamard":
        plus = np.array([1, 1]) / np.sqrt(2)
        return float(np.real(plus.conj() @ reduced @ plus))
    raise ValueError(f"unknown basis {basis!r}")


TIE_TOL = 1e-12  # floating-point slack on the >= 1/2 tie rule


def label_from_prob(p0: float) -> int:
    return 0 if p0 >= 0.5 - TIE_TOL else 1


def predict(state, classification_qubit: int = 0, basis: str = "Z"):
    """(label, Tr[Pi_0 rho]); label 0 iff the probability is >= 1/2
    (ties resolve to 0, with floating-point slack)."""
    p0 = prob_zero(state, classification_qubit, basis)
    return label_from_prob(p0), p0


# ---------------------------------------------------------------------------
# model + training


def single_qubit_ansatz() -> ParamCircuit:
    gates = [Gate("Rz", (0,), 0.0, HALF),
             Gate("Ry", (0,), 0.0, HALF),
             Gate("Rz", (0,), 0.0, HALF)]
    return ParamCircuit(1, gates, [0, 1, 2], np.zeros(3))


def two_qubit_ansatz() -> ParamCircuit:
    """15-parameter two-qubit circuit: two entangling blocks of local ZYZ
    rotations plus CZ, then a final ZYZ on the classification qubit."""
    gates, slots = [], []
    k = 0
    for _ in range(2):
        for q in (0, 1):
            for kind in ("Rz", "Ry", "Rz"):
                gates.append(Gate(kind, (q,), 0.0, HALF))
                slots.append(k)
                k += 1
        gates.append(Gate("CZ", (0, 1)))
        slots.append(None)
    for kind in ("Rz", "Ry", "Rz"):
        gates.append(Gate(kind, (0,), 0.0, HALF))
        slots.append(k)
        k += 1
    return ParamCircuit(2, gates, slots, np.zeros(k))


@dataclass
class ClassifierModel:
    encoding: Encoding
    circuit: ParamCircuit
    classification_qubit: int = 0
    basis: str = "Z"

    def processed_state(self, x, theta=None) -> Statevector:
        return run_circuit(self.circuit.bind(theta), self.encoding(x))

    def prob_zero(self, x, theta=None) -> float:
        return prob_zero(self.processed_state(x, theta),
                         self.classification_qubit, self.basis)

    def predict(self, x, theta=None):
        return predict(self.processed_state(x, theta),
                       self.classification_qubit, self.basis)

    def accuracy(self, points, labels, theta=None) -> float:
        hits = sum(self.predict(x, theta)[0] == y
                   for x, y in zip(points, labels))
        return hits / len(labels)


def batch_prob_zero(amps: np.ndarray, n: int, qubit: int = 0,
                    basis: str = "Z") -> np.ndarray:
    """Tr[Pi_0 rho] for a (batch, 2^n) array of statevectors."""
    if basis == "Hadamard":
        h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
        from .simcore import _apply_unitary_sv
        amps = _apply_unitary_sv(amps, h, (qubit,), n)
    t = np.abs(amps.reshape(amps.shape[0], *(2,) * n)) ** 2
    axis = 1 + (n - 1 - qubit)
    zero_slice = np.take(t, 0, axis=axis)
    return zero_slice.reshape(amps.shape[0], -1).sum(axis=1)


def mse_cost_and_grad(model: ClassifierModel, points, labels):
    """Mean squared error between Tr[Pi_0 rho] and (1 - label),
    differentiated by the parameter-shift rule (batched over the dataset)."""
    target = 1.0 - np.asarray(labels, dtype=float)
    n = model.circuit.n_qubits
    encoded = np.stack([model.encoding(x).amplitudes for x in points])

    def probs(theta):
        out = model.circuit.run_batch(encoded, theta)
        return batch_prob_zero(out, n, model.classification_qubit, model.basis)

    def cost_and_grad(theta):
        p = probs(theta)
        resid = p - target
        cost = float(np.mean(resid**2))
        grad = np.zeros(model.circuit.n_params)
        for slot in range(model.circuit.n_params):
            up, down, factor = shifted_thetas(model.circuit, slot, theta)
            dp = factor * (probs(up) - probs(down))
            grad[slot] = float(np.mean(2.0 * resid * dp))
        return cost, grad

    return cost_and_grad


@dataclass
class TrainResult:
    model: ClassifierModel
    train_accuracy: float
    test_accuracy: float
    cost_history: list


def train_classifier(dataset: LabeledDataset, encoding: Encoding,
                     ansatz: ParamCircuit, epochs: int = 150,
                     eta_init: float = 0.1, seed: int = 0,
                     restarts: int = 3) -> TrainResult:
    """Adam + parameter-shift on the MSE surrogate; keeps the best of a few
    seeded restarts (by training cost, then accuracy)."""
    xs_train, ys_train = dataset.train
    if len(xs_train) == 0:
        raise ValueError("empty training split")
    best = None
    for r in range(restarts):
        rng = derive(seed, f"classify/train/{r}")
        model = ClassifierModel(encoding, ansatz.with_theta(
            rng.uniform(0, 2 * np.pi, size=ansatz.n_params)))
        cg = mse_cost_and_grad(model, xs_train, ys_train)
        theta, cost, history = adam_minimize(cg, model.circuit.theta,
                                             eta_init, epochs)
        model.circuit = model.circuit.with_theta(theta)
        acc = model.accuracy(xs_train, ys_train)
        if best is None or (cost, -acc) < (best[0], -best[1]):
            best = (cost, acc, model, history)
    _, train_acc, model, history = best
    xs_test, ys_test = dataset.test
    test_acc = model.accuracy(xs_test, ys_test) if len(xs_test) else float("nan")
    return TrainResult(model, train_acc, test_acc, history)


# ---------------------------------------------------------------------------
# robustness


@dataclass
class RobustnessReport:
    ideal_labels: np.ndarray
    noisy_labels: np.ndarray
    robust_flags: np.ndarray
    channel_label: str

    @property
    def robust_set_size(self) -> int:
        return int(self.robust_flags.sum())

    @property
    def delta(self) -> float:
        return float(self.robust_flags.mean())


def _noisy_prob_zero(model: ClassifierModel, x, channels, placement: str) -> float:
    rho = model.encoding(x).to_density()
    if placement == "around_unitary":
        rho = nz.apply_channels(rho, channels[0])
        rho = run_circuit(model.circuit.bind(), rho)
        rho = nz.apply_channels(rho, channels[1])
    elif placement == "after_unitary":
        rho = run_circuit(model.circuit.bind(), rho)
        rho = nz.apply_channels(rho, channels)
    elif placement == "interleaved":
        # channels[k] acts before gate block k; used for the global
        # depolarizing interleaving checks
        gates = model.circuit.bind()
        blocks = np.array_split(np.arange(len(gates)), len(channels))
        for chans, idx in zip(channels, blocks):
            rho = nz.apply_channels(rho, chans)
            rho = run_circuit([gates[i] for i in idx], rho)
    else:
        raise ValueError(f"unknown placement {placement!r}")
    return prob_zero(rho, model.classification_qubit, model.basis)


def robust_set(model: ClassifierModel, dataset: LabeledDataset, channels,
               placement: str = "after_unitary",
               label: str = "") -> RobustnessReport:
    """Exact per-point comparison of noisy and noiseless predictions.

    `channels` is a list of channel objects for `after_unitary`, a pair of
    lists for `around_unitary`, or a list of lists for `interleaved`.
    """
    ideal, noisy = [], []
    for x in dataset.points:
        ideal.append(label_from_prob(model.prob_zero(x)))
        p0 = _noisy_prob_zero(model, x, channels, placement)
        noisy.append(label_from_prob(p0))
    ideal = np.array(ideal)
    noisy = np.array(noisy)
    return RobustnessReport(ideal, noisy, ideal == noisy, label)


def pauli_robustness_check(p_vec, n_trials: int = 500, seed: int = 0,
                           basis: str = "Z") -> dict:
    """Complete-robustness predicate for a single-qubit Pauli channel.

    The guarantee is p_X + p_Y <= 1/2 for a computational-basis decision
    rule and p_Y + p_Z <= 1/2 for the Hadamard-basis rule; the prediction
    is verified on random single-qubit states.
    """
    p_i, p_x, p_y, p_z = p_vec
    channel = nz.pauli_channel(p_i, p_x, p_y, p_z)
    guaranteed = (p_x + p_y <= 0.5) if basis == "Z" else (p_y + p_z <= 0.5)
    rng = derive(seed, "classify/pauli_check")
    flipped = 0
    for _ in range(n_trials):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        v /= np.linalg.norm(v)
        rho = Statevector(1, v).to_density()
        before, _ = predict(rho, 0, basis)
        after, _ = predict(apply_channel(rho, channel), 0, basis)
        flipped += before != after
    return {"guaranteed_robust": bool(guaranteed), "flipped": int(flipped),
            "trials": n_trials}


def measurement_noise_check(a: AssignmentMatrix, n_trials: int = 500,
                            seed: int = 0) -> dict:
    """Robustness of the decision rule under assignment noise; guaranteed
    when p00 > p01 and p11 > p10."""
    guaranteed = a.p00 > a.p01 and a.p11 > a.p10
    pi0, _ = noisy_povm(a)
    rng = derive(seed, "classify/meas_check")
    flipped = 0
    for _ in range(n_trials):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        v /= np.linalg.norm(v)
        rho = np.outer(v, v.conj())
        before = label_from_prob(float(np.real(rho[0, 0])))
        after = label_from_prob(float(np.real(np.trace(pi0 @ rho))))
        flipped += before != after
    return {"guaranteed_robust": bool(guaranteed), "flipped": int(flipped),
            "trials": n_trials}


def shots_for_confidence(epsilon: float, gamma: float) -> int:
    """Hoeffding count ceil( log(1/gamma) / (2 epsilon^2) )."""
    if not 0 < epsilon < 0.5 or not 0 < gamma < 1:
        raise ValueError("need 0 < epsilon < 1/2 and 0 < gamma < 1")
    return int(np.ceil(np.log(1.0 / gamma) / (2.0 * epsilon**2)))


def fidelity_robust_bound(model: ClassifierModel, dataset: LabeledDataset,
                          channels) -> dict:
    """Fidelity lower bounds on the robust-set size.

    bound_mixed uses the label-extended mixed state over the dataset:
    |R| >= M (1 - sqrt(1 - F(E(sigma~), sigma~))); bound_avg uses the mean
    per-point fidelity deficit. Both are compared to the exact |R|.
    """
    m = len(dataset.points)
    dim = 2**model.circuit.n_qubits
    sigma = np.zeros((2 * dim, 2 * dim), dtype=complex)
    sigma_noisy = np.zeros_like(sigma)
    per_point = []
    for x, y in zip(dataset.points, dataset.labels):
        rho = run_circuit(model.circuit.bind(),
                          model.encoding(x)).to_density().matrix
        rho_noisy = nz.apply_channels(
            DensityMatrix(model.circuit.n_qubits, rho), channels).matrix
        label_block = slice(y * dim, (y + 1) * dim)
        sigma[label_block, label_block] += rho / m
        sigma_noisy[label_block, label_block] += rho_noisy / m
        per_point.append(fidelity(rho_noisy, rho))
    f_mixed = fidelity(sigma_noisy, sigma)
    bound_mixed = m * (1.0 - np.sqrt(max(0.0, 1.0 - f_mixed)))
    bound_avg = m * (1.0 - np.mean([np.sqrt(max(0.0, 1.0 - f)) for f in per_point]))
    report = robust_set(model, dataset, channels)
    return {"bound_mixed": float(bound_mixed), "bound_avg": float(bound_avg),
            "empirical": report.robust_set_size, "fidelity_mixed": float(f_mixed)}


# ---------------------------------------------------------------------------
# encoding learning (hyperparameter search under noise)


@dataclass
class QelaResult:
    best_cost: float
    best_encoding: Encoding
    best_theta_circuit: np.ndarray
    per_family: list


def _indicator_cost(model: ClassifierModel, points, labels, channels) -> float:
    wrong = 0
    for x, y in zip(points, labels):
        if channels:
            p0 = _noisy_prob_zero(model, x, channels, "after_unitary")
        else:
            p0 = model.prob_zero(x)
        wrong += label_from_prob(p0) != y
    return wrong / len(labels)


def qela(dataset: LabeledDataset, family: Sequence[Callable[[np.ndarray], Encoding]],
         channels, ansatz_factory: Callable[[], ParamCircuit],
         hyper_grid: Sequence[np.ndarray], epochs: int = 80,
         eta_init: float = 0.1, seed: int = 0,
         restarts: int = 1) -> QelaResult:
    """Encoding-learning search.

    For each encoding family member (a callable hyperparameters -> Encoding)
    and each candidate hyperparameter setting: train the circuit on the
    noiseless cost, then switch the channel on (circuit frozen) and score
    the misclassification cost. The best (cost, encoding, circuit) over the
    family wins. Training the unitary per candidate is what makes encodings
    near a channel fixed point competitive.
    """
    xs, ys = dataset.train
    results = []
    best = None
    for k, make_enc in enumerate(family):
        best_local = None
        for hyper in hyper_grid[k]:
            enc = make_enc(np.asarray(hyper, dtype=float))
            res = train_classifier(dataset, enc, ansatz_factory(),
                                   epochs=epochs, eta_init=eta_init,
                                   seed=seed + 31 * k, restarts=restarts)
            cost = _indicator_cost(res.model, xs, ys, channels)
            if best_local is None or cost < best_local[0]:
                best_local = (cost, enc, np.asarray(hyper, dtype=float),
                              res.model.circuit.theta)
        results.append({"family": k, "cost": best_local[0],
                        "hyper": best_local[2]})
        if best is None or best_local[0] < best[0]:
            best = best_local
    return QelaResult(best[0], best[1], best[3], results)


# ---------------------------------------------------------------------------
# decision boundary


def decision_boundary_trace(model: ClassifierModel, grid_x, grid_y):
    """Labels and Tr[Pi_0 rho] over a 2-d grid of feature points."""
    rows = []
    for x1 in grid_x:
        for x2 in grid_y:
            label, p0 = model.predict(np.array([x1, x2]))
            rows.append((float(x1), float(x2), int(label), float(p0)))
    return rows
