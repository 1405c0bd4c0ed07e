"""Parameterized-circuit engine: ansatz builders, parameter-shift gradients,
the Adam optimizer, and variable-structure architecture search.

Shift-rule constants depend on the gate convention. For U = exp(-i theta/2 G)
(``HALF``) the derivative is (1/2)[C(theta + pi/2) - C(theta - pi/2)]; for
U = exp(+i theta G) (``FULL``) the eigenvalue gap of the generator doubles
and the exact rule becomes C(theta + pi/4) - C(theta - pi/4) with unit
prefactor. Both are validated against finite differences in the tests.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .simcore import (FULL, HALF, Gate, Statevector, run_circuit,
                      run_circuit_batch)

SHIFT_RULES = {HALF: (np.pi / 2, 0.5), FULL: (np.pi / 4, 1.0)}


# ---------------------------------------------------------------------------
# parameterized circuits


@dataclass
class ParamCircuit:
    """Gate template plus a parameter vector.

    ``param_index[k]`` gives the slot of ``theta`` feeding gate k (None for
    fixed gates; slots may be shared by several gates). The stored gate's
    ``theta`` is ignored for slotted gates and used verbatim otherwise.
    """

    n_qubits: int
    gates: list[Gate]
    param_index: list[Optional[int]]
    theta: np.ndarray

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        if len(self.gates) != len(self.param_index):
            raise ValueError("gates/param_index length mismatch")
        for g, slot in zip(self.gates, self.param_index):
            if slot is None:
                continue
            if not g.is_parameterized:
                raise ValueError(f"fixed gate {g.kind} cannot take a slot")
            if not 0 <= slot < len(self.theta):
                raise ValueError(f"slot {slot} out of range")

    @property
    def n_params(self) -> int:
        return len(self.theta)

    def slot_convention(self, slot: int) -> str:
        convs = {g.convention for g, s in zip(self.gates, self.param_index)
                 if s == slot}
        if len(convs) > 1:
            raise ValueError(f"slot {slot} is shared across gate conventions")
        if not convs:
            raise ValueError(f"slot {slot} feeds no gate")
        return convs.pop()

    def bind(self, theta: Optional[np.ndarray] = None) -> list[Gate]:
        th = self.theta if theta is None else np.asarray(theta, dtype=float)
        bound = []
        for g, slot in zip(self.gates, self.param_index):
            if slot is None:
                bound.append(g)
            else:
                bound.append(replace(g, theta=float(th[slot])))
        return bound

    def run(self, theta: Optional[np.ndarray] = None,
            initial: Optional[Statevector] = None) -> Statevector:
        state = Statevector.zero(self.n_qubits) if initial is None else initial
        return run_circuit(self.bind(theta), state)

    def run_batch(self, amps: np.ndarray,
                  theta: Optional[np.ndarray] = None) -> np.ndarray:
        return run_circuit_batch(self.bind(theta), amps, self.n_qubits)

    def with_theta(self, theta: np.ndarray) -> "ParamCircuit":
        return ParamCircuit(self.n_qubits, list(self.gates),
                            list(self.param_index), np.asarray(theta, float))

    def structure_hash(self) -> str:
        desc = ";".join(
            f"{g.kind}{g.targets}{g.convention}{s}"
            for g, s in zip(self.gates, self.param_index))
        return hashlib.sha256(desc.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# compiled evaluation: for small registers it is much faster to fold dense
# 2^n x 2^n matrices than to contract gate tensors one target at a time


class CompiledCircuit:
    """Dense-unitary evaluator for a fixed gate structure.

    Every gate is embedded into the full space once; a parameterized gate
    with generator G (G^2 = 1) contributes cos(a) 1 + i sin(a) G_embedded
    with a = -theta/2 (HALF) or a = +theta (FULL), so evaluating at new
    parameters costs one scaled matmul per gate.
    """

    def __init__(self, circuit: ParamCircuit):
        from .simcore import _apply_unitary_sv
        self.n = circuit.n_qubits
        self.param_index = list(circuit.param_index)
        d = 2**self.n
        eye = np.eye(d, dtype=complex)
        self._terms = []
        for g, slot in zip(circuit.gates, circuit.param_index):
            if slot is None:
                full = _apply_unitary_sv(eye, g.matrix(), g.targets, self.n).T
                self._terms.append(("fixed", full, None))
            else:
                # extract the embedded generator from one reference angle:
                # FULL: U(pi/2) = i G;  HALF: U(pi) = -i G
                if g.convention == FULL:
                    ref = replace(g, theta=np.pi / 2)
                    gen_full = _apply_unitary_sv(eye, ref.matrix(),
                                                 g.targets, self.n).T / 1j
                    sign = +1.0
                else:
                    ref = replace(g, theta=np.pi)
                    gen_full = _apply_unitary_sv(eye, ref.matrix(),
                                                 g.targets, self.n).T / (-1j)
                    sign = -1.0
                self._terms.append(("param", gen_full, (g.convention, sign)))

    def unitary(self, theta: np.ndarray) -> np.ndarray:
        d = 2**self.n
        u = np.eye(d, dtype=complex)
        for (kind, mat, info), slot in zip(self._terms, self.param_index):
            if kind == "fixed":
                u = mat @ u
            else:
                conv, sign = info
                a = float(theta[slot]) if conv == FULL else float(theta[slot]) / 2.0
                u = np.cos(a) * u + (1j * sign * np.sin(a)) * (mat @ u)
        return u

    def run_batch(self, amps: np.ndarray, theta: np.ndarray) -> np.ndarray:
        return amps @ self.unitary(theta).T


# ---------------------------------------------------------------------------
# parameter-shift gradients


def shift_rule_for(circuit: ParamCircuit, slot: int) -> tuple[float, float]:
    return SHIFT_RULES[circuit.slot_convention(slot)]


def param_shift_grad(cost: Callable[[np.ndarray], float],
                     circuit: ParamCircuit, slot: int,
                     theta: Optional[np.ndarray] = None) -> float:
    """Exact derivative of `cost(theta)` wrt one slot via two shifted calls.

    `cost` must be an observable expectation, i.e. linear in the circuit's
    output density matrix. For costs that are nonlinear functions of output
    probabilities or fidelities, differentiate those inner quantities with
    this rule and chain them (as the classifier / Born-machine / cloning
    cost gradients do)."""
    shift, factor = shift_rule_for(circuit, slot)
    th = np.array(circuit.theta if theta is None else theta, dtype=float)
    up, down = th.copy(), th.copy()
    up[slot] += shift
    down[slot] -= shift
    return factor * (cost(up) - cost(down))


def param_shift_gradient(cost: Callable[[np.ndarray], float],
                         circuit: ParamCircuit,
                         theta: Optional[np.ndarray] = None) -> np.ndarray:
    return np.array([param_shift_grad(cost, circuit, s, theta)
                     for s in range(circuit.n_params)])


def shifted_thetas(circuit: ParamCircuit, slot: int,
                   theta: Optional[np.ndarray] = None):
    """(theta_plus, theta_minus, factor) for the slot's convention."""
    shift, factor = shift_rule_for(circuit, slot)
    th = np.array(circuit.theta if theta is None else theta, dtype=float)
    up, down = th.copy(), th.copy()
    up[slot] += shift
    down[slot] -= shift
    return up, down, factor


# ---------------------------------------------------------------------------
# Adam


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    step: int
    eta_init: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @staticmethod
    def init(n_params: int, eta_init: float) -> "AdamState":
        return AdamState(np.zeros(n_params), np.zeros(n_params), 0, eta_init)


def adam_step(state: AdamState, grad: np.ndarray) -> tuple[np.ndarray, AdamState]:
    """Bias-corrected Adam update; returns (delta_theta, new state)."""
    g = np.asarray(grad, dtype=float)
    if g.shape != state.m.shape:
        raise ValueError("gradient length mismatch")
    step = state.step + 1
    m = state.beta1 * state.m + (1 - state.beta1) * g
    v = state.beta2 * state.v + (1 - state.beta2) * g * g
    m_hat = m / (1 - state.beta1**step)
    v_hat = v / (1 - state.beta2**step)
    delta = -state.eta_init * m_hat / (np.sqrt(v_hat) + state.eps)
    return delta, AdamState(m, v, step, state.eta_init,
                            state.beta1, state.beta2, state.eps)


def adam_minimize(cost_and_grad, theta0: np.ndarray, eta_init: float,
                  epochs: int, callback=None,
                  early_stop_epochs: Optional[int] = None,
                  early_stop_delta: float = 1e-4):
    """Plain Adam loop; `cost_and_grad(theta) -> (cost, grad)`.

    Stops an unproductive run early when the best cost has not improved by
    `early_stop_delta` within `early_stop_epochs` epochs.
    """
    theta = np.array(theta0, dtype=float)
    state = AdamState.init(len(theta), eta_init)
    best_cost, best_theta = np.inf, theta.copy()
    stall = 0
    history = []
    for epoch in range(epochs):
        cost, grad = cost_and_grad(theta)
        history.append(cost)
        if cost < best_cost - early_stop_delta:
            best_cost, best_theta, stall = cost, theta.copy(), 0
        else:
            best_cost = min(best_cost, cost)
            if cost < np.min(history[:-1], initial=np.inf):
                best_theta = theta.copy()
            stall += 1
        if callback is not None:
            callback(epoch, theta, cost)
        if early_stop_epochs is not None and stall >= early_stop_epochs:
            break
        delta, state = adam_step(state, grad)
        theta = theta + delta
    return best_theta, best_cost, history


# ---------------------------------------------------------------------------
# ansatz builders


def zyz_angles(u: np.ndarray) -> tuple[float, float, float]:
    """Angles (a, b, c) with Rz(a) Ry(b) Rz(c) = u up to global phase."""
    det = np.linalg.det(u)
    su = u / np.sqrt(det)
    b = 2.0 * np.arctan2(abs(su[1, 0]), abs(su[0, 0]))
    if abs(su[0, 0]) < 1e-12:
        a = 2.0 * np.angle(su[1, 0])
        c = 0.0
    elif abs(su[1, 0]) < 1e-12:
        a = 2.0 * np.angle(su[1, 1])
        c = 0.0
    else:
        sum_ac = 2.0 * np.angle(su[1, 1])
        diff_ac = 2.0 * np.angle(su[1, 0])
        a = (sum_ac + diff_ac) / 2.0
        c = (sum_ac - diff_ac) / 2.0
    return float(a), float(b), float(c)


def _final_rotation_gates(qubit: int, gamma: float, delta: float,
                          sigma: float) -> list[Gate]:
    """Gates realizing exp(i (gamma X + delta Y + sigma Z)) on one qubit."""
    r = float(np.sqrt(gamma**2 + delta**2 + sigma**2))
    if r < 1e-15:
        return []
    if delta == 0.0 and sigma == 0.0:
        return [Gate("ExpX", (qubit,), gamma, FULL)]
    if gamma == 0.0 and sigma == 0.0:
        return [Gate("ExpY", (qubit,), delta, FULL)]
    if gamma == 0.0 and delta == 0.0:
        return [Gate("ExpZ", (qubit,), sigma, FULL)]
    gen = (gamma * np.array([[0, 1], [1, 0]])
           + delta * np.array([[0, -1j], [1j, 0]])
           + sigma * np.array([[1, 0], [0, -1]])) / r
    u = np.cos(r) * np.eye(2) + 1j * np.sin(r) * gen
    a, b, c = zyz_angles(u)
    return [Gate("Rz", (qubit,), c, HALF),
            Gate("Ry", (qubit,), b, HALF),
            Gate("Rz", (qubit,), a, HALF)]


def qcibm_couplings(n: int) -> list[tuple[int, ...]]:
    """Default Ising coupling pattern: all singles then all pairs."""
    subsets: list[tuple[int, ...]] = [(i,) for i in range(n)]
    subsets += [(i, j) for i in range(n) for j in range(i + 1, n)]
    return subsets


def build_qcibm(n: int, couplings: Sequence[Sequence[int]],
                alpha: np.ndarray,
                final_angles: tuple = (0.0, 0.0, 0.0)) -> ParamCircuit:
    """Ising Born machine: H layer, diagonal exp(i a_j Z...Z) layer with one
    trainable slot per coupling, then a fixed measurement-basis rotation
    exp(i (G X + D Y + S Z)) on every qubit.

    `final_angles` is either one (gamma, delta, sigma) triple for all qubits
    or a list of per-qubit triples.
    """
    alpha = np.asarray(alpha, dtype=float)
    if len(alpha) != len(couplings):
        raise ValueError("alpha length must match number of couplings")
    gates: list[Gate] = [Gate("H", (q,)) for q in range(n)]
    slots: list[Optional[int]] = [None] * n
    for j, subset in enumerate(couplings):
        subset = tuple(int(q) for q in subset)
        if not 1 <= len(subset) <= 2 or any(q >= n for q in subset):
            raise ValueError(f"invalid coupling subset {subset}")
        if len(subset) == 1:
            gates.append(Gate("ExpZ", subset, 0.0, FULL))
        else:
            gates.append(Gate("ExpZZ", subset, 0.0, FULL))
        slots.append(j)
    per_qubit = (list(final_angles) if final_angles and
                 isinstance(final_angles[0], (tuple, list, np.ndarray))
                 else [final_angles] * n)
    for q in range(n):
        g, d, s = (float(v) for v in per_qubit[q])
        for gate in _final_rotation_gates(q, g, d, s):
            gates.append(gate)
            slots.append(None)
    return ParamCircuit(n, gates, slots, alpha)


IQP_ANGLE = np.pi / (2 * np.sqrt(2))


def iqp_final_angles() -> tuple[float, float, float]:
    return (IQP_ANGLE, 0.0, IQP_ANGLE)


def qaoa_final_angles() -> tuple[float, float, float]:
    return (np.pi / 4, 0.0, 0.0)


def build_hardware_efficient(n: int, layers: int,
                             connectivity: Sequence[tuple[int, int]],
                             single_qubit_kind: str = "Ry") -> ParamCircuit:
    """K layers of parameterized single-qubit rotations + CZ entanglers.

    Parameter count is n*K; every qubit must appear in the connectivity.
    """
    if layers < 1:
        raise ValueError("need at least one layer")
    touched = {q for edge in connectivity for q in edge}
    if n > 1 and touched != set(range(n)):
        raise ValueError("connectivity leaves some qubit disconnected")
    gates: list[Gate] = []
    slots: list[Optional[int]] = []
    k = 0
    for _ in range(layers):
        for q in range(n):
            gates.append(Gate(single_qubit_kind, (q,), 0.0, HALF))
            slots.append(k)
            k += 1
        for a, b in connectivity:
            gates.append(Gate("CZ", (int(a), int(b))))
            slots.append(None)
    return ParamCircuit(n, gates, slots, np.zeros(k))


UNIVERSAL_CLONER_ANGLES = (np.pi / 8,
                           -float(np.arcsin(np.sqrt(0.5 - np.sqrt(2) / 3))),
                           np.pi / 8)
PHASE_COVARIANT_CLONER_ANGLES = (
    float(np.arcsin(np.sqrt(0.5 - 0.5 / np.sqrt(3)))),
    -float(np.arcsin(np.sqrt(0.5 - np.sqrt(3) / 4))),
    float(np.arcsin(np.sqrt(0.5 - 0.5 / np.sqrt(3)))),
)


def build_ideal_cloner(kind: str = "universal") -> ParamCircuit:
    """Fixed-angle 3-qubit 1->2 cloning circuit.

    The input state enters on qubit 0; a preparation stage entangles the two
    blank registers (qubits 1, 2), a CNOT cascade transfers the information,
    and the two clones come out on qubits 1 and 2 (qubit 0 keeps the
    ancillary remainder). The rotation R(a)|0> = cos a |0> + sin a |1> is
    Ry(2a).
    """
    if kind == "universal":
        a1, a2, a3 = UNIVERSAL_CLONER_ANGLES
    elif kind in ("phase_covariant", "phase_covariant_xy"):
        a1, a2, a3 = PHASE_COVARIANT_CLONER_ANGLES
    else:
        raise ValueError(f"unknown ideal cloner kind {kind!r}")
    gates = [
        Gate("Ry", (1,), 2 * a1, HALF),
        Gate("CNOT", (1, 2)),
        Gate("Ry", (2,), 2 * a2, HALF),
        Gate("CNOT", (2, 1)),
        Gate("Ry", (1,), 2 * a3, HALF),
        Gate("CNOT", (0, 1)),
        Gate("CNOT", (0, 2)),
        Gate("CNOT", (1, 0)),
        Gate("CNOT", (2, 0)),
    ]
    return ParamCircuit(3, gates, [None] * len(gates), np.zeros(0))


# ---------------------------------------------------------------------------
# variable-structure search


@dataclass(frozen=True)
class GatePool:
    """Allowed (kind, targets) entries; two-qubit entries must respect the
    connectivity edge list."""

    entries: tuple
    connectivity: tuple

    def __post_init__(self):
        if not self.entries:
            raise ValueError("empty gate pool")
        edges = {frozenset(e) for e in self.connectivity}
        for kind, targets in self.entries:
            if len(targets) == 2 and frozenset(targets) not in edges:
                raise ValueError(f"{kind}{targets} violates connectivity")

    @staticmethod
    def rotations_plus_cz(qubits: Sequence[int],
                          edges: Sequence[tuple[int, int]]) -> "GatePool":
        entries = [(k, (q,)) for q in qubits for k in ("Rz", "Rx", "Ry")]
        entries += [("CZ", tuple(e)) for e in edges]
        return GatePool(tuple(entries), tuple(tuple(e) for e in edges))


@dataclass
class StructureSearchConfig:
    seq_len: int
    iterations: int = 50
    epochs_per_iteration: int = 100
    early_stop_epochs: int = 30
    eta_init: float = 0.05
    seed: int = 0
    improvement_tol: float = 1e-4


def perturbation_count(seq_len: int, rng: np.random.Generator) -> int:
    """Number of gates to change: P(d) = 2^-d for d >= 1, remainder on d=0."""
    probs = np.array([2.0**-d for d in range(1, seq_len + 1)])
    p0 = 1.0 - probs.sum()
    full = np.concatenate([[p0], probs])
    return int(rng.choice(seq_len + 1, p=full / full.sum()))


def _random_entry(pool: GatePool, rng: np.random.Generator):
    return pool.entries[int(rng.integers(len(pool.entries)))]


def _make_circuit(n: int, entries, thetas) -> ParamCircuit:
    gates, slots = [], []
    params = []
    for (kind, targets), th in zip(entries, thetas):
        if kind in ("Rx", "Ry", "Rz"):
            gates.append(Gate(kind, tuple(targets), 0.0, HALF))
            slots.append(len(params))
            params.append(th)
        else:
            gates.append(Gate(kind, tuple(targets)))
            slots.append(None)
    return ParamCircuit(n, gates, slots, np.array(params, dtype=float))


def compress_sequence(entries: list, thetas: list) -> tuple[list, list]:
    """Merge adjacent identical entries (sum rotation angles; CZ pairs cancel)."""
    out_e: list = []
    out_t: list = []
    for entry, th in zip(entries, thetas):
        if out_e and out_e[-1] == entry:
            kind = entry[0]
            if kind in ("Rx", "Ry", "Rz"):
                out_t[-1] += th
                continue
            if kind == "CZ":
                out_e.pop()
                out_t.pop()
                continue
        out_e.append(entry)
        out_t.append(th)
    return out_e, out_t


def structure_search(n_qubits: int, pool: GatePool,
                     cfg: StructureSearchConfig,
                     cost_and_grad_factory,
                     trace_hook=None):
    """Variable-structure ansatz optimization.

    `cost_and_grad_factory(circuit)` must return a function
    theta -> (cost, grad) for the given structure. Per iteration the gate
    sequence is perturbed in d places with P(d) = 1/2^d, compressed, padded
    back to `seq_len`, and trained with Adam under early stopping; the best
    (circuit, cost) pair seen is kept. Fully deterministic given cfg.seed.
    """
    rng = np.random.default_rng(cfg.seed)
    entries = [_random_entry(pool, rng) for _ in range(cfg.seq_len)]
    thetas = list(rng.uniform(0, 2 * np.pi, size=cfg.seq_len))
    best_cost = np.inf
    best_circuit = None
    trace = []
    for it in range(cfg.iterations):
        if it > 0:
            d = perturbation_count(cfg.seq_len, rng)
            for pos in rng.choice(cfg.seq_len, size=d, replace=False):
                entries[pos] = _random_entry(pool, rng)
                thetas[pos] = float(rng.uniform(0, 2 * np.pi))
        entries, thetas = compress_sequence(entries, thetas)
        while len(entries) < cfg.seq_len:
            entries.append(_random_entry(pool, rng))
            thetas.append(float(rng.uniform(0, 2 * np.pi)))
        circuit = _make_circuit(n_qubits, entries, thetas)
        cg = cost_and_grad_factory(circuit)
        theta_best, cost, history = adam_minimize(
            cg, circuit.theta, cfg.eta_init, cfg.epochs_per_iteration,
            early_stop_epochs=cfg.early_stop_epochs,
            early_stop_delta=cfg.improvement_tol)
        circuit = circuit.with_theta(theta_best)
        if cost < best_cost:
            best_cost = cost
            best_circuit = circuit
        # write the trained angles back into the working sequence
        slot_iter = iter(theta_best)
        thetas = [next(slot_iter) if e[0] in ("Rx", "Ry", "Rz") else t
                  for e, t in zip(entries, thetas)]
        trace.append({
            "iteration": it,
            "epochs": len(history),
            "cost": float(cost),
            "best_cost": float(best_cost),
            "gate_sequence_hash": circuit.structure_hash(),
        })
        if trace_hook is not None:
            trace_hook(trace[-1])
    return best_circuit, float(best_cost), trace
