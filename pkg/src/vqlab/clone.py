"""Variational quantum cloning: state families, cloning costs and gradients,
analytic reference fidelities, structure-searched cloners, faithfulness
bounds, and the SWAP-test estimator.

Local fidelities compare each output clone to the input state; the global
fidelity compares the joint clone registers to psi^(x)N. Costs are Monte
Carlo averages over the state family (exhaustive for finite families).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .circuits import (GatePool, ParamCircuit, StructureSearchConfig,
                       build_ideal_cloner, shifted_thetas, structure_search)
from .metrics import bures_angle, fidelity, trace_distance
from .rng import derive
from .simcore import Statevector, partial_trace_raw

FULL_SPHERE_NORMALIZATION = 4 * np.pi
EQUATOR_NORMALIZATION = 2 * np.pi


# ---------------------------------------------------------------------------
# state families


@dataclass(frozen=True)
class StateFamily:
    """Family of single-qubit states to clone.

    kinds: haar, phase_covariant_xy, phase_covariant_xz,
    fixed_overlap(phi), four_state(phi). Finite families expose
    `exhaustive()`; continuous ones are sampled.
    """

    kind: str
    phi: float = 0.0

    def sampler(self, rng: np.random.Generator) -> np.ndarray:
        if self.kind == "haar":
            v = rng.normal(size=2) + 1j * rng.normal(size=2)
            return v / np.linalg.norm(v)
        if self.kind == "phase_covariant_xy":
            eta = rng.uniform(0, 2 * np.pi)
            return np.array([1.0, np.exp(1j * eta)]) / np.sqrt(2)
        if self.kind == "phase_covariant_xz":
            theta = rng.uniform(0, 2 * np.pi)
            return np.array([np.cos(theta), np.sin(theta)], dtype=complex)
        states = self.exhaustive()
        return states[rng.integers(len(states))]

    def exhaustive(self) -> list[np.ndarray]:
        c, s = np.cos(self.phi), np.sin(self.phi)
        if self.kind == "fixed_overlap":
            # pair with overlap sin(2 phi)
            return [np.array([c, s], dtype=complex),
                    np.array([s, c], dtype=complex)]
        if self.kind == "four_state":
            return [np.array([c, s], dtype=complex),
                    np.array([c, -s], dtype=complex),
                    np.array([s, c], dtype=complex),
                    np.array([s, -c], dtype=complex)]
        raise ValueError(f"{self.kind} has no finite state list")

    @property
    def is_finite(self) -> bool:
        return self.kind in ("fixed_overlap", "four_state")

    @property
    def overlap(self) -> float:
        """Pairwise overlap s = sin(2 phi) of the fixed-overlap pair."""
        return float(np.sin(2 * self.phi))

    @property
    def normalization(self) -> float:
        """Measure of the family's parameter space (full sphere or circle)."""
        if self.kind == "haar":
            return FULL_SPHERE_NORMALIZATION
        if self.kind.startswith("phase_covariant"):
            return EQUATOR_NORMALIZATION
        return FULL_SPHERE_NORMALIZATION

    def draw(self, k: int, seed: int) -> list[np.ndarray]:
        if self.is_finite:
            states = self.exhaustive()
            return [states[i % len(states)] for i in range(max(k, len(states)))]
        rng = derive(seed, f"family/{self.kind}")
        return [self.sampler(rng) for _ in range(k)]


@dataclass(frozen=True)
class CloneTask:
    """M -> N cloning layout on n_qubits wires.

    Inputs go on `input_registers` (M of them), the N clones are read from
    `output_registers`; remaining wires are |0>-initialized ancillas.
    """

    n_inputs: int
    n_outputs: int
    n_qubits: int
    input_registers: tuple[int, ...]
    output_registers: tuple[int, ...]
    family: StateFamily
    asymmetry_p: Optional[float] = None

    def __post_init__(self):
        if not self.n_outputs > self.n_inputs >= 1:
            raise ValueError("need N > M >= 1")
        if len(self.input_registers) != self.n_inputs:
            raise ValueError("input register count mismatch")
        if len(set(self.output_registers)) != self.n_outputs:
            raise ValueError("output registers must be distinct")

    @staticmethod
    def one_to_two(family: StateFamily, with_ancilla: bool = True,
                   outputs: tuple[int, int] = (1, 2)) -> "CloneTask":
        n = 3 if with_ancilla else 2
        outs = outputs if with_ancilla else (0, 1)
        return CloneTask(1, 2, n, (0,), outs, family)

    @staticmethod
    def general(m: int, n_out: int, family: StateFamily,
                n_ancilla: int = 1) -> "CloneTask":
        n = n_out + n_ancilla
        return CloneTask(m, n_out, n, tuple(range(m)),
                         tuple(range(n_out)), family)

    def prepare_batch(self, states: Sequence[np.ndarray]) -> np.ndarray:
        """(K, 2^n) input amplitudes: psi on input registers, |0> elsewhere."""
        k = len(states)
        amps = np.zeros((k, 2**self.n_qubits), dtype=complex)
        for idx, psi in enumerate(states):
            qubits = [np.array([1.0, 0.0], dtype=complex)] * self.n_qubits
            for reg in self.input_registers:
                qubits[reg] = np.asarray(psi, dtype=complex)
            amps[idx] = Statevector.from_qubit_states(qubits).amplitudes
        return amps


# ---------------------------------------------------------------------------
# fidelity evaluation (batched over the state set)


def local_fidelities(amps: np.ndarray, n: int, targets: Sequence[np.ndarray],
                     clone_qubits: Sequence[int]) -> np.ndarray:
    """(K, n_clones) matrix <psi_k| rho_j^k |psi_k> from output statevectors."""
    k = amps.shape[0]
    out = np.empty((k, len(clone_qubits)))
    t = amps.reshape((k,) + (2,) * n)
    targ = np.stack([np.asarray(s, dtype=complex) for s in targets])
    for col, q in enumerate(clone_qubits):
        axis = 1 + (n - 1 - q)
        moved = np.moveaxis(t, axis, 1).reshape(k, 2, -1)
        proj = np.einsum("kb,kbr->kr", targ.conj(), moved)
        out[:, col] = np.sum(np.abs(proj) ** 2, axis=1)
    return out


def global_fidelities(amps: np.ndarray, n: int, targets: Sequence[np.ndarray],
                      clone_qubits: Sequence[int]) -> np.ndarray:
    """(K,) vector <psi^N| Tr_anc rho |psi^N> over the clone registers."""
    k = amps.shape[0]
    t = amps.reshape((k,) + (2,) * n)
    # move clone axes to the front (in register order), ancillas after
    axes = [1 + (n - 1 - q) for q in clone_qubits]
    rest = [ax for ax in range(1, n + 1) if ax not in axes]
    t = np.transpose(t, [0] + axes + rest)
    t = t.reshape(k, 2 ** len(clone_qubits), -1)
    out = np.empty(k)
    for idx in range(k):
        psi = np.asarray(targets[idx], dtype=complex)
        phi = psi
        for _ in range(len(clone_qubits) - 1):
            phi = np.kron(phi, psi)
        proj = phi.conj() @ t[idx]
        out[idx] = np.sum(np.abs(proj) ** 2)
    return out


@dataclass
class CloneEval:
    local: np.ndarray          # (K, N) per-state local fidelities
    global_: np.ndarray        # (K,)

    @property
    def mean_local(self) -> np.ndarray:
        return self.local.mean(axis=0)

    @property
    def mean_global(self) -> float:
        return float(self.global_.mean())

    def rows(self):
        for k in range(self.local.shape[0]):
            yield [k, *self.local[k].tolist(), float(self.global_[k])]


def evaluate_cloner(task: CloneTask, circuit: ParamCircuit,
                    states: Sequence[np.ndarray],
                    theta: Optional[np.ndarray] = None) -> CloneEval:
    if circuit.n_qubits != task.n_qubits:
        raise ValueError("circuit does not match the task's register layout")
    amps = circuit.run_batch(task.prepare_batch(states), theta)
    loc = local_fidelities(amps, task.n_qubits, states, task.output_registers)
    glob = global_fidelities(amps, task.n_qubits, states, task.output_registers)
    return CloneEval(loc, glob)


# ---------------------------------------------------------------------------
# cost functions


def asymmetric_targets(p: float) -> tuple[float, float]:
    """(F_B, F_E) saturating the no-cloning tradeoff at parameter p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    f_b = 1.0 - p**2 / 2.0
    f_e = 1.0 - 0.25 * (2.0 - p**2 - p * np.sqrt(4.0 - 3.0 * p**2))
    return float(f_b), float(f_e)


def _cost_from_fidelities(which: str, loc: np.ndarray, glob: np.ndarray,
                          asym_p: Optional[float]) -> float:
    if which == "local":
        return float(np.mean(1.0 - loc.mean(axis=1)))
    if which == "squared":
        per_state = np.sum((1.0 - loc) ** 2, axis=1)
        n_clones = loc.shape[1]
        for i in range(n_clones):
            for j in range(i + 1, n_clones):
                per_state = per_state + (loc[:, i] - loc[:, j]) ** 2
        return float(np.mean(per_state))
    if which == "global":
        return float(np.mean(1.0 - glob))
    if which == "asymmetric":
        if loc.shape[1] != 2:
            raise ValueError("asymmetric cost is defined for 1->2 cloning")
        f_b, f_e = asymmetric_targets(asym_p)
        return float(np.mean((f_b - loc[:, 0]) ** 2 + (f_e - loc[:, 1]) ** 2))
    raise ValueError(f"unknown cost kind {which!r}")


def clone_cost(task: CloneTask, circuit: ParamCircuit, which: str = "local",
               states: Optional[Sequence[np.ndarray]] = None, k_states: int = 30,
               seed: int = 0, theta: Optional[np.ndarray] = None) -> float:
    states = task.family.draw(k_states, seed) if states is None else states
    ev = evaluate_cloner(task, circuit, states, theta)
    return _cost_from_fidelities(which, ev.local, ev.global_, task.asymmetry_p)


def clone_cost_and_grad(task: CloneTask, circuit: ParamCircuit,
                        which: str = "local",
                        states: Optional[Sequence[np.ndarray]] = None,
                        k_states: int = 30, seed: int = 0):
    """Returns theta -> (cost, grad). Linear costs use the shift rule on the
    cost directly; the squared and asymmetric costs chain it through the
    per-clone fidelities. Small registers run through the compiled
    dense-unitary evaluator."""
    from .circuits import CompiledCircuit
    states = task.family.draw(k_states, seed) if states is None else states
    linear = which in ("local", "global")
    inputs = task.prepare_batch(states)
    compiled = CompiledCircuit(circuit) if task.n_qubits <= 7 else None

    def fidelities(theta):
        if compiled is not None:
            amps = compiled.run_batch(inputs, theta)
        else:
            amps = circuit.run_batch(inputs, theta)
        loc = local_fidelities(amps, task.n_qubits, states,
                               task.output_registers)
        glob = (global_fidelities(amps, task.n_qubits, states,
                                  task.output_registers)
                if (which == "global") else np.zeros(len(states)))
        return loc, glob

    def cg(theta):
        loc, glob = fidelities(theta)
        cost = _cost_from_fidelities(which, loc, glob, task.asymmetry_p)
        grad = np.zeros(circuit.n_params)
        for slot in range(circuit.n_params):
            up, down, factor = shifted_thetas(circuit, slot, theta)
            loc_u, glob_u = fidelities(up)
            loc_d, glob_d = fidelities(down)
            if linear:
                cost_u = _cost_from_fidelities(which, loc_u, glob_u, task.asymmetry_p)
                cost_d = _cost_from_fidelities(which, loc_d, glob_d, task.asymmetry_p)
                grad[slot] = factor * (cost_u - cost_d)
                continue
            dloc = factor * (loc_u - loc_d)
            if which == "squared":
                per = -2.0 * (1.0 - loc) * dloc
                term = per.sum(axis=1)
                n_clones = loc.shape[1]
                for i in range(n_clones):
                    for j in range(i + 1, n_clones):
                        term = term + 2.0 * (loc[:, i] - loc[:, j]) * (
                            dloc[:, i] - dloc[:, j])
                grad[slot] = float(np.mean(term))
            else:  # asymmetric
                f_b, f_e = asymmetric_targets(task.asymmetry_p)
                term = (-2.0 * (f_b - loc[:, 0]) * dloc[:, 0]
                        - 2.0 * (f_e - loc[:, 1]) * dloc[:, 1])
                grad[slot] = float(np.mean(term))
        return cost, grad

    return cg


def clone_grad(task: CloneTask, circuit: ParamCircuit, which: str = "local",
               states=None, k_states: int = 30, seed: int = 0,
               theta: Optional[np.ndarray] = None) -> np.ndarray:
    cg = clone_cost_and_grad(task, circuit, which, states, k_states, seed)
    return cg(circuit.theta if theta is None else theta)[1]


# ---------------------------------------------------------------------------
# analytic reference fidelities


def analytic_fidelity(kind: str, m: int = 1, n: int = 2,
                      s: Optional[float] = None) -> float:
    """Closed-form optimal cloning fidelities.

    kinds: universal_local, universal_global, phase_covariant_local,
    phase_covariant_global, fixed_overlap_local (1->2 only),
    fixed_overlap_global, fixed_overlap_local_from_global.
    """
    if kind == "universal_local":
        return (m * (n + 2) + n - m) / (n * (m + 2))
    if kind == "universal_global":
        from math import factorial
        return factorial(n) * factorial(m + 1) / (factorial(m) * factorial(n + 1))
    if kind == "phase_covariant_local":
        if (m, n) != (1, 2):
            raise ValueError("phase-covariant closed form given for 1->2")
        return 0.5 * (1.0 + 1.0 / np.sqrt(2.0))
    if kind == "phase_covariant_global":
        if (m, n) != (1, 2):
            raise ValueError("phase-covariant closed form given for 1->2")
        return (1.0 + np.sqrt(2.0)) ** 2 / 8.0
    if s is None:
        raise ValueError("fixed-overlap fidelities need the overlap s")
    if kind == "fixed_overlap_local":
        if (m, n) != (1, 2):
            raise ValueError("fixed-overlap local closed form is 1->2 only")
        a = np.sqrt(1.0 - 2.0 * s + 9.0 * s**2)
        return float(0.5 + (np.sqrt(2.0) / (32.0 * s)) * (1.0 + s)
                     * (3.0 - 3.0 * s + a)
                     * np.sqrt(-1.0 + 2.0 * s + 3.0 * s**2 + (1.0 - s) * a))
    if kind == "fixed_overlap_global":
        return float(0.5 * (1.0 + s**(m + n)
                            + np.sqrt(1.0 - s**(2 * m)) * np.sqrt(1.0 - s**(2 * n))))
    if kind == "fixed_overlap_local_from_global":
        return float(0.25 * ((1 + s**m) / (1 + s**n) * (1 + s**2 + 2 * s**n)
                             + (1 - s**m) / (1 - s**n) * (1 + s**2 - 2 * s**n)
                             + 2 * (1 - s**(2 * m)) / (1 - s**(2 * n)) * (1 - s**2)))
    raise ValueError(f"unknown analytic fidelity kind {kind!r}")


def asym_tradeoff(p: float) -> tuple[float, float]:
    """(F_B, F_E) along the saturated no-cloning inequality."""
    return asymmetric_targets(p)


# ---------------------------------------------------------------------------
# the optimal symmetric fixed-overlap cloner (2-qubit, no ancilla)
#
# The two clone-pair outputs live in the symmetric subspace; the unitarity
# constraint <A0|A1> = s fixes the antisymmetric weight, leaving a single
# angle that is optimized for the mean local fidelity. The optimum matches
# the closed-form fixed_overlap_local fidelity to machine precision (tested).


def optimal_fixed_overlap_pair(phi: float, criterion: str = "local"):
    """2-qubit output states (A0, A1) of the optimal symmetric cloner for
    the pair cos(phi)|0> +/- sin(phi)|1>; `criterion` picks the local- or
    global-fidelity optimum."""
    p0 = np.array([np.cos(phi), np.sin(phi)])
    s = float(np.cos(2 * phi))
    y = np.sqrt((1.0 - s) / 2.0)
    r = np.sqrt((1.0 + s) / 2.0)
    e1 = np.array([1.0, 0, 0, 0])
    e2 = np.array([0, 1.0, 1.0, 0]) / np.sqrt(2.0)
    e3 = np.array([0, 0, 0, 1.0])

    def candidate(t: float) -> np.ndarray:
        return r * np.cos(t) * e1 + y * e2 + r * np.sin(t) * e3

    pp0 = np.kron(p0, p0)

    def objective(t: float) -> float:
        a = candidate(t)
        if criterion == "global":
            return -float((pp0 @ a) ** 2)
        rho = np.outer(a, a)
        f1 = p0 @ partial_trace_raw(rho, [0], 2).real @ p0
        f2 = p0 @ partial_trace_raw(rho, [1], 2).real @ p0
        return -0.5 * float(f1 + f2)

    res = minimize_scalar(objective, bounds=(-np.pi, np.pi), method="bounded",
                          options={"xatol": 1e-14})
    a0 = candidate(res.x)
    reflect = np.kron(np.diag([1.0, -1.0]), np.diag([1.0, -1.0]))
    return a0, reflect @ a0


def fixed_overlap_clone_state(phi: float, which: int = 0,
                              criterion: str = "local") -> np.ndarray:
    """Reduced single-clone density matrix of the optimal symmetric cloner."""
    a0, a1 = optimal_fixed_overlap_pair(phi, criterion)
    a = (a0, a1)[which]
    return partial_trace_raw(np.outer(a, a.conj()), [0], 2)


def optimal_clone_of(psi: np.ndarray, partner: np.ndarray) -> np.ndarray:
    """Optimal symmetric-cloner clone of `psi` from the pair (psi, partner).

    Only the overlap matters, so the canonical mirror pair with the same
    overlap is cloned and the result rotated onto the given pair.
    """
    psi = np.asarray(psi, dtype=complex)
    partner = np.asarray(partner, dtype=complex)
    s = abs(np.vdot(psi, partner))
    phi_m = float(np.arccos(min(max(s, 0.0), 1.0)) / 2.0)
    m0 = np.array([np.cos(phi_m), np.sin(phi_m)], dtype=complex)
    m1 = np.array([np.cos(phi_m), -np.sin(phi_m)], dtype=complex)
    # unitary V with V m0 = psi, V m1 ~ partner (up to phase)
    phase = np.vdot(psi, partner) / s if s > 1e-12 else 1.0
    targ1 = partner / phase

    def orthobasis(a, b):
        b_perp = b - np.vdot(a, b) * a
        nb = np.linalg.norm(b_perp)
        if nb < 1e-12:
            b_perp = np.array([-np.conj(a[1]), np.conj(a[0])])
            nb = 1.0
        return np.stack([a, b_perp / nb], axis=1)

    v = orthobasis(psi, targ1) @ orthobasis(m0, m1).conj().T
    rc = fixed_overlap_clone_state(phi_m, 0)
    return v @ rc @ v.conj().T


# ---------------------------------------------------------------------------
# training (variable structure)


def default_pool_1to2(n_qubits: int = 3, nearest_neighbour: bool = False) -> GatePool:
    qubits = list(range(n_qubits))
    if nearest_neighbour:
        edges = [(i, i + 1) for i in range(n_qubits - 1)]
    else:
        edges = [(i, j) for i in range(n_qubits) for j in range(i + 1, n_qubits)]
    return GatePool.rotations_plus_cz(qubits, edges)


def train_cloner(task: CloneTask, pool: GatePool, cfg: StructureSearchConfig,
                 which: str = "local", k_states: int = 30,
                 states: Optional[Sequence[np.ndarray]] = None,
                 k_eval: int = 64):
    """Structure search + Adam on the chosen cloning cost; deterministic
    given cfg.seed. The returned CloneEval is computed on a fresh held-out
    draw from the family (the training sample is small enough to overfit)."""
    states = (task.family.draw(k_states, cfg.seed + 1)
              if states is None else states)

    def factory(circuit: ParamCircuit):
        return clone_cost_and_grad(task, circuit, which, states=states)

    circuit, best_cost, trace = structure_search(
        task.n_qubits, pool, cfg, factory)
    eval_states = task.family.draw(k_eval, cfg.seed + 99991)
    ev = evaluate_cloner(task, circuit, eval_states)
    return circuit, ev, best_cost, trace


# ---------------------------------------------------------------------------
# faithfulness bounds


def optimal_cost(task: CloneTask, which: str) -> float:
    fam = task.family
    n = task.n_outputs
    if fam.kind == "haar":
        f_l = analytic_fidelity("universal_local", task.n_inputs, n)
        f_g = analytic_fidelity("universal_global", task.n_inputs, n)
    elif fam.kind.startswith("phase_covariant"):
        f_l = analytic_fidelity("phase_covariant_local", task.n_inputs, n)
        f_g = analytic_fidelity("phase_covariant_global", task.n_inputs, n)
    else:
        f_l = analytic_fidelity("fixed_overlap_local", 1, 2, s=fam.overlap)
        f_g = analytic_fidelity("fixed_overlap_global", task.n_inputs, n,
                                s=fam.overlap)
    if which == "local":
        return 1.0 - f_l
    if which == "squared":
        return n * (1.0 - f_l) ** 2
    if which == "global":
        return 1.0 - f_g
    if which == "asymmetric":
        return 0.0
    raise ValueError(which)


def optimal_fidelity_for(task: CloneTask, which: str) -> float:
    if which == "global":
        return 1.0 - optimal_cost(task, "global")
    return 1.0 - optimal_cost(task, "local")


def faithfulness_bounds(which: str, f_opt: float, epsilon: float,
                        normalization: float) -> tuple[float, float]:
    """(Bures-angle bound, trace-distance bound) for a cost excess epsilon."""
    eps = max(epsilon, 0.0)
    if which == "squared":
        ba = normalization * eps / (2.0 * (1.0 - f_opt) * np.sin(f_opt))
        tr = 0.5 * np.sqrt(max(
            4.0 * f_opt * (1.0 - f_opt)
            + eps * normalization * (1.0 - 2.0 * f_opt) / (2.0 * (1.0 - f_opt)),
            0.0))
        return float(ba), float(tr)
    if which in ("local", "global"):
        ba = normalization * eps / np.sin(f_opt)
        tr = 0.5 * np.sqrt(max(
            4.0 * f_opt * (1.0 - f_opt) + normalization * eps * (1.0 - 2.0 * f_opt),
            0.0))
        return float(ba), float(tr)
    if which == "asymmetric":
        ba = np.sqrt(normalization * eps) / np.sin(f_opt)
        tr = 0.5 * np.sqrt(max(
            4.0 * f_opt * (1.0 - f_opt)
            + np.sqrt(normalization * eps) * (1.0 - 2.0 * f_opt), 0.0))
        return float(ba), float(tr)
    raise ValueError(which)


PHASE_COVARIANT_BA_CONSTANT = 56.0  # explicit squared-cost constant


def _reference_clone_states(task: CloneTask, states) -> list[np.ndarray]:
    """Optimal reduced clone states per input state, per family."""
    fam = task.family
    if fam.kind == "haar" or fam.kind.startswith("phase_covariant"):
        kind = "universal" if fam.kind == "haar" else "phase_covariant"
        ideal = build_ideal_cloner(kind)
        ideal_task = CloneTask(1, 2, 3, (0,), (1, 2), fam)
        amps = ideal.run_batch(ideal_task.prepare_batch(states))
        refs = []
        for k in range(len(states)):
            rho = np.outer(amps[k], amps[k].conj())
            refs.append(partial_trace_raw(rho, [1], 3))
        return refs
    # fixed overlap: analytic optimal-cloner output, rotated onto the pair
    finite = fam.exhaustive()
    refs = []
    for psi in states:
        overlaps = [abs(np.vdot(f, psi)) for f in finite]
        idx = int(np.argmax(overlaps))
        partner = finite[1 - idx] if len(finite) == 2 else finite[idx ^ 2]
        refs.append(optimal_clone_of(finite[idx], partner))
    return refs


@dataclass
class FaithfulnessReport:
    epsilon: float
    ba_bound: float
    tr_bound: float
    max_ba: float
    max_tr: float
    satisfied: bool
    normalization: float


def faithfulness_check(task: CloneTask, circuit: ParamCircuit,
                       which: str = "squared", k_states: int = 20,
                       seed: int = 0) -> FaithfulnessReport:
    """Verify d_BA(rho_theta, rho_opt) and d_Tr against the weak-faithfulness
    bounds at the measured cost excess epsilon = C - C_opt.

    For phase-covariant squared cost the explicit 56*epsilon Bures-angle
    constant is used verbatim; the family's measure normalization is
    reported alongside.
    """
    states = task.family.draw(k_states, seed)
    ev = evaluate_cloner(task, circuit, states)
    cost = _cost_from_fidelities(which, ev.local, ev.global_, task.asymmetry_p)
    eps = cost - optimal_cost(task, which)
    f_opt = optimal_fidelity_for(task, which)
    norm = task.family.normalization
    ba_bound, tr_bound = faithfulness_bounds(which, f_opt, eps, norm)
    if which == "squared" and task.family.kind.startswith("phase_covariant"):
        ba_bound = PHASE_COVARIANT_BA_CONSTANT * max(eps, 0.0)
    refs = _reference_clone_states(task, states)
    amps = circuit.run_batch(task.prepare_batch(states))
    max_ba = 0.0
    max_tr = 0.0
    for k in range(len(states)):
        rho = np.outer(amps[k], amps[k].conj())
        for q in task.output_registers:
            red = partial_trace_raw(rho, [q], task.n_qubits)
            max_ba = max(max_ba, bures_angle(red, refs[k]))
            max_tr = max(max_tr, trace_distance(red, refs[k]))
    # 1e-6 absolute floor: at epsilon -> 0 the Bures angle between
    # numerically identical states is still ~sqrt(machine epsilon)
    ok = (max_ba <= ba_bound + 1e-6) and (max_tr <= tr_bound + 1e-6)
    return FaithfulnessReport(float(eps), float(ba_bound), float(tr_bound),
                              float(max_ba), float(max_tr), bool(ok), norm)


def cost_ordering_check(task: CloneTask, circuit: ParamCircuit,
                        k_states: int = 20, seed: int = 0) -> dict:
    """C_L <= C_G <= N C_L for the circuit on the task's family."""
    states = task.family.draw(k_states, seed)
    ev = evaluate_cloner(task, circuit, states)
    c_l = _cost_from_fidelities("local", ev.local, ev.global_, None)
    c_g = _cost_from_fidelities("global", ev.local, ev.global_, None)
    n = task.n_outputs
    return {
        "C_L": c_l,
        "C_G": c_g,
        "holds": bool(c_l <= c_g + 1e-9 and c_g <= n * c_l + 1e-9),
    }


# ---------------------------------------------------------------------------
# SWAP-test estimation


def swap_test_samples(epsilon: float, delta: float) -> int:
    """L*K = ceil( ln(2/delta) / epsilon^2 ) for an epsilon-accurate cost."""
    if epsilon <= 0 or not 0 < delta < 1:
        raise ValueError("need epsilon > 0 and 0 < delta < 1")
    return int(np.ceil(np.log(2.0 / delta) / epsilon**2))


def swap_cost_estimate(task: CloneTask, circuit: ParamCircuit, which: str,
                       shots_per_state: int, k_states: int, seed: int = 0) -> float:
    """Monte-Carlo cost estimate from simulated SWAP-test outcomes.

    Each required fidelity F is estimated from `shots_per_state` ancilla
    measurements with Pr[anc = 1] = (1 - F)/2.
    """
    if which not in ("local", "global"):
        raise ValueError("swap estimation covers the local and global costs")
    states = task.family.draw(k_states, seed)
    ev = evaluate_cloner(task, circuit, states)
    rng = derive(seed, "clone/swap_estimate")

    def estimate(f: float) -> float:
        ones = rng.binomial(shots_per_state, 0.5 * (1.0 - min(max(f, 0.0), 1.0)))
        return 1.0 - 2.0 * ones / shots_per_state

    if which == "global":
        return float(np.mean([1.0 - estimate(f) for f in ev.global_]))
    est = [1.0 - np.mean([estimate(f) for f in row]) for row in ev.local]
    return float(np.mean(est))


# ---------------------------------------------------------------------------
# gradient-variance probe (barren-plateau diagnostics)


def grad_variance_probe(which: str, n_list: Sequence[int], trials: int = 60,
                        seed: int = 0, layers_fn=None) -> dict:
    """Empirical Var[dC/dtheta_1] over random parameters for 1 -> n cloning
    with a log-depth layered ansatz; returns per-n variances and the fitted
    power-law exponent of the decay."""
    from .circuits import build_hardware_efficient
    layers_fn = layers_fn or (lambda n: max(1, int(np.ceil(np.log2(n)))))
    variances = {}
    for n in n_list:
        fam = StateFamily("haar")
        task = CloneTask(1, n, n, (0,), tuple(range(n)), fam)
        circuit = build_hardware_efficient(
            n, layers_fn(n), [(i, i + 1) for i in range(n - 1)])
        states = fam.draw(8, seed + n)
        rng = derive(seed, f"variance/{which}/{n}")
        grads = []
        for _ in range(trials):
            theta = rng.uniform(0, 2 * np.pi, circuit.n_params)
            up, down, factor = shifted_thetas(circuit, 0, theta)
            ev_u = evaluate_cloner(task, circuit, states, up)
            ev_d = evaluate_cloner(task, circuit, states, down)
            cost_u = _cost_from_fidelities(which, ev_u.local, ev_u.global_, None)
            cost_d = _cost_from_fidelities(which, ev_d.local, ev_d.global_, None)
            grads.append(factor * (cost_u - cost_d))
        variances[n] = float(np.var(grads))
    ns = np.array(sorted(variances))
    vs = np.array([variances[n] for n in ns])
    slope = float(np.polyfit(np.log(ns), np.log(np.maximum(vs, 1e-300)), 1)[0])
    return {"variances": variances, "exponent": slope}
