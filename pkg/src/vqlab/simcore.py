"""Exact statevector / density-matrix simulation of few-qubit circuits.

Bit order is little-endian throughout the package: qubit 0 is the least
significant bit of a basis-state index, so the integer ``i`` labels the
basis state ``|b_{n-1} ... b_1 b_0>`` with ``b_k = (i >> k) & 1``.

Parameterized gates carry one of two generator conventions:

* ``HALF``:  U(theta) = exp(-i theta/2 * G)   (standard rotation gates)
* ``FULL``:  U(theta) = exp(+i theta * G)     (diagonal Ising-layer gates)

Both satisfy G^2 = 1, which is what the shift rule in :mod:`vqlab.circuits`
relies on; mixing the two silently corrupts gradients, so the convention is
an explicit field of every gate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

MAX_STATEVECTOR_QUBITS = 14
MAX_DENSITY_QUBITS = 10

HALF = "half"   # exp(-i theta/2 G)
FULL = "full"   # exp(+i theta G)

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

PARAMETERIZED_KINDS = frozenset(
    {"Rx", "Ry", "Rz", "ExpX", "ExpY", "ExpZ", "ExpZZ"}
)
FIXED_KINDS = frozenset({"H", "X", "Y", "Z", "CZ", "CNOT", "SWAP", "CSWAP"})
GATE_ARITY = {
    "Rx": 1, "Ry": 1, "Rz": 1, "H": 1, "X": 1, "Y": 1, "Z": 1,
    "ExpX": 1, "ExpY": 1, "ExpZ": 1,
    "CZ": 2, "CNOT": 2, "SWAP": 2, "ExpZZ": 2,
    "CSWAP": 3,
}

_GENERATORS = {"Rx": _X, "Ry": _Y, "Rz": _Z, "ExpX": _X, "ExpY": _Y, "ExpZ": _Z}


class GateError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    """One circuit element: kind, target qubits, optional angle + convention."""

    kind: str
    targets: tuple[int, ...]
    theta: float | None = None
    convention: str = HALF

    def __post_init__(self):
        if self.kind not in GATE_ARITY:
            raise GateError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if len(self.targets) != GATE_ARITY[self.kind]:
            raise GateError(
                f"{self.kind} expects {GATE_ARITY[self.kind]} targets, "
                f"got {self.targets}"
            )
        if len(set(self.targets)) != len(self.targets):
            raise GateError(f"duplicate targets in {self.targets}")
        if self.kind in PARAMETERIZED_KINDS and self.theta is None:
            raise GateError(f"{self.kind} requires theta")
        if self.convention not in (HALF, FULL):
            raise GateError(f"unknown convention {self.convention!r}")

    @property
    def is_parameterized(self) -> bool:
        return self.kind in PARAMETERIZED_KINDS

    def matrix(self) -> np.ndarray:
        """Dense unitary on the gate's own qubits (little-endian order)."""
        k = self.kind
        if k in ("H", "X", "Y", "Z"):
            return {"H": _H, "X": _X, "Y": _Y, "Z": _Z}[k]
        if k == "CZ":
            return np.diag([1, 1, 1, -1]).astype(complex)
        if k == "CNOT":
            # targets = (control, target); qubit order in the 4x4 matrix is
            # (targets[1], targets[0]) -> bit 0 is the first listed qubit.
            m = np.eye(4, dtype=complex)
            m[[1, 3]] = m[[3, 1]]
            return m
        if k == "SWAP":
            m = np.eye(4, dtype=complex)
            m[[1, 2]] = m[[2, 1]]
            return m
        if k == "CSWAP":
            # targets = (control, a, b): swap a,b when control set.
            m = np.eye(8, dtype=complex)
            # control is bit 0, a is bit 1, b is bit 2
            i1 = 0b011  # control=1, a=1, b=0
            i2 = 0b101  # control=1, a=0, b=1
            m[[i1, i2]] = m[[i2, i1]]
            return m
        if k == "ExpZZ":
            g = np.diag([1.0, -1.0, -1.0, 1.0]).astype(complex)
        else:
            g = _GENERATORS[k]
        th = float(self.theta)
        eye = np.eye(g.shape[0], dtype=complex)
        if self.convention == HALF:
            return np.cos(th / 2) * eye - 1j * np.sin(th / 2) * g
        return np.cos(th) * eye + 1j * np.sin(th) * g


Circuit = list  # a circuit is an ordered list of gates


@dataclass(frozen=True)
class Statevector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if self.n_qubits > MAX_STATEVECTOR_QUBITS:
            raise ValueError(f"n_qubits={self.n_qubits} exceeds dense cap")
        if amps.shape != (2**self.n_qubits,):
            raise ValueError("amplitude vector has wrong length")
        if abs(np.linalg.norm(amps) - 1.0) > 1e-10:
            raise ValueError("state is not normalized")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @staticmethod
    def zero(n_qubits: int) -> "Statevector":
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[0] = 1.0
        return Statevector(n_qubits, amps)

    @staticmethod
    def from_qubit_states(qubit_states: Sequence[np.ndarray]) -> "Statevector":
        """Product state; ``qubit_states[k]`` is the 2-vector of qubit k."""
        full = np.array([1.0 + 0j])
        for q in reversed(range(len(qubit_states))):
            full = np.kron(full, np.asarray(qubit_states[q], dtype=complex))
        return Statevector(len(qubit_states), full)

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(self.n_qubits, np.outer(self.amplitudes, self.amplitudes.conj()))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class DensityMatrix:
    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if self.n_qubits > MAX_DENSITY_QUBITS:
            raise ValueError(f"n_qubits={self.n_qubits} exceeds dense cap")
        d = 2**self.n_qubits
        if m.shape != (d, d):
            raise ValueError("density matrix has wrong shape")
        if np.max(np.abs(m - m.conj().T)) > 1e-10:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > 1e-10:
            raise ValueError("density matrix trace != 1")
        if np.linalg.eigvalsh(m)[0] < -1e-9:
            raise ValueError("density matrix has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @staticmethod
    def zero(n_qubits: int) -> "DensityMatrix":
        return Statevector.zero(n_qubits).to_density()

    def probabilities(self) -> np.ndarray:
        return np.real(np.diag(self.matrix))


@dataclass(frozen=True)
class MeasurementRecord:
    bitstring: int
    shots: int
    seed: int


State = Union[Statevector, DensityMatrix]


# ---------------------------------------------------------------------------
# gate application


def _apply_matrix_to_axes(tensor: np.ndarray, mat: np.ndarray,
                          axes: Sequence[int]) -> np.ndarray:
    """Apply a 2^k x 2^k matrix to the given tensor axes (one axis per qubit).

    ``axes[0]`` is the least-significant qubit of the matrix's index.
    """
    k = len(axes)
    mat_t = mat.reshape((2,) * (2 * k))
    # mat index layout after reshape: (out_{k-1}..out_0, in_{k-1}..in_0);
    # contract each in_j with the tensor axis that holds qubit targets[j].
    in_axes = list(range(k, 2 * k))
    state_axes = list(reversed(axes))
    moved = np.tensordot(mat_t, tensor, axes=(in_axes, state_axes))
    # moved: k output axes first, the untouched axes after; restore layout.
    rest = [ax for ax in range(tensor.ndim) if ax not in axes]
    return np.moveaxis(moved, range(tensor.ndim), state_axes + rest)


def _apply_unitary_sv(amps: np.ndarray, mat: np.ndarray,
                      targets: Sequence[int], n: int) -> np.ndarray:
    """Matrix on `targets`, statevector of n qubits, batched over extra axes."""
    batch_shape = amps.shape[:-1]
    t = amps.reshape(batch_shape + (2,) * n)
    # axis of qubit q is (ndim-1) - q within the qubit block
    offset = len(batch_shape)
    axes = [offset + (n - 1 - q) for q in targets]
    out = _apply_matrix_to_axes(t, mat, axes)
    return out.reshape(batch_shape + (2**n,))


def apply_gate(state: State, gate: Gate) -> State:
    """Unitary evolution of a statevector or density matrix by one gate."""
    n = state.n_qubits
    for q in gate.targets:
        if not 0 <= q < n:
            raise GateError(f"qubit {q} out of range for {n} qubits")
    mat = gate.matrix()
    if isinstance(state, Statevector):
        return Statevector(n, _apply_unitary_sv(state.amplitudes, mat, gate.targets, n))
    # U rho: apply U to each column; then rho' U^dag = (U rho'^dag)^dag.
    rho = _apply_unitary_sv(state.matrix.T, mat, gate.targets, n).T
    rho = _apply_unitary_sv(rho.conj(), mat, gate.targets, n).conj()
    return DensityMatrix(n, rho)


def run_circuit(circuit: Iterable[Gate], state: State) -> State:
    """Sequential application; list order is temporal order."""
    for g in circuit:
        state = apply_gate(state, g)
    return state


def run_circuit_batch(circuit: Iterable[Gate], amps: np.ndarray, n: int) -> np.ndarray:
    """Evolve a (batch, 2^n) array of statevectors through a circuit."""
    for g in circuit:
        amps = _apply_unitary_sv(amps, g.matrix(), g.targets, n)
    return amps


def circuit_unitary(circuit: Iterable[Gate], n: int) -> np.ndarray:
    """Dense 2^n x 2^n unitary of a circuit (small n only)."""
    u = np.eye(2**n, dtype=complex)
    u = run_circuit_batch(circuit, u.T, n).T
    return u


# ---------------------------------------------------------------------------
# subsystem operations and measurement


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    keep = sorted(set(int(q) for q in keep))
    n = rho.n_qubits
    if not keep:
        raise ValueError("keep set must be nonempty")
    if any(q < 0 or q >= n for q in keep):
        raise ValueError(f"keep set {keep} invalid for {n} qubits")
    reduced = partial_trace_raw(rho.matrix, keep, n)
    return DensityMatrix(len(keep), reduced)


def partial_trace_raw(mat: np.ndarray, keep: Sequence[int], n: int) -> np.ndarray:
    """Partial trace on a raw 2^n x 2^n array; `keep` sorted ascending."""
    t = mat.reshape((2,) * (2 * n))
    cur_qubits = list(range(n - 1, -1, -1))  # axis i holds qubit cur_qubits[i]
    m = n
    for q in range(n):
        if q in keep:
            continue
        ax = cur_qubits.index(q)
        t = np.trace(t, axis1=ax, axis2=ax + m)
        cur_qubits.pop(ax)
        m -= 1
        t = t.reshape((2,) * (2 * m))
    d = 2 ** len(keep)
    return t.reshape(d, d)


def reduced_state_fidelity(amps: np.ndarray, n: int, qubit: int,
                           target: np.ndarray) -> float:
    """<t| Tr_{rest}(|amps><amps|) |t> for a single kept qubit, no full rho."""
    t = amps.reshape((2,) * n)
    ax = n - 1 - qubit
    t = np.moveaxis(t, ax, 0).reshape(2, -1)
    overlap = target.conj() @ t
    return float(np.real(overlap @ overlap.conj()))


def exact_pmf(state: State) -> np.ndarray:
    """Born probabilities of all 2^n outcomes (little-endian index)."""
    p = state.probabilities()
    p = np.clip(np.real(p), 0.0, None)
    s = p.sum()
    if abs(s - 1.0) > 1e-10:
        raise ValueError("probabilities do not sum to 1")
    return p / s


def measure_all(state: State, shots: int, seed: int):
    """i.i.d. computational-basis samples; deterministic given seed.

    Returns (counts over 2^n outcomes, list of MeasurementRecord).
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = exact_pmf(state)
    rng = np.random.default_rng(seed)
    outcomes = rng.choice(len(p), size=shots, p=p)
    counts = np.bincount(outcomes, minlength=len(p))
    records = [
        MeasurementRecord(bitstring=int(b), shots=int(c), seed=seed)
        for b, c in enumerate(counts) if c > 0
    ]
    return counts, records


# ---------------------------------------------------------------------------
# serialization: one gate per line `KIND q0[,q1[,q2]] [theta] [conv]`


def dumps_circuit(circuit: Sequence[Gate]) -> str:
    lines = []
    for g in circuit:
        parts = [g.kind, ",".join(str(q) for q in g.targets)]
        if g.theta is not None:
            parts.append(format(float(g.theta), ".17g"))
            parts.append(g.convention)
        lines.append(" ".join(parts))
    return "\n".join(lines) + ("\n" if lines else "")


def loads_circuit(text: str) -> list[Gate]:
    gates = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            kind = parts[0]
            targets = tuple(int(x) for x in parts[1].split(","))
            theta = float(parts[2]) if len(parts) > 2 else None
            conv = parts[3] if len(parts) > 3 else HALF
            gates.append(Gate(kind, targets, theta, conv))
        except (IndexError, ValueError, GateError) as exc:
            raise ValueError(f"bad circuit line {lineno}: {raw!r} ({exc})") from exc
    return gates


# ---------------------------------------------------------------------------
# bit helpers shared across modules


def bits_matrix(n: int) -> np.ndarray:
    """(2^n, n) float matrix of bit values; column k is qubit/bit k."""
    idx = np.arange(2**n)
    return ((idx[:, None] >> np.arange(n)[None, :]) & 1).astype(float)


def int_to_bits(x: np.ndarray, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    return ((x[..., None] >> np.arange(n)) & 1).astype(float)
