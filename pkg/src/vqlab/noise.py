"""Kraus-operator noise channels and measurement-assignment noise.

Channels are stateless, immutable and composable by sequencing; a channel
acting on k qubits is embedded into an n-qubit system at application time.
The global depolarizing channel is represented as an affine map rather than
a 4^n-element Kraus list.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .simcore import DensityMatrix, _apply_unitary_sv

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class ChannelError(ValueError):
    pass


@dataclass(frozen=True)
class KrausChannel:
    kraus_ops: tuple
    acting_qubits: tuple[int, ...]
    label: str = ""

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.kraus_ops)
        k = len(self.acting_qubits)
        d = 2**k
        comp = sum(op.conj().T @ op for op in ops)
        if np.max(np.abs(comp - np.eye(d))) > 1e-10:
            raise ChannelError(f"Kraus completeness violated for {self.label!r}")
        for op in ops:
            op.setflags(write=False)
        object.__setattr__(self, "kraus_ops", ops)
        object.__setattr__(self, "acting_qubits", tuple(int(q) for q in self.acting_qubits))

    def on(self, *qubits: int) -> "KrausChannel":
        """Same channel re-targeted at different qubits."""
        return KrausChannel(self.kraus_ops, tuple(qubits), self.label)


@dataclass(frozen=True)
class GlobalDepolarizing:
    """rho -> (1-p) rho + p I/2^n, applied directly as an affine map."""

    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ChannelError("p must lie in [0, 1]")

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        d = 2**rho.n_qubits
        out = (1.0 - self.p) * rho.matrix + self.p * np.eye(d) / d
        return DensityMatrix(rho.n_qubits, out)


def _check_prob(p: float, name: str = "p"):
    if not 0.0 <= p <= 1.0:
        raise ChannelError(f"{name}={p} outside [0, 1]")


def pauli_channel(p_i: float, p_x: float, p_y: float, p_z: float,
                  qubit: int = 0) -> KrausChannel:
    probs = (p_i, p_x, p_y, p_z)
    for p in probs:
        _check_prob(p)
    if abs(sum(probs) - 1.0) > 1e-10:
        raise ChannelError("Pauli probabilities must sum to 1")
    ops = [np.sqrt(p) * m for p, m in zip(probs, (_I2, _X, _Y, _Z)) if p > 0]
    return KrausChannel(tuple(ops), (qubit,),
                        f"pauli(pI={p_i},pX={p_x},pY={p_y},pZ={p_z})")


def bit_flip(p: float, qubit: int = 0) -> KrausChannel:
    _check_prob(p)
    return KrausChannel(
        (np.sqrt(1 - p) * _I2, np.sqrt(p) * _X), (qubit,), f"bit_flip(p={p})")


def dephasing(p: float, qubit: int = 0) -> KrausChannel:
    _check_prob(p)
    return KrausChannel(
        (np.sqrt(1 - p) * _I2, np.sqrt(p) * _Z), (qubit,), f"dephasing(p={p})")


def depolarizing(p: float, qubit: int = 0) -> KrausChannel:
    """rho -> (1-p) rho + p I/2, i.e. each Pauli with weight p/4."""
    _check_prob(p)
    ops = (np.sqrt(1 - 3 * p / 4) * _I2,
           np.sqrt(p / 4) * _X, np.sqrt(p / 4) * _Y, np.sqrt(p / 4) * _Z)
    return KrausChannel(ops, (qubit,), f"depolarizing(p={p})")


def amplitude_damping(p: float, qubit: int = 0) -> KrausChannel:
    """Decay toward |0>: K0 = diag(1, sqrt(1-p)), K1 = sqrt(p)|0><1|."""
    _check_prob(p)
    k0 = np.array([[1, 0], [0, np.sqrt(1 - p)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(p)], [0, 0]], dtype=complex)
    return KrausChannel((k0, k1), (qubit,), f"amplitude_damping(p={p})")


def global_depolarizing(p: float) -> GlobalDepolarizing:
    return GlobalDepolarizing(p)


def apply_channel(rho: DensityMatrix, channel) -> DensityMatrix:
    """Sum_k E_k rho E_k^dag with the channel embedded on its acting qubits."""
    if isinstance(channel, GlobalDepolarizing):
        return channel.apply(rho)
    n = rho.n_qubits
    for q in channel.acting_qubits:
        if not 0 <= q < n:
            raise ChannelError(f"acting qubit {q} out of range")
    out = np.zeros_like(rho.matrix)
    for op in channel.kraus_ops:
        # E rho E^dag via two one-sided applications (as in unitary evolution)
        a = _apply_unitary_sv(rho.matrix.T, op, channel.acting_qubits, n).T
        out += _apply_unitary_sv(a.conj(), op, channel.acting_qubits, n).conj()
    return DensityMatrix(n, out)


def apply_channels(rho: DensityMatrix, channels) -> DensityMatrix:
    for ch in channels:
        rho = apply_channel(rho, ch)
    return rho


# ---------------------------------------------------------------------------
# measurement-assignment noise


@dataclass(frozen=True)
class AssignmentMatrix:
    """p_kl = probability of reading outcome k given true outcome l."""

    p00: float
    p01: float
    p10: float
    p11: float

    def __post_init__(self):
        for v in (self.p00, self.p01, self.p10, self.p11):
            _check_prob(v)
        if abs(self.p00 + self.p10 - 1.0) > 1e-10 or abs(self.p01 + self.p11 - 1.0) > 1e-10:
            raise ChannelError("assignment columns must each sum to 1")

    @staticmethod
    def symmetric(p_correct: float) -> "AssignmentMatrix":
        return AssignmentMatrix(p_correct, 1 - p_correct, 1 - p_correct, p_correct)


def noisy_povm(a: AssignmentMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Noisy single-qubit effects (Pi~0, Pi~1); they sum to the identity."""
    pi0 = np.diag([a.p00, a.p01]).astype(complex)
    pi1 = np.diag([a.p10, a.p11]).astype(complex)
    return pi0, pi1


# ---------------------------------------------------------------------------
# channel spec strings: NAME(p=...,qubits=[...])

_SPEC_RE = re.compile(r"^\s*(\w+)\s*\((.*)\)\s*$")

_BUILDERS = {
    "bit_flip": bit_flip,
    "dephasing": dephasing,
    "depolarizing": depolarizing,
    "amplitude_damping": amplitude_damping,
}


def parse_channel_spec(spec: str):
    """Parse `NAME(p=...,qubits=[...])`; NAME may also be global_depolarizing
    or pauli (with pI,pX,pY,pZ)."""
    m = _SPEC_RE.match(spec)
    if not m:
        raise ChannelError(f"cannot parse channel spec {spec!r}")
    name, body = m.group(1), m.group(2)
    kv = {}
    for part in re.split(r",(?![^\[]*\])", body):
        part = part.strip()
        if not part:
            continue
        key, _, val = part.partition("=")
        kv[key.strip()] = val.strip()
    qubits = [0]
    if "qubits" in kv:
        qubits = [int(x) for x in kv.pop("qubits").strip("[]").split(",") if x.strip()]
    if name == "global_depolarizing":
        return global_depolarizing(float(kv["p"]))
    if name == "pauli":
        return pauli_channel(float(kv.get("pI", 0)), float(kv.get("pX", 0)),
                             float(kv.get("pY", 0)), float(kv.get("pZ", 0)),
                             qubit=qubits[0])
    if name not in _BUILDERS:
        raise ChannelError(f"unknown channel {name!r}")
    return _BUILDERS[name](float(kv["p"]), qubit=qubits[0])
