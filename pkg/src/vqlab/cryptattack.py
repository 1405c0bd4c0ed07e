"""Cloning-based cryptanalysis calculators: Helstrom discrimination, the
two coin-flipping attack families (2-state and 4-state protocols), and the
BB84 critical error rate via the Holevo quantity.

Attack calculators accept either the analytic ideal cloner for the relevant
state family or a trained circuit from :mod:`vqlab.clone`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .circuits import ParamCircuit, build_ideal_cloner
from .clone import CloneTask, StateFamily, fixed_overlap_clone_state
from .metrics import binary_entropy, holevo_quantity
from .simcore import partial_trace_raw

_X = np.array([[0.0, 1.0], [1.0, 0.0]])
_Z = np.diag([1.0, -1.0])


@dataclass
class AttackReport:
    protocol: str
    p_guess: float
    p_detect: float
    p_success: float
    bias: float
    inputs: dict

    def __post_init__(self):
        # the reported bias is success minus a fair coin, by definition
        assert abs(self.bias - (self.p_success - 0.5)) < 1e-12


@dataclass
class QkdReport:
    chi_values: dict
    chi_min: float
    d_crit: float
    residual: float


def helstrom(rho1, rho2, prior: float = 0.5) -> float:
    """Optimal discrimination probability (1 + ||p rho1 - (1-p) rho2||_1)/2;
    for equal priors this is 1/2 + d_Tr(rho1, rho2)/2."""
    r1 = np.asarray(rho1, dtype=complex)
    r2 = np.asarray(rho2, dtype=complex)
    if r1.shape != r2.shape:
        raise ValueError("states must share a dimension")
    diff = prior * r1 - (1 - prior) * r2
    eigs = np.linalg.eigvalsh(diff)
    return float(0.5 * (1.0 + np.abs(eigs).sum()))


# ---------------------------------------------------------------------------
# 2-state coin-flipping attack (fixed-overlap pair at phi = pi/18)


def _fixed_overlap_states(phi: float):
    p0 = np.array([np.cos(phi), np.sin(phi)], dtype=complex)
    p1 = np.array([np.cos(phi), -np.sin(phi)], dtype=complex)
    return p0, p1


def _clone_from_circuit(circuit: ParamCircuit, task: CloneTask,
                        psi: np.ndarray, register: int) -> np.ndarray:
    amps = circuit.run_batch(task.prepare_batch([psi]))
    rho = np.outer(amps[0], amps[0].conj())
    return partial_trace_raw(rho, [register], task.n_qubits)


def mayers_attack(cloner: str | tuple = "ideal", phi: float = np.pi / 18,
                  detection_rounded: bool = True) -> AttackReport:
    """Bias of the cloning attack on the 2-state coin-flipping protocol.

    Discriminates rho1 = |phi0><phi0| x |phi1><phi1| against
    rho2 = |phi1><phi1| x rho_c0 (the kept pair under the two hypotheses,
    with rho_c0 the cloner's output clone of phi0), then multiplies the
    guess probability by the probability of passing the verifier's test.
    `detection_rounded` uses the conservative 1% detection estimate for the
    single-copy composition; otherwise the exact 1 - F_L is used.
    """
    p0, p1 = _fixed_overlap_states(phi)
    if cloner == "ideal":
        rho_c0 = fixed_overlap_clone_state(phi, 0)
        f_l = float(np.real(p0.conj() @ rho_c0 @ p0))
        label = "ideal"
    else:
        circuit, task = cloner
        rho_c0 = _clone_from_circuit(circuit, task, p0,
                                     task.output_registers[0])
        f_l = float(np.real(p0.conj() @ rho_c0 @ p0))
        label = "circuit"
    rho1 = np.kron(np.outer(p0, p0.conj()), np.outer(p1, p1.conj()))
    rho2 = np.kron(np.outer(p1, p1.conj()), rho_c0)
    p_guess = helstrom(rho1, rho2)
    p_detect_exact = 1.0 - f_l
    if detection_rounded:
        # the single-copy analysis bounds detection by 1%
        p_pass = 0.99
    else:
        p_pass = 1.0 - p_detect_exact
    p_success = p_guess * p_pass
    return AttackReport(
        protocol="coin-flip-2state",
        p_guess=float(p_guess),
        p_detect=float(p_detect_exact),
        p_success=float(p_success),
        bias=float(p_success - 0.5),
        inputs={"cloner": label, "phi": phi, "F_L": f_l},
    )


def mayers_guess_n(p_fail: float, n: int) -> float:
    """Majority-vote guess probability over n copies (ties guess at random)."""
    if not 0 <= p_fail <= 1:
        raise ValueError("p_fail must be a probability")
    from math import comb
    p_ok = 1.0 - p_fail
    if n % 2 == 1:
        return float(sum(comb(n, k) * p_ok**k * p_fail**(n - k)
                         for k in range((n + 1) // 2, n + 1)))
    total = sum(comb(n, k) * p_ok**k * p_fail**(n - k)
                for k in range(n // 2 + 1, n + 1))
    total += 0.5 * comb(n, n // 2) * p_ok**(n // 2) * p_fail**(n // 2)
    return float(total)


# ---------------------------------------------------------------------------
# 4-state coin-flipping attacks (phi = pi/8)


def aharonov_attack1(phi: float = np.pi / 8,
                     cloner: str | tuple = "ideal") -> AttackReport:
    """Global attack: project the cloner's 2-qubit output onto the symmetric
    pair {|v>, |v_perp>}; ideally P = 1/2 + sin(2 phi)/2.

    For a trained circuit the probability is computed from the measured
    overlap of the two global output states.
    """
    if cloner == "ideal":
        overlap = float(np.sin(2 * phi))
        label = "ideal"
    else:
        circuit, task = cloner
        c, s = np.cos(phi), np.sin(phi)
        psi00 = np.array([c, s], dtype=complex)
        psi11 = np.array([s, -c], dtype=complex)
        amps = circuit.run_batch(task.prepare_batch([psi00, psi11]))
        n, outs = task.n_qubits, task.output_registers
        rhos = []
        for k in range(2):
            rho = np.outer(amps[k], amps[k].conj())
            rhos.append(partial_trace_raw(rho, sorted(outs), n))
        # |<psi00_out|psi11_out>| from the (nearly pure) global clone states
        overlap = float(np.sqrt(max(np.real(np.trace(rhos[0] @ rhos[1])), 0.0)))
        label = "circuit"
    p = 0.5 + 0.5 * overlap
    return AttackReport(
        protocol="coin-flip-4state-I",
        p_guess=float(p),
        p_detect=0.0,
        p_success=float(p),
        bias=float(p - 0.5),
        inputs={"cloner": label, "phi": phi},
    )


def four_state_shrinking_factors(phi: float) -> tuple[float, float]:
    s2, c2 = np.sin(2 * phi), np.cos(2 * phi)
    denom = np.sqrt(s2**4 + c2**4)
    return float(s2**2 / denom), float(c2**2 / denom)


def aharonov_attack2_exact(phi: float = np.pi / 8) -> AttackReport:
    """Local attack with the 4-state cloner, exact: Bloch vectors shrink by
    (eta_x, eta_z) and the ensembles' Helstrom value is
    1/2 + eta_z cos(2 phi)/2. The trace-norm route is cross-checked against
    the Bloch-algebra value."""
    eta_x, eta_z = four_state_shrinking_factors(phi)
    s2, c2 = np.sin(2 * phi), np.cos(2 * phi)
    bloch = {
        (0, 0): (s2, c2), (0, 1): (-s2, -c2),
        (1, 0): (-s2, c2), (1, 1): (s2, -c2),
    }
    clones = {k: 0.5 * (np.eye(2) + eta_x * v[0] * _X + eta_z * v[1] * _Z)
              for k, v in bloch.items()}
    rho_a0 = 0.5 * (clones[(0, 0)] + clones[(1, 0)])
    rho_a1 = 0.5 * (clones[(0, 1)] + clones[(1, 1)])
    p_trace = helstrom(rho_a0, rho_a1)
    p_bloch = 0.5 + 0.5 * eta_z * c2
    if abs(p_trace - p_bloch) > 1e-12:
        raise AssertionError("trace-norm and Bloch routes disagree")
    return AttackReport(
        protocol="coin-flip-4state-II",
        p_guess=float(p_bloch),
        p_detect=0.0,
        p_success=float(p_bloch),
        bias=float(p_bloch - 0.5),
        inputs={"phi": phi, "eta_x": eta_x, "eta_z": eta_z},
    )


def aharonov_attack2_bounds(f_l: float, s: float) -> tuple[float, float]:
    """Bounds on the local-attack discrimination probability from the clone
    fidelity F_L of a 2-state fixed-overlap cloner: the cross fidelity is
    F_L + (s^2 - 1) sqrt((1 - s^2)/(1 - s^4))."""
    cross = f_l + (s**2 - 1.0) * np.sqrt((1.0 - s**2) / (1.0 - s**4))
    cross = min(max(cross, 0.0), 1.0)
    lower = 0.5 + 0.5 * (1.0 - np.sqrt(cross))
    upper = 0.5 + 0.5 * np.sqrt(1.0 - cross)
    return float(lower), float(upper)


# ---------------------------------------------------------------------------
# BB84 critical error rate


def _bb84_states() -> dict:
    inv = 1 / np.sqrt(2)
    return {
        "+": np.array([1, 1], dtype=complex) * inv,
        "-": np.array([1, -1], dtype=complex) * inv,
        "+i": np.array([1, 1j], dtype=complex) * inv,
        "-i": np.array([1, -1j], dtype=complex) * inv,
    }


def qkd_critical_error(cloner: str | tuple = "ideal") -> QkdReport:
    """Critical BB84 error rate for a phase-covariant cloning attack.

    Eve clones each transmitted state and keeps one clone; her Holevo
    information about the sifted key bit is computed per basis (X and Y) on
    either output register, and the smallest chi fixes the key-rate zero
    1 - H(D) - chi = 0, solved by bisection on [0, 1/2].
    """
    if cloner == "ideal":
        circuit = build_ideal_cloner("phase_covariant")
        task = CloneTask(1, 2, 3, (0,), (1, 2),
                         StateFamily("phase_covariant_xy"))
    else:
        circuit, task = cloner
    states = _bb84_states()
    n = task.n_qubits
    clones: dict = {}
    for key, psi in states.items():
        amps = circuit.run_batch(task.prepare_batch([psi]))
        rho = np.outer(amps[0], amps[0].conj())
        clones[key] = {
            reg: partial_trace_raw(rho, [reg], n)
            for reg in task.output_registers
        }
    chi_values = {}
    for reg in task.output_registers:
        for basis, (k0, k1) in {"X": ("+", "-"), "Y": ("+i", "-i")}.items():
            rho0 = clones[k0][reg]
            rho1 = clones[k1][reg]
            mix = 0.5 * (rho0 + rho1)
            chi_values[f"reg{reg}/{basis}"] = holevo_quantity(mix, rho0, rho1)
    chi_min = min(chi_values.values())
    if chi_min <= 1e-12:
        d_crit = 0.5
    else:
        d_crit = float(brentq(lambda d: 1.0 - binary_entropy(d) - chi_min,
                              1e-12, 0.5 - 1e-12, xtol=1e-10))
    residual = abs(1.0 - binary_entropy(d_crit) - chi_min)
    return QkdReport(chi_values, float(chi_min), d_crit, float(residual))
