import numpy as np
import pytest

from vqlab import cryptattack as ca
from vqlab.circuits import build_ideal_cloner
from vqlab.clone import CloneTask, StateFamily
from vqlab.rng import derive


def rand_dm(rng, n=1):
    d = 2**n
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = a @ a.conj().T
    return m / np.trace(m).real


# ---------------------------------------------------------------------------
# Helstrom


def test_helstrom_identical_and_orthogonal():
    p0 = np.diag([1.0, 0.0])
    p1 = np.diag([0.0, 1.0])
    assert ca.helstrom(p0, p0) == pytest.approx(0.5)
    assert ca.helstrom(p0, p1) == pytest.approx(1.0)


def test_helstrom_symmetric_and_unitary_invariant():
    rng = derive(0, "test/helstrom")
    for _ in range(30):
        r1, r2 = rand_dm(rng, 2), rand_dm(rng, 2)
        assert abs(ca.helstrom(r1, r2) - ca.helstrom(r2, r1)) < 1e-10
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        q, _ = np.linalg.qr(a)
        conj = ca.helstrom(q @ r1 @ q.conj().T, q @ r2 @ q.conj().T)
        assert abs(conj - ca.helstrom(r1, r2)) < 1e-10


def test_helstrom_matches_eigenvalue_sum_oracle():
    rng = derive(1, "test/helstrom2")
    r1, r2 = rand_dm(rng), rand_dm(rng)
    eigs = np.linalg.eigvalsh(0.5 * r1 - 0.5 * r2)
    want = 0.5 + 0.5 * np.abs(eigs).sum()
    assert abs(ca.helstrom(r1, r2) - want) < 1e-12


# ---------------------------------------------------------------------------
# 2-state protocol attack


def test_mayers_attack_report_consistency():
    rep = ca.mayers_attack()
    assert rep.bias == pytest.approx(rep.p_success - 0.5)
    assert 0 <= rep.p_guess <= 1
    # exact cloner fidelity at s = cos(pi/9)
    assert rep.inputs["F_L"] == pytest.approx(0.99750, abs=2e-5)
    # the guess probability is capped by discriminating the kept pair with
    # everything retained: 1/2 + sqrt(1 - s^4)/2
    s = np.cos(np.pi / 9)
    cap = 0.5 + 0.5 * np.sqrt(1 - s**4)
    assert rep.p_guess <= cap + 1e-9


def test_mayers_attack_trivial_cloner_no_bias():
    # with a do-nothing report: random guessing has bias 0 by construction
    rep = ca.AttackReport("x", 0.5, 0.0, 0.5, 0.0, {})
    assert rep.bias == 0.0


def test_mayers_guess_n():
    assert ca.mayers_guess_n(0.214, 1) == pytest.approx(1 - 0.214)
    vals = [ca.mayers_guess_n(0.214, n) for n in range(1, 102)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    assert vals[-1] > 0.999


def test_mayers_guess_two_matches_enumeration():
    p_fail = 0.3
    # n=2: success if both right, tie (one right) guesses at random
    want = (1 - p_fail) ** 2 + 0.5 * 2 * (1 - p_fail) * p_fail
    assert ca.mayers_guess_n(p_fail, 2) == pytest.approx(want, abs=1e-12)


def test_mayers_attack_with_trained_circuit_interface():
    # the ideal 3-qubit cloning circuit is a valid "trained" cloner input
    fam = StateFamily("fixed_overlap", 7 * np.pi / 36)
    task = CloneTask(1, 2, 3, (0,), (1, 2), fam)
    circ = build_ideal_cloner("universal")
    rep = ca.mayers_attack(cloner=(circ, task))
    assert 0.5 <= rep.p_guess <= 1.0
    assert rep.inputs["cloner"] == "circuit"


# ---------------------------------------------------------------------------
# 4-state protocol attacks


def test_aharonov_attack1_values():
    rep = ca.aharonov_attack1()
    assert rep.p_success == pytest.approx(0.5 + 0.5 * np.sin(np.pi / 4))
    assert rep.bias == pytest.approx(0.353, abs=2e-3)
    # phi = pi/4: orthogonal-ish limit, perfect discrimination
    lim = ca.aharonov_attack1(np.pi / 4)
    assert lim.p_success == pytest.approx(1.0)


def test_aharonov_attack2_exact_values():
    rep = ca.aharonov_attack2_exact()
    assert rep.p_success == pytest.approx(0.75, abs=1e-12)
    assert rep.bias == pytest.approx(0.25, abs=1e-6)
    assert rep.inputs["eta_x"] == pytest.approx(1 / np.sqrt(2))
    # phi = pi/4 kills the z-component: no information
    rep2 = ca.aharonov_attack2_exact(np.pi / 4)
    assert rep2.p_success == pytest.approx(0.5, abs=1e-12)


def test_aharonov_attack2_trace_and_bloch_routes_agree():
    # the internal cross-check raises if the two disagree; exercise a few phi
    for phi in (np.pi / 8, np.pi / 6, 0.2):
        ca.aharonov_attack2_exact(phi)


def test_aharonov_attack2_bounds():
    lo, hi = ca.aharonov_attack2_bounds(0.989, 1 / np.sqrt(2))
    assert lo == pytest.approx(0.619, abs=2e-3)
    assert hi == pytest.approx(0.823, abs=2e-3)
    # degenerate orthogonal case: cross fidelity is F_L + (0-1)*1 -> bounds
    lo2, hi2 = ca.aharonov_attack2_bounds(1.0, 0.0)
    assert hi2 == pytest.approx(1.0)
    # the bounds bracket the exact 4-state attack value at the cloner's
    # operating point (F_L of the fixed-overlap cloner at s = 1/sqrt 2)
    exact = ca.aharonov_attack2_exact().p_success
    lo3, hi3 = ca.aharonov_attack2_bounds(0.989, 1 / np.sqrt(2))
    assert lo3 <= exact <= hi3


# ---------------------------------------------------------------------------
# QKD


def test_qkd_critical_error_ideal_cloner():
    rep = ca.qkd_critical_error()
    assert rep.d_crit == pytest.approx(0.146, abs=3e-3)
    assert rep.residual <= 1e-8
    # chi must be basis- and register-symmetric for the ideal cloner
    vals = list(rep.chi_values.values())
    assert max(vals) - min(vals) < 1e-9


def test_qkd_identity_eavesdropper_gives_half():
    # an "attack" that never touches the state leaves Eve with nothing:
    # chi = 0 and the solver returns D = 1/2
    from vqlab.circuits import ParamCircuit
    from vqlab.simcore import Gate
    fam = StateFamily("phase_covariant_xy")
    # identity circuit: Bob register = untouched input, Eve register = |0>
    circ = ParamCircuit(3, [], [], np.zeros(0))
    task = CloneTask(1, 2, 3, (0,), (0, 1), fam)
    rep = ca.qkd_critical_error((circ, task))
    assert rep.d_crit == pytest.approx(0.5)


def test_qkd_matches_one_minus_fidelity_anchor():
    # for the optimal phase-covariant attack D_crit equals 1 - F_L
    rep = ca.qkd_critical_error()
    assert rep.d_crit == pytest.approx(1 - 0.5 * (1 + 1 / np.sqrt(2)),
                                       abs=5e-4)
