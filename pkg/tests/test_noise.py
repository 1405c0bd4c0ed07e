import numpy as np
import pytest

from vqlab import noise as nz
from vqlab import simcore as sc

RNG = np.random.default_rng(0)


def rand_dm(rng, n=1):
    d = 2**n
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = a @ a.conj().T
    return sc.DensityMatrix(n, m / np.trace(m).real)


def kraus_oracle(rho, ops):
    return sum(k @ rho @ k.conj().T for k in ops)


def test_constructors_satisfy_completeness():
    rng = np.random.default_rng(1)
    for _ in range(200):
        p = float(rng.uniform(0, 1))
        for ch in (nz.bit_flip(p), nz.dephasing(p), nz.depolarizing(p),
                   nz.amplitude_damping(p)):
            total = sum(k.conj().T @ k for k in ch.kraus_ops)
            assert np.max(np.abs(total - np.eye(2))) < 1e-12
        probs = rng.dirichlet(np.ones(4))
        ch = nz.pauli_channel(*probs)
        total = sum(k.conj().T @ k for k in ch.kraus_ops)
        assert np.max(np.abs(total - np.eye(2))) < 1e-12


def test_invalid_probabilities_rejected():
    with pytest.raises(nz.ChannelError):
        nz.bit_flip(1.5)
    with pytest.raises(nz.ChannelError):
        nz.pauli_channel(0.5, 0.5, 0.5, 0.5)


def test_dephasing_scales_off_diagonals():
    rng = np.random.default_rng(2)
    for _ in range(20):
        p = float(rng.uniform(0, 1))
        rho = rand_dm(rng)
        out = nz.apply_channel(rho, nz.dephasing(p)).matrix
        assert abs(out[0, 0] - rho.matrix[0, 0]) < 1e-12
        assert abs(out[0, 1] - (1 - 2 * p) * rho.matrix[0, 1]) < 1e-12
        # direct Kraus-sum oracle
        want = kraus_oracle(rho.matrix, nz.dephasing(p).kraus_ops)
        assert np.max(np.abs(out - want)) < 1e-12


def test_amplitude_damping_full_strength_fixed_point():
    rng = np.random.default_rng(3)
    for _ in range(10):
        out = nz.apply_channel(rand_dm(rng), nz.amplitude_damping(1.0)).matrix
        assert np.allclose(out, np.diag([1.0, 0.0]), atol=1e-12)


def test_depolarizing_full_strength_maximally_mixes():
    rng = np.random.default_rng(4)
    out = nz.apply_channel(rand_dm(rng), nz.depolarizing(1.0)).matrix
    assert np.allclose(out, np.eye(2) / 2, atol=1e-12)


def test_identity_channel_is_identity():
    rng = np.random.default_rng(5)
    rho = rand_dm(rng)
    ch = nz.pauli_channel(1, 0, 0, 0)
    assert np.allclose(nz.apply_channel(rho, ch).matrix, rho.matrix)


def test_bit_flip_half_on_zero_gives_mixed():
    rho = sc.DensityMatrix.zero(1)
    out = nz.apply_channel(rho, nz.bit_flip(0.5)).matrix
    assert np.allclose(out, np.eye(2) / 2, atol=1e-12)


def test_embedded_channel_matches_full_space_oracle():
    rng = np.random.default_rng(6)
    rho = rand_dm(rng, 3)
    p = 0.3
    ch = nz.amplitude_damping(p, qubit=1)
    got = nz.apply_channel(rho, ch).matrix
    eye = np.eye(2)
    full_ops = [np.kron(eye, np.kron(k, eye)) for k in ch.kraus_ops]
    want = kraus_oracle(rho.matrix, full_ops)
    assert np.max(np.abs(got - want)) < 1e-12


def test_global_depolarizing_endpoints():
    rng = np.random.default_rng(7)
    rho = rand_dm(rng, 2)
    assert np.allclose(nz.global_depolarizing(0.0).apply(rho).matrix,
                       rho.matrix)
    assert np.allclose(nz.global_depolarizing(1.0).apply(rho).matrix,
                       np.eye(4) / 4, atol=1e-12)


def test_global_depolarizing_interleaving_composition():
    # interleaving J unitaries with strengths p_i equals
    # prod(1-p_i) * ideal + (1 - prod(1-p_i)) * I/d
    rng = np.random.default_rng(8)
    n = 2
    d = 2**n
    for _ in range(20):
        rho = rand_dm(rng, n)
        ps = rng.uniform(0, 1, size=3)
        gates = [sc.Gate("Rx", (0,), float(rng.uniform(0, 2 * np.pi))),
                 sc.Gate("CZ", (0, 1)),
                 sc.Gate("Ry", (1,), float(rng.uniform(0, 2 * np.pi)))]
        noisy = rho
        ideal = rho
        for p, g in zip(ps, gates):
            noisy = sc.apply_gate(nz.global_depolarizing(p).apply(noisy), g)
            ideal = sc.apply_gate(ideal, g)
        survive = np.prod(1 - ps)
        want = survive * ideal.matrix + (1 - survive) * np.eye(d) / d
        assert np.max(np.abs(noisy.matrix - want)) < 1e-10


def test_dephasing_commutes_with_z_rotations():
    rng = np.random.default_rng(9)
    for _ in range(20):
        rho = rand_dm(rng)
        p = float(rng.uniform(0, 1))
        theta = float(rng.uniform(0, 2 * np.pi))
        rz = sc.Gate("Rz", (0,), theta)
        a = nz.apply_channel(sc.apply_gate(rho, rz), nz.dephasing(p))
        b = sc.apply_gate(nz.apply_channel(rho, nz.dephasing(p)), rz)
        assert np.max(np.abs(a.matrix - b.matrix)) < 1e-10


def test_pauli_with_zero_xy_equals_dephasing():
    rng = np.random.default_rng(10)
    for _ in range(20):
        p = float(rng.uniform(0, 1))
        rho = rand_dm(rng)
        a = nz.apply_channel(rho, nz.pauli_channel(1 - p, 0, 0, p))
        b = nz.apply_channel(rho, nz.dephasing(p))
        assert np.max(np.abs(a.matrix - b.matrix)) < 1e-12


def test_factorizable_channel_projection():
    # applying a product channel then projecting the classification qubit
    # agrees with applying only that qubit's factor before projecting
    rng = np.random.default_rng(11)
    proj = np.diag([1.0, 0.0]).astype(complex)
    full_proj = np.kron(np.eye(4), proj)  # qubit 0 is the LSB
    for _ in range(20):
        rho = rand_dm(rng, 3)
        ch_c = nz.amplitude_damping(float(rng.uniform(0, 1)), qubit=0)
        ch_rest = [nz.bit_flip(float(rng.uniform(0, 1)), qubit=1),
                   nz.depolarizing(float(rng.uniform(0, 1)), qubit=2)]
        both = nz.apply_channels(rho, [ch_c, *ch_rest]).matrix
        only_c = nz.apply_channel(rho, ch_c).matrix
        a = np.trace(full_proj @ both).real
        b = np.trace(full_proj @ only_c).real
        assert abs(a - b) < 1e-10


def test_noisy_povm():
    a = nz.AssignmentMatrix(0.9, 0.1, 0.1, 0.9)
    pi0, pi1 = nz.noisy_povm(a)
    assert np.allclose(pi0 + pi1, np.eye(2))
    rho = sc.DensityMatrix.zero(1)
    assert abs(np.trace(pi0 @ rho.matrix).real - 0.9) < 1e-12
    ident = nz.AssignmentMatrix(1, 0, 0, 1)
    pi0, pi1 = nz.noisy_povm(ident)
    assert np.allclose(pi0, np.diag([1, 0]))
    rng = np.random.default_rng(12)
    scrambled = nz.AssignmentMatrix(0.5, 0.5, 0.5, 0.5)
    pi0, _ = nz.noisy_povm(scrambled)
    for _ in range(10):
        rho = rand_dm(rng)
        assert abs(np.trace(pi0 @ rho.matrix).real - 0.5) < 1e-12


def test_assignment_matrix_validation():
    with pytest.raises(nz.ChannelError):
        nz.AssignmentMatrix(0.9, 0.1, 0.2, 0.9)


def test_channel_spec_parsing():
    ch = nz.parse_channel_spec("dephasing(p=0.25)")
    assert "dephasing" in ch.label and ch.acting_qubits == (0,)
    ch = nz.parse_channel_spec("amplitude_damping(p=0.4,qubits=[2])")
    assert ch.acting_qubits == (2,)
    gd = nz.parse_channel_spec("global_depolarizing(p=0.3)")
    assert isinstance(gd, nz.GlobalDepolarizing)
    ch = nz.parse_channel_spec("pauli(pI=0.7,pX=0.2,pY=0.1)")
    assert len(ch.kraus_ops) == 3
    with pytest.raises(nz.ChannelError):
        nz.parse_channel_spec("wobble(p=0.1)")
