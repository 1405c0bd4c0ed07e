import numpy as np
import pytest

from vqlab import clone as cn
from vqlab.circuits import (StructureSearchConfig, build_hardware_efficient,
                            build_ideal_cloner)
from vqlab.rng import derive

HAAR = cn.StateFamily("haar")
PC = cn.StateFamily("phase_covariant_xy")
TASK_IDEAL = cn.CloneTask(1, 2, 3, (0,), (1, 2), HAAR)
TASK_PC = cn.CloneTask(1, 2, 3, (0,), (1, 2), PC)


def random_he(seed, n=3, layers=2):
    rng = derive(seed, "test/clone_he")
    he = build_hardware_efficient(n, layers, [(i, i + 1) for i in range(n - 1)])
    return he.with_theta(rng.uniform(0, 2 * np.pi, he.n_params))


# ---------------------------------------------------------------------------
# analytic fidelities


def test_universal_values():
    assert cn.analytic_fidelity("universal_local", 1, 2) == pytest.approx(5 / 6)
    assert cn.analytic_fidelity("universal_global", 1, 2) == pytest.approx(2 / 3)


def test_phase_covariant_values():
    assert cn.analytic_fidelity("phase_covariant_local") == pytest.approx(
        0.5 * (1 + 1 / np.sqrt(2)))
    assert cn.analytic_fidelity("phase_covariant_global") == pytest.approx(
        (1 + np.sqrt(2)) ** 2 / 8)


def test_fixed_overlap_values():
    s = np.cos(np.pi / 9)
    assert cn.analytic_fidelity("fixed_overlap_local", s=s) == pytest.approx(
        0.9975, abs=2e-4)
    # minimum over s is at s = 1/2
    assert cn.analytic_fidelity("fixed_overlap_local", s=0.5) == pytest.approx(
        0.987, abs=5e-4)
    grid = np.linspace(0.05, 0.95, 19)
    vals = [cn.analytic_fidelity("fixed_overlap_local", s=float(v))
            for v in grid]
    assert min(vals) == pytest.approx(
        cn.analytic_fidelity("fixed_overlap_local", s=0.5), abs=1e-3)
    assert cn.analytic_fidelity("fixed_overlap_global", 1, 2,
                                s=np.cos(np.pi / 4)) == pytest.approx(0.983,
                                                                      abs=1e-3)


def test_unknown_fidelity_kind():
    with pytest.raises(ValueError):
        cn.analytic_fidelity("wat")


# ---------------------------------------------------------------------------
# ideal circuits


def test_ideal_universal_cloner_state_independent_five_sixths():
    circ = build_ideal_cloner("universal")
    states = HAAR.draw(256, seed=3)
    ev = cn.evaluate_cloner(TASK_IDEAL, circ, states)
    assert np.allclose(ev.mean_local, 5 / 6, atol=1e-3)
    assert ev.local.std() <= 1e-3
    assert ev.mean_global == pytest.approx(2 / 3, abs=1e-9)


def test_ideal_phase_covariant_local_and_global():
    circ = build_ideal_cloner("phase_covariant")
    states = [np.array([1, np.exp(1j * e)]) / np.sqrt(2)
              for e in np.linspace(0, 2 * np.pi, 64, endpoint=False)]
    ev = cn.evaluate_cloner(TASK_PC, circ, states)
    assert np.allclose(ev.mean_local, 0.8536, atol=1e-3)
    assert ev.mean_global == pytest.approx(0.7286, abs=1e-3)


def test_fixed_overlap_numeric_cloner_matches_closed_form():
    for phi in (np.pi / 18, np.pi / 8, 0.4):
        s = float(np.cos(2 * phi))
        rc = cn.fixed_overlap_clone_state(phi)
        p0 = np.array([np.cos(phi), np.sin(phi)])
        got = float(p0 @ rc.real @ p0)
        want = cn.analytic_fidelity("fixed_overlap_local", s=s)
        assert abs(got - want) < 1e-9


def test_fixed_overlap_global_cloner_matches_closed_form():
    phi = np.pi / 8
    s = float(np.cos(2 * phi))
    a0, _ = cn.optimal_fixed_overlap_pair(phi, criterion="global")
    p0 = np.array([np.cos(phi), np.sin(phi)])
    got = float((np.kron(p0, p0) @ a0) ** 2)
    want = cn.analytic_fidelity("fixed_overlap_global", 1, 2, s=s)
    assert abs(got - want) < 1e-9


# ---------------------------------------------------------------------------
# costs


def test_trivial_routing_cloner_cost():
    # identity circuit: clone registers hold |psi> and |0>; the local cost
    # equals 1 - (1 + E|<psi|0>|^2)/2 averaged over the family
    from vqlab.circuits import ParamCircuit
    circ = ParamCircuit(3, [], [], np.zeros(0))
    task = cn.CloneTask(1, 2, 3, (0,), (0, 1), HAAR)
    states = HAAR.draw(400, seed=5)
    cost = cn.clone_cost(task, circ, "local", states=states)
    blank_f = np.mean([abs(s[0]) ** 2 for s in states])
    assert cost == pytest.approx(1 - (1 + blank_f) / 2, abs=1e-12)


def test_ideal_phase_covariant_local_cost():
    circ = build_ideal_cloner("phase_covariant")
    states = PC.draw(512, seed=6)
    cost = cn.clone_cost(TASK_PC, circ, "local", states=states)
    assert cost == pytest.approx(1 - 0.8536, abs=1e-3)


def test_asymmetric_cost_symmetric_point_matches_squared_target():
    fb, fe = cn.asym_tradeoff(1 / np.sqrt(3))
    assert fb == pytest.approx(5 / 6, abs=1e-12)
    assert fe == pytest.approx(5 / 6, abs=1e-12)


def test_asym_tradeoff_endpoints_and_saturation():
    fb, fe = cn.asym_tradeoff(0.0)
    assert fb == 1.0 and fe == pytest.approx(0.5)
    for p in np.linspace(0.0, 1.0, 101):
        fb, fe = cn.asym_tradeoff(float(p))
        lhs = np.sqrt((1 - fb) * (1 - fe))
        rhs = 0.5 - (1 - fb) - (1 - fe)
        assert abs(lhs - rhs) < 1e-10


def test_gradients_match_finite_differences_all_costs():
    rng = derive(7, "test/clone_fd")
    states = PC.draw(6, seed=8)
    h = 1e-5
    for trial in range(4):
        circ = random_he(trial)
        theta = np.array(circ.theta)
        for which in ("local", "squared", "global", "asymmetric"):
            task = cn.CloneTask(1, 2, 3, (0,), (1, 2), PC,
                                asymmetry_p=0.6 if which == "asymmetric" else None)
            cg = cn.clone_cost_and_grad(task, circ, which, states=states)
            _, grad = cg(theta)
            for k in range(0, len(theta), 3):
                tp, tm = theta.copy(), theta.copy()
                tp[k] += h
                tm[k] -= h
                fd = (cg(tp)[0] - cg(tm)[0]) / (2 * h)
                assert abs(grad[k] - fd) < 1e-5, which


def test_gradient_near_zero_at_ideal_circuit():
    # append parameterized rotations at zero to the ideal cloner and check
    # the local-cost gradient is tiny there
    from vqlab.circuits import ParamCircuit
    from vqlab.simcore import HALF, Gate
    base = build_ideal_cloner("phase_covariant")
    gates = list(base.gates) + [Gate("Ry", (q,), 0.0, HALF) for q in range(3)]
    slots = [None] * len(base.gates) + [0, 1, 2]
    circ = ParamCircuit(3, gates, slots, np.zeros(3))
    states = PC.draw(128, seed=9)
    cg = cn.clone_cost_and_grad(TASK_PC, circ, "local", states=states)
    _, grad = cg(np.zeros(3))
    assert np.max(np.abs(grad)) <= 1e-3


def test_squared_cost_symmetric_output_no_difference_term():
    # for a circuit producing symmetric clones the pairwise difference term
    # contributes nothing: squared cost reduces to sum_j (1 - F_j)^2
    circ = build_ideal_cloner("universal")
    states = HAAR.draw(64, seed=10)
    ev = cn.evaluate_cloner(TASK_IDEAL, circ, states)
    per_state = np.sum((1 - ev.local) ** 2, axis=1)
    want = float(np.mean(per_state))
    got = cn.clone_cost(TASK_IDEAL, circ, "squared", states=states)
    assert got == pytest.approx(want, abs=1e-9)


# ---------------------------------------------------------------------------
# orderings, faithfulness, estimation


def test_cost_ordering_random_circuits():
    for seed in range(100):
        circ = random_he(seed)
        task = cn.CloneTask(1, 2, 3, (0,), (1, 2), PC)
        res = cn.cost_ordering_check(task, circ, k_states=10, seed=seed)
        assert res["holds"]
    # 1 -> 3 on 4 qubits
    fam = cn.StateFamily("four_state", np.pi / 8)
    for seed in range(100):
        circ = random_he(seed, n=4)
        task = cn.CloneTask(1, 3, 4, (0,), (0, 1, 2), fam)
        res = cn.cost_ordering_check(task, circ, k_states=8, seed=seed)
        assert res["holds"]


def test_identity_circuit_ordering():
    from vqlab.circuits import ParamCircuit
    circ = ParamCircuit(3, [], [], np.zeros(0))
    res = cn.cost_ordering_check(cn.CloneTask(1, 2, 3, (0,), (0, 1), HAAR),
                                 circ, seed=0)
    assert res["holds"]


def test_universal_global_optimum_attains_local_optimum():
    circ = build_ideal_cloner("universal")
    states = HAAR.draw(128, seed=11)
    ev = cn.evaluate_cloner(TASK_IDEAL, circ, states)
    assert ev.mean_global == pytest.approx(2 / 3, abs=1e-9)
    assert np.allclose(ev.mean_local, 5 / 6, atol=1e-9)


def test_faithfulness_at_ideal_circuits():
    rep = cn.faithfulness_check(TASK_PC, build_ideal_cloner("phase_covariant"),
                                "squared", k_states=16, seed=1)
    assert rep.satisfied
    assert abs(rep.epsilon) < 1e-9
    assert rep.max_tr < 1e-6
    rep_u = cn.faithfulness_check(TASK_IDEAL, build_ideal_cloner("universal"),
                                  "local", k_states=16, seed=1)
    assert rep_u.satisfied


def _perturbed_ideal(rng, scale):
    from vqlab.circuits import ParamCircuit
    from vqlab.simcore import HALF, Gate
    base = build_ideal_cloner("phase_covariant")
    eps_angles = rng.normal(scale=scale, size=3)
    gates = list(base.gates) + [Gate("Ry", (q,), float(a), HALF)
                                for q, a in enumerate(eps_angles)]
    return ParamCircuit(3, gates, [None] * len(gates), np.zeros(0))


def test_trace_faithfulness_bound_never_violated_near_optimum():
    rng = derive(12, "test/faith")
    for _ in range(200):
        circ = _perturbed_ideal(rng, float(rng.uniform(0.01, 0.3)))
        rep = cn.faithfulness_check(TASK_PC, circ, "squared", k_states=16,
                                    seed=13)
        assert rep.max_tr <= rep.tr_bound + 1e-6


@pytest.mark.xfail(
    strict=True,
    reason="the linear Bures-angle weak-faithfulness bound fails for "
    "perturbations with components invisible to the family's fidelity "
    "observables (state deviation ~ sqrt(eps) or worse while the bound "
    "shrinks linearly)")
def test_bures_faithfulness_bound_generic_perturbations():
    rng = derive(12, "test/faith_ba")
    ok = 0
    for _ in range(100):
        circ = _perturbed_ideal(rng, float(rng.uniform(0.01, 0.3)))
        rep = cn.faithfulness_check(TASK_PC, circ, "squared", k_states=16,
                                    seed=13)
        ok += rep.max_ba <= rep.ba_bound + 1e-6
    assert ok == 100


def test_swap_sample_count():
    assert cn.swap_test_samples(0.05, 0.05) == 1476


def test_swap_cost_estimate_concentrates():
    circ = build_ideal_cloner("phase_covariant")
    exact = cn.clone_cost(TASK_PC, circ, "local",
                          states=PC.draw(30, seed=14))
    eps, delta = 0.05, 0.05
    total = cn.swap_test_samples(eps, delta)
    k_states = 30
    shots = max(1, total // k_states)
    hits = 0
    reps = 200
    for rep in range(reps):
        est = cn.swap_cost_estimate(TASK_PC, circ, "local", shots, k_states,
                                    seed=rep)
        hits += abs(est - exact) <= eps
    assert hits / reps >= 1 - delta


def test_swap_cost_infinite_shot_limit():
    circ = build_ideal_cloner("phase_covariant")
    states = PC.draw(16, seed=15)
    exact = cn.clone_cost(TASK_PC, circ, "local", states=states)
    est = cn.swap_cost_estimate(TASK_PC, circ, "local", 2_000_000, 16, seed=3)
    assert abs(est - exact) < 2e-3


def test_exhaustive_family_equals_monte_carlo_limit():
    fam = cn.StateFamily("fixed_overlap", np.pi / 18)
    task = cn.CloneTask(1, 2, 3, (0,), (1, 2), fam)
    circ = build_ideal_cloner("universal")
    states_exh = fam.exhaustive()
    ev_exh = cn.evaluate_cloner(task, circ, states_exh)
    rng = derive(16, "test/mc")
    sampled = [fam.sampler(rng) for _ in range(4000)]
    ev_mc = cn.evaluate_cloner(task, circ, sampled)
    assert abs(ev_exh.mean_local.mean() - ev_mc.mean_local.mean()) < 5e-3


def test_grad_variance_single_parameter_closed_form():
    # d<Z>/dtheta = -sin(theta): variance over uniform theta is 1/2
    from vqlab.circuits import ParamCircuit, shifted_thetas
    from vqlab.simcore import Gate, bits_matrix
    pc = ParamCircuit(1, [Gate("Ry", (0,), 0.0)], [0], np.zeros(1))
    rng = derive(17, "test/var1")
    grads = []
    signs = 1 - 2 * bits_matrix(1)[:, 0]
    for _ in range(4000):
        theta = rng.uniform(0, 2 * np.pi, 1)
        up, down, factor = shifted_thetas(pc, 0, theta)
        gu = float(pc.run(up).probabilities() @ signs)
        gd = float(pc.run(down).probabilities() @ signs)
        grads.append(factor * (gu - gd))
    assert np.var(grads) == pytest.approx(0.5, abs=0.03)


def test_grad_variance_probe_local_vs_global():
    res_l = cn.grad_variance_probe("local", [2, 3, 4], trials=40, seed=5)
    res_g = cn.grad_variance_probe("global", [2, 3, 4], trials=40, seed=5)
    # a power-law fit with modest exponent indicates polynomial (not
    # exponential) decay at these sizes
    assert res_l["exponent"] > -6.0
    assert res_g["variances"][4] < res_l["variances"][4]


# ---------------------------------------------------------------------------
# families and tasks


def test_fixed_overlap_family_overlap():
    for phi in (np.pi / 18, 7 * np.pi / 36, np.pi / 8):
        fam = cn.StateFamily("fixed_overlap", phi)
        a, b = fam.exhaustive()
        assert abs(np.vdot(a, b).real - np.sin(2 * phi)) < 1e-12
        assert abs(fam.overlap - np.sin(2 * phi)) < 1e-12


def test_optimal_clone_of_matches_closed_form_on_any_pair():
    fam = cn.StateFamily("fixed_overlap", 7 * np.pi / 36)  # s = cos(pi/9)
    a, b = fam.exhaustive()
    rc = cn.optimal_clone_of(a, b)
    want = cn.analytic_fidelity("fixed_overlap_local", s=fam.overlap)
    assert abs(float(np.real(a.conj() @ rc @ a)) - want) < 1e-9


def test_clone_task_validation():
    with pytest.raises(ValueError):
        cn.CloneTask(2, 2, 3, (0, 1), (0, 1), HAAR)
    with pytest.raises(ValueError):
        cn.CloneTask(1, 2, 3, (0,), (1, 1), HAAR)


def test_register_mismatch_rejected():
    circ = random_he(0, n=2)
    with pytest.raises(ValueError):
        cn.evaluate_cloner(TASK_IDEAL, circ, HAAR.draw(2, 0))


@pytest.mark.slow
def test_squared_cost_more_symmetric_than_local_in_2_to_4():
    """Training 2->4 cloning of the four-state family with the squared cost
    yields smaller clone-fidelity spread than the plain local cost (mean of
    the max pairwise |F_i - F_j| over 10 seeded runs; individual local runs
    occasionally land on the symmetric trivial-amplification point)."""
    from vqlab.circuits import adam_minimize
    fam = cn.StateFamily("four_state", np.pi / 8)
    task = cn.CloneTask(2, 4, 5, (0, 1), (0, 1, 2, 3), fam)
    states = fam.exhaustive()
    mean_asym = {}
    for which in ("local", "squared"):
        spreads = []
        for seed in range(10):
            rng = derive(seed, "test/2to4")
            he = build_hardware_efficient(5, 3, [(i, i + 1) for i in range(4)])
            cg = cn.clone_cost_and_grad(task, he, which, states=states)
            theta, _, _ = adam_minimize(
                cg, rng.uniform(0, 2 * np.pi, he.n_params), 0.05, 80)
            ev = cn.evaluate_cloner(task, he.with_theta(theta), states)
            f = ev.mean_local
            spreads.append(float(np.max(np.abs(f[:, None] - f[None, :]))))
        mean_asym[which] = float(np.mean(spreads))
    assert mean_asym["squared"] < mean_asym["local"]
