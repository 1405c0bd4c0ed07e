import numpy as np
import pytest

from vqlab import born as bn
from vqlab import metrics as mx
from vqlab.circuits import (build_hardware_efficient, build_qcibm,
                            iqp_final_angles, qaoa_final_angles,
                            qcibm_couplings)
from vqlab.rng import derive


def make_bm(n, seed, final="qaoa"):
    couplings = qcibm_couplings(n)
    rng = derive(seed, "test/bm_init")
    angles = qaoa_final_angles() if final == "qaoa" else iqp_final_angles()
    circ = build_qcibm(n, couplings, rng.uniform(0, 2 * np.pi, len(couplings)),
                       angles)
    return bn.BornMachine(circ, seed)


TOY, TOY_EXACT = bn.gen_toy_data(3, 2, 0.8, 500, seed=7)
TRAIN = mx.Pmf.from_samples(TOY.samples[:400], 3)
TEST = mx.Pmf.from_samples(TOY.samples[400:], 3)


# ---------------------------------------------------------------------------
# sampling and pmfs


def test_zero_parameter_qcibm_is_uniform():
    couplings = qcibm_couplings(3)
    circ = build_qcibm(3, couplings, np.zeros(len(couplings)),
                       qaoa_final_angles())
    pmf = bn.BornMachine(circ, 0).exact_pmf()
    assert np.allclose(pmf.to_dense(), 1 / 8, atol=1e-12)


def test_empirical_matches_exact_pmf():
    bm = make_bm(3, seed=1)
    exact = bm.exact_pmf()
    emp = bn.born_sample(bm, 100000)
    assert mx.tv(exact, emp) <= 0.02


def test_weak_compile_target_matches_dense_oracle():
    import scipy.linalg as sla
    target, alpha = bn.gen_weak_compile_target(2, seed=3)
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    eye, z = np.eye(2), np.diag([1, -1])
    x = np.array([[0, 1], [1, 0]])
    u = np.kron(h, h)
    gens = [np.kron(eye, z), np.kron(z, eye), np.kron(z, z)]
    ham = sum(a * g for a, g in zip(alpha, gens))
    u = sla.expm(1j * ham) @ u
    a = np.pi / (2 * np.sqrt(2))
    uf = sla.expm(1j * (a * x + a * z))
    u = np.kron(uf, uf) @ u
    want = np.abs(u[:, 0]) ** 2
    assert np.max(np.abs(target.to_dense() - want)) < 1e-12


# ---------------------------------------------------------------------------
# toy data


def test_toy_single_mode_sharp_limit():
    ds, pmf = bn.gen_toy_data(3, 1, 0.999, 10, seed=0)
    assert pmf.to_dense().max() > 0.99
    assert np.argmax(pmf.to_dense()) == ds.modes[0]


def test_toy_pmf_normalized_and_sampling_concentrates():
    ds, pmf = bn.gen_toy_data(3, 2, 0.8, 10000, seed=5)
    assert abs(pmf.to_dense().sum() - 1) < 1e-12
    emp = mx.Pmf.from_samples(ds.samples, 3)
    assert mx.tv(emp, pmf) <= 0.03


def test_toy_data_validation():
    with pytest.raises(ValueError):
        bn.gen_toy_data(3, 0, 0.8, 10)
    with pytest.raises(ValueError):
        bn.gen_toy_data(3, 1, 1.5, 10)


# ---------------------------------------------------------------------------
# costs and gradients (exact mode)


def cost_specs(n):
    return [
        bn.CostSpec("mmd", kernel=mx.gaussian_mixture_kernel(n)),
        bn.CostSpec("kl"),
        bn.CostSpec("stein", kernel=mx.exp_hamming_kernel(n), score="exact"),
        bn.CostSpec("sinkhorn", epsilon=0.1),
    ]


def test_costs_faithful_at_self():
    bm = make_bm(2, seed=2)
    p = bm.exact_pmf()
    for spec in cost_specs(2):
        if spec.kind == "kl":
            continue
        cost, _ = bn.cost_and_grad(bm, p, spec)
        assert abs(cost) <= 1e-6, spec.kind


def test_exact_gradients_match_finite_differences():
    bm = make_bm(3, seed=3)
    theta0 = np.array(bm.circuit.theta)
    h = 1e-5
    rng = derive(4, "test/fd")
    for spec in cost_specs(3):
        for _ in range(3):
            theta = theta0 + rng.normal(scale=0.3, size=len(theta0))
            _, grad = bn.cost_and_grad(bm, TRAIN, spec, theta)
            for k in range(0, len(theta), 2):
                tp, tm = theta.copy(), theta.copy()
                tp[k] += h
                tm[k] -= h
                cp, _ = bn.cost_and_grad(bm, TRAIN, spec, tp)
                cm, _ = bn.cost_and_grad(bm, TRAIN, spec, tm)
                assert abs(grad[k] - (cp - cm) / (2 * h)) < 1e-5, spec.kind


def test_kl_flags_zero_model_probability():
    # a circuit with exact zeros on the data support: |000> state
    from vqlab.circuits import ParamCircuit
    circ = ParamCircuit(2, [], [], np.zeros(0))
    bm = bn.BornMachine(circ, 0)
    data = mx.Pmf.dense(np.array([0.0, 1.0, 0.0, 0.0]), 2)
    with pytest.raises(bn.InfiniteCost):
        bn.cost_and_grad(bm, data, bn.CostSpec("kl"))


def test_mmd_gradient_small_at_match():
    bm = make_bm(2, seed=5)
    p = bm.exact_pmf()
    spec = bn.CostSpec("mmd", kernel=mx.gaussian_mixture_kernel(2))
    cost, grad = bn.cost_and_grad(bm, p, spec)
    assert abs(cost) < 1e-12
    assert np.max(np.abs(grad)) < 1e-9


def test_sampled_mmd_gradient_tracks_exact():
    bm = make_bm(2, seed=6)
    spec = bn.CostSpec("mmd", kernel=mx.gaussian_mixture_kernel(2),
                       batch_model=4000, batch_data=400)
    rng = derive(7, "test/sampled")
    data_samples = TOY_EXACT.sample(4000, rng)
    data2 = mx.Pmf.from_samples(data_samples, 3)
    # compare on a 2-bit problem: rebuild toy data at n=2
    ds2, exact2 = bn.gen_toy_data(2, 1, 0.8, 4000, seed=8)
    train2 = mx.Pmf.from_samples(ds2.samples, 2)
    exact_cost, exact_grad = bn.cost_and_grad(bm, train2, spec)
    costs, grads = [], []
    for rep in range(5):
        c, g = bn.cost_and_grad_sampled(bm, ds2.samples, spec,
                                        derive(rep, "t"), bm.circuit.theta)
        costs.append(c)
        grads.append(g)
    assert abs(np.mean(costs) - exact_cost) < 0.02
    assert np.max(np.abs(np.mean(grads, axis=0) - exact_grad)) < 0.05


# ---------------------------------------------------------------------------
# training


def test_zero_epoch_training_returns_initial_state():
    bm = make_bm(2, seed=9)
    theta0 = np.array(bm.circuit.theta)
    trace = bn.train_born(bm, TRAIN, bn.CostSpec("sinkhorn"), epochs=0)
    assert np.array_equal(trace.final_theta, theta0)
    assert trace.records == []


def test_training_reduces_tv_and_is_reproducible():
    def run():
        bm = make_bm(3, seed=10)
        return bn.train_born(bm, TRAIN, bn.CostSpec("sinkhorn", epsilon=0.1),
                             epochs=60, eta_init=0.05, seed=10,
                             data_test=TEST, exact_data=TOY_EXACT)

    t1, t2 = run(), run()
    assert t1.digest() == t2.digest()
    assert np.array_equal(t1.final_theta, t2.final_theta)
    assert t1.final_tv() < t1.records[0]["tv"]


def test_kl_training_satisfies_pinsker_every_epoch():
    bm = make_bm(3, seed=11)
    trace = bn.train_born(bm, TRAIN, bn.CostSpec("kl"), epochs=40,
                          eta_init=0.05, seed=11, exact_data=None)
    for rec in trace.records:
        kl_nats = rec["cost_train"] * np.log(2.0)  # cost column is in bits
        assert rec["tv"] <= np.sqrt(kl_nats / 2) + 1e-9


def test_mmd_training_converges_in_trend():
    bm = make_bm(3, seed=12)
    spec = bn.CostSpec("mmd", kernel=mx.gaussian_mixture_kernel(3))
    trace = bn.train_born(bm, TRAIN, spec, epochs=80, eta_init=0.05, seed=12)
    costs = [r["cost_train"] for r in trace.records]
    assert np.mean(costs[-10:]) < np.mean(costs[:10])


def test_stein_identity_score_approaches_exact_score_training_signal():
    # median |SD_identity - SD_exact| decreases with the data sample count
    rng = derive(13, "test/sdconv")
    base = mx.exp_hamming_kernel(3)
    bm = make_bm(3, seed=13)
    p = bm.exact_pmf()
    errs = []
    for m in (100, 1000, 10000):
        trials = []
        for rep in range(5):
            samples = TOY_EXACT.sample(m, rng)
            emp = mx.Pmf.from_samples(samples, 3)
            spec_id = bn.CostSpec("stein", kernel=base, score="identity",
                                  score_eta=1e-3)
            spec_ex = bn.CostSpec("stein", kernel=base, score="exact")
            c_id, _ = bn.cost_and_grad(bm, emp, spec_id)
            # exact score of the true data distribution
            c_ex, _ = bn.cost_and_grad(bm, TOY_EXACT, spec_ex)
            trials.append(abs(c_id - c_ex))
        errs.append(np.median(trials))
    assert errs[2] < errs[0]


# ---------------------------------------------------------------------------
# RBM


def test_rbm_zero_parameters_uniform():
    rbm = bn.Rbm(np.zeros((3, 2)), np.zeros(3), np.zeros(2))
    assert np.allclose(rbm.exact_pmf().to_dense(), 1 / 8, atol=1e-12)


def test_rbm_gradient_matches_finite_difference():
    rbm = bn.Rbm.random(3, 2, seed=3, train_weights=True)
    rbm.bias_v = np.array([0.1, -0.2, 0.3])
    rbm.bias_h = np.array([0.05, -0.1])
    g = rbm.grad(TRAIN)
    h = 1e-6

    def fd(setter, getter, shape):
        out = np.zeros(shape)
        it = np.nditer(out, flags=["multi_index"])
        while not it.finished:
            idx = it.multi_index
            arr = getter()
            arr[idx] += h
            cp = rbm.nll(TRAIN)
            arr[idx] -= 2 * h
            cm = rbm.nll(TRAIN)
            arr[idx] += h
            out[idx] = (cp - cm) / (2 * h)
            it.iternext()
        return out

    assert np.max(np.abs(g["bias_v"] - fd(None, lambda: rbm.bias_v, (3,)))) < 1e-6
    assert np.max(np.abs(g["bias_h"] - fd(None, lambda: rbm.bias_h, (2,)))) < 1e-6
    assert np.max(np.abs(g["weights"] - fd(None, lambda: rbm.weights, (3, 2)))) < 1e-6


def test_rbm_bias_only_training_matches_biased_coin():
    # single visible unit, no couplings: the trained marginal must match the
    # data mean (closed-form: p(+1) = sigmoid(-2 b_v) in spin convention)
    data = mx.Pmf.dense(np.array([0.73, 0.27]), 1)  # P(bit 0) = 0.73
    rbm = bn.Rbm(np.zeros((1, 1)), np.zeros(1), np.zeros(1))
    bn.train_rbm(rbm, data, epochs=400, eta_init=0.05)
    got = rbm.exact_pmf().to_dense()
    assert abs(got[0] - 0.73) < 0.01


def test_rbm_size_cap():
    with pytest.raises(ValueError):
        bn.Rbm(np.zeros((12, 12)), np.zeros(12), np.zeros(12))


def test_compare_born_vs_rbm_parameter_parity():
    ds4, exact4 = bn.gen_toy_data(4, 2, 0.75, 400, seed=20)
    train4 = mx.Pmf.from_samples(ds4.samples, 4)
    rows = bn.compare_born_vs_rbm(4, 2, train4, exact4, seeds=[0, 1],
                                  epochs=30)
    assert all(r["n_params"] == 8 for r in rows)
    assert all(np.isfinite(r["tv_born"]) and np.isfinite(r["tv_rbm"])
               for r in rows)


def test_born_vs_itself_tv_within_noise():
    bm = make_bm(3, seed=21)
    p = bm.exact_pmf()
    rng = derive(22, "test/selftv")
    emp = mx.Pmf.from_samples(p.sample(20000, rng), 3)
    assert mx.tv(p, emp) <= 0.03


# ---------------------------------------------------------------------------
# entanglement diagnostics


def test_ent_during_training_product_and_bell():
    from vqlab.circuits import ParamCircuit
    from vqlab.simcore import Gate
    prod = ParamCircuit(2, [Gate("Ry", (0,), 0.0)], [0], np.array([0.3]))
    bm = bn.BornMachine(prod, 0)
    res = bn.ent_during_training(bm, np.array([0.3]), np.array([1.0]))
    assert res["initial"] < 1e-10 and res["final"] < 1e-10
    bell = ParamCircuit(2, [Gate("H", (0,)), Gate("CNOT", (0, 1))],
                        [None, None], np.zeros(0))
    bm2 = bn.BornMachine(bell, 0)
    res2 = bn.ent_during_training(bm2, np.zeros(0), np.zeros(0))
    assert abs(res2["final"] - 1.0) < 1e-10


def test_ent_matches_metrics_oracle():
    from vqlab.metrics import meyer_wallach_q
    bm = make_bm(3, seed=23)
    res = bn.ent_during_training(bm, bm.circuit.theta, bm.circuit.theta)
    assert abs(res["initial"] - meyer_wallach_q(bm.circuit.run())) < 1e-12
