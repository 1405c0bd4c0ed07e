"""Distances between distributions and quantum states, kernels, the discrete
Stein machinery, entropic optimal transport, and entanglement capability.

Distributions over n-bit strings are handled by :class:`Pmf`, either as a
dense vector over all 2^n outcomes (little-endian integer indexing, matching
:mod:`vqlab.simcore`) or as a weighted empirical support.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.linalg import eigh
from scipy.optimize import linprog
from scipy.special import logsumexp

from . import simcore
from .simcore import DensityMatrix, Statevector, int_to_bits, partial_trace_raw

# ---------------------------------------------------------------------------
# Pmf


@dataclass(frozen=True)
class Pmf:
    """Probability mass function over {0,1}^n.

    Exactly one of `probs` (dense, length 2^n) or (`support`, `weights`)
    is set. Support entries are integers; weights are nonnegative and sum
    to 1 within 1e-9.
    """

    n_bits: int
    probs: Optional[np.ndarray] = None
    support: Optional[np.ndarray] = None
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        if (self.probs is None) == (self.support is None):
            raise ValueError("exactly one of probs / support must be given")
        if self.probs is not None:
            p = np.asarray(self.probs, dtype=float)
            if p.shape != (2**self.n_bits,):
                raise ValueError("dense pmf has wrong length")
            if p.min() < -1e-12:
                raise ValueError("negative probability")
            if abs(p.sum() - 1.0) > 1e-9:
                raise ValueError("probabilities do not sum to 1")
            p = np.clip(p, 0.0, None)
            p.setflags(write=False)
            object.__setattr__(self, "probs", p)
        else:
            s = np.asarray(self.support, dtype=np.int64)
            w = (np.full(len(s), 1.0 / len(s)) if self.weights is None
                 else np.asarray(self.weights, dtype=float))
            if len(s) != len(w):
                raise ValueError("support/weights length mismatch")
            if w.min() < -1e-12:
                raise ValueError("negative weight")
            if abs(w.sum() - 1.0) > 1e-9:
                raise ValueError("weights do not sum to 1")
            s.setflags(write=False)
            w.setflags(write=False)
            object.__setattr__(self, "support", s)
            object.__setattr__(self, "weights", np.clip(w, 0.0, None))

    # -- constructors -------------------------------------------------------

    @staticmethod
    def dense(probs, n_bits: int) -> "Pmf":
        return Pmf(n_bits, probs=np.asarray(probs, dtype=float))

    @staticmethod
    def from_samples(samples, n_bits: int) -> "Pmf":
        """Empirical pmf: de-duplicated support with counts/M weights."""
        s = np.asarray(samples, dtype=np.int64)
        vals, counts = np.unique(s, return_counts=True)
        return Pmf(n_bits, support=vals, weights=counts / counts.sum())

    @staticmethod
    def point_mass(x: int, n_bits: int) -> "Pmf":
        p = np.zeros(2**n_bits)
        p[x] = 1.0
        return Pmf(n_bits, probs=p)

    @staticmethod
    def uniform(n_bits: int) -> "Pmf":
        return Pmf(n_bits, probs=np.full(2**n_bits, 2.0**-n_bits))

    # -- views --------------------------------------------------------------

    @property
    def is_dense(self) -> bool:
        return self.probs is not None

    def to_dense(self) -> np.ndarray:
        if self.is_dense:
            return self.probs
        p = np.zeros(2**self.n_bits)
        np.add.at(p, self.support, self.weights)
        return p

    def support_weights(self) -> tuple[np.ndarray, np.ndarray]:
        """(support ints, weights), dropping zero-weight outcomes."""
        if self.is_dense:
            nz = np.nonzero(self.probs > 0)[0]
            return nz, self.probs[nz]
        return self.support, self.weights

    def sample(self, m: int, rng: np.random.Generator) -> np.ndarray:
        xs, ws = self.support_weights()
        return rng.choice(xs, size=m, p=ws / ws.sum())


def _check_same_bits(p: Pmf, q: Pmf):
    if p.n_bits != q.n_bits:
        raise ValueError("pmfs are over different numbers of bits")


# ---------------------------------------------------------------------------
# classical distances


def tv(p: Pmf, q: Pmf) -> float:
    """Total variation distance  (1/2) sum_x |p(x) - q(x)|."""
    _check_same_bits(p, q)
    return 0.5 * float(np.abs(p.to_dense() - q.to_dense()).sum())


def entropy(p: Pmf) -> float:
    w = p.support_weights()[1]
    w = w[w > 0]
    return float(-np.sum(w * np.log2(w)))


def binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return float(-x * np.log2(x) - (1 - x) * np.log2(1 - x))


def kl(p: Pmf, q: Pmf) -> float:
    """KL(p || q) in bits; +inf when supp(p) is not inside supp(q)."""
    _check_same_bits(p, q)
    pd, qd = p.to_dense(), q.to_dense()
    mask = pd > 0
    if np.any(qd[mask] <= 0):
        return float("inf")
    return float(np.sum(pd[mask] * (np.log2(pd[mask]) - np.log2(qd[mask]))))


# ---------------------------------------------------------------------------
# kernels


@dataclass(frozen=True)
class Kernel:
    """Symmetric positive-definite kernel on bitstrings (as integers)."""

    kind: str
    n_bits: int
    params: tuple = ()

    def gram(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """len(xs) x len(ys) kernel matrix."""
        xb = int_to_bits(np.asarray(xs), self.n_bits)
        yb = int_to_bits(np.asarray(ys), self.n_bits)
        if self.kind == "gauss":
            d2 = _sq_dists(xb, yb)
            sigmas = self.params
            out = np.zeros_like(d2)
            for s in sigmas:
                out += np.exp(-d2 / (2.0 * s))
            return out / len(sigmas)
        if self.kind == "hamming":
            d = _sq_dists(xb, yb)  # squared l2 == hamming for bits
            return np.exp(-d / self.n_bits)
        if self.kind == "iqp":
            feats_x = _iqp_features(xs, self.n_bits, self.params)
            feats_y = (feats_x if xs is ys else
                       _iqp_features(ys, self.n_bits, self.params))
            return np.abs(feats_x.conj() @ feats_y.T) ** 2
        raise ValueError(f"unknown kernel kind {self.kind!r}")

    def __call__(self, x: int, y: int) -> float:
        return float(self.gram(np.array([x]), np.array([y]))[0, 0])


def _sq_dists(xb: np.ndarray, yb: np.ndarray) -> np.ndarray:
    # binary vectors: ||x-y||^2 equals the Hamming distance
    return np.abs(xb[:, None, :] - yb[None, :, :]).sum(axis=2)


def _iqp_features(xs: np.ndarray, n: int, params) -> np.ndarray:
    """State vectors |phi(x)> of a diagonal-phase feature circuit.

    |phi(x)> = U(x) H^n U(x) H^n |0>, with U(x) = exp(i sum_S phi_S(x) prod Z)
    over singles (phi_i = c1 x_i) and pairs (phi_ij = c2 x_i x_j).
    """
    c1, c2 = params if params else (1.0, 1.0)
    xs = np.asarray(xs, dtype=np.int64)
    zb = 1.0 - 2.0 * simcore.bits_matrix(n)          # z-values per basis state
    xbits = int_to_bits(xs, n)
    d = 2**n
    states = np.full((len(xs), d), d**-0.5, dtype=complex)
    # phases of the diagonal unitary for each data point, on each basis state
    phase = np.zeros((len(xs), d))
    for i in range(n):
        phase += c1 * xbits[:, i:i + 1] * zb[None, :, i]
        for j in range(i + 1, n):
            phase += c2 * (xbits[:, i] * xbits[:, j])[:, None] * (zb[:, i] * zb[:, j])[None, :]
    for _ in range(2):
        states = states * np.exp(1j * phase)
        # apply H^n: Walsh-Hadamard transform
        states = _walsh_hadamard(states) / np.sqrt(d)
    return states


def _walsh_hadamard(v: np.ndarray) -> np.ndarray:
    v = v.copy()
    n = int(np.log2(v.shape[-1]))
    for k in range(n):
        v = v.reshape(v.shape[0], -1, 2, 2**k)
        a = v[:, :, 0, :] + v[:, :, 1, :]
        b = v[:, :, 0, :] - v[:, :, 1, :]
        v = np.stack([a, b], axis=2)
    return v.reshape(v.shape[0], -1)


def gaussian_mixture_kernel(n_bits: int, sigmas=(0.25, 10.0, 1000.0)) -> Kernel:
    return Kernel("gauss", n_bits, tuple(float(s) for s in sigmas))


def exp_hamming_kernel(n_bits: int) -> Kernel:
    return Kernel("hamming", n_bits)


def iqp_kernel(n_bits: int, c1: float = 1.0, c2: float = 1.0) -> Kernel:
    return Kernel("iqp", n_bits, (c1, c2))


def parse_kernel_spec(spec: str, n_bits: int) -> Kernel:
    spec = spec.strip()
    if spec == "hamming":
        return exp_hamming_kernel(n_bits)
    if spec.startswith("gauss(") and spec.endswith(")"):
        sigmas = tuple(float(x) for x in spec[6:-1].split(","))
        return gaussian_mixture_kernel(n_bits, sigmas)
    if spec == "gauss":
        return gaussian_mixture_kernel(n_bits)
    raise ValueError(f"unknown kernel spec {spec!r}")


# ---------------------------------------------------------------------------
# MMD


def mmd(p: Pmf, q: Pmf, kernel: Kernel) -> float:
    """Exact squared MMD: E_pp[k] + E_qq[k] - 2 E_pq[k]."""
    _check_same_bits(p, q)
    xs, wx = p.support_weights()
    ys, wy = q.support_weights()
    kxx = wx @ kernel.gram(xs, xs) @ wx
    kyy = wy @ kernel.gram(ys, ys) @ wy
    kxy = wx @ kernel.gram(xs, ys) @ wy
    return float(kxx + kyy - 2 * kxy)


def mmd_estimator(xs: np.ndarray, ys: np.ndarray, kernel: Kernel) -> float:
    """Unbiased two-sample estimator from raw samples (needs >= 2 each)."""
    xs = np.asarray(xs); ys = np.asarray(ys)
    n, m = len(xs), len(ys)
    if n < 2 or m < 2:
        raise ValueError("need at least 2 samples on each side")
    kxx = kernel.gram(xs, xs)
    kyy = kernel.gram(ys, ys)
    kxy = kernel.gram(xs, ys)
    term_x = (kxx.sum() - np.trace(kxx)) / (n * (n - 1))
    term_y = (kyy.sum() - np.trace(kyy)) / (m * (m - 1))
    return float(term_x + term_y - 2 * kxy.mean())


# ---------------------------------------------------------------------------
# discrete Stein machinery
#
# For bitstrings the cyclic flip on coordinate i is its own inverse, so the
# forward and inverse difference operators coincide:
#   Delta_i f(x) = f(x) - f(x with bit i flipped)
#   score_q(x)_i = 1 - q(flip_i x) / q(x)


def flip_bit(xs: np.ndarray, i: int) -> np.ndarray:
    return np.asarray(xs, dtype=np.int64) ^ (1 << i)


class ScoreSource:
    """Base: provides per-coordinate difference scores at given points."""

    n_bits: int

    def scores(self, xs: np.ndarray) -> np.ndarray:  # (len(xs), n_bits)
        raise NotImplementedError


@dataclass
class ExactScore(ScoreSource):
    pmf: Pmf

    def __post_init__(self):
        self.n_bits = self.pmf.n_bits
        self._dense = self.pmf.to_dense()

    def scores(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        px = self._dense[xs]
        if np.any(px <= 0):
            raise ValueError("score undefined: zero probability at a point")
        out = np.empty((len(xs), self.n_bits))
        for i in range(self.n_bits):
            out[:, i] = 1.0 - self._dense[flip_bit(xs, i)] / px
        return out


@dataclass
class TabulatedScore(ScoreSource):
    """Scores known at an explicit list of points (in-sample estimators)."""

    n_bits: int
    points: np.ndarray
    matrix: np.ndarray

    def __post_init__(self):
        self._index = {int(x): k for k, x in enumerate(self.points)}

    def scores(self, xs: np.ndarray) -> np.ndarray:
        try:
            rows = [self._index[int(x)] for x in np.asarray(xs)]
        except KeyError as exc:
            raise ValueError(f"score not tabulated at point {exc}") from exc
        return self.matrix[rows]


def score_exact(pi: Pmf) -> ExactScore:
    return ExactScore(pi)


def score_identity(samples, n_bits: int, base: Kernel, eta: float = 0.01,
                   weights=None) -> TabulatedScore:
    """Ridge-regression (inverted Stein identity) score estimate.

    Solves  G = M (K + eta I)^{-1} B  on the de-duplicated sample support,
    where B_{ab} = mean_i [ k(x_a, x_i) - k(x_a, flip_b x_i) ].  `weights`
    (summing to 1) generalize the 1/M empirical weighting.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    xs = np.asarray(samples, dtype=np.int64)
    if weights is None:
        pts, counts = np.unique(xs, return_counts=True)
        w = counts / counts.sum()
    else:
        pts = xs
        w = np.asarray(weights, dtype=float)
    m = len(pts)
    kmat = base.gram(pts, pts)
    b = np.empty((m, n_bits))
    for i in range(n_bits):
        kflip = base.gram(pts, flip_bit(pts, i))
        b[:, i] = (kmat - kflip) @ w
    a = kmat * w[None, :] + eta * np.eye(m)
    try:
        g = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise ValueError("singular kernel system; increase eta") from exc
    return TabulatedScore(n_bits, pts, g)


@dataclass
class SpectralScore(ScoreSource):
    """Nystrom eigenfunction score estimator; evaluable at unseen points."""

    n_bits: int
    base: Kernel
    points: np.ndarray
    weights: np.ndarray
    eigvals: np.ndarray       # J kept eigenvalues of K diag(w)
    eigvecs: np.ndarray       # (M, J)
    beta: np.ndarray          # (n_bits, J)

    def _psi(self, xs: np.ndarray) -> np.ndarray:
        # psi_j(x) = (1/lambda_j) sum_m u_j(m) w_m-normalised k(x, x_m)
        kxm = self.base.gram(np.asarray(xs), self.points)
        return (kxm * self.weights[None, :]) @ self.eigvecs / self.eigvals[None, :]

    def scores(self, xs: np.ndarray) -> np.ndarray:
        return self._psi(xs) @ self.beta.T


def score_spectral(samples, n_bits: int, base: Kernel, n_eig: int,
                   eta: float = 0.0, weights=None) -> SpectralScore:
    """Spectral (Nystrom) score estimator with `n_eig` eigenfunctions.

    beta_ij = E_pi[Delta_i psi_j]; for binary coordinates the inverse shift
    equals the forward shift, which fixes the sign of beta (checked against
    exact scores in the tests).
    """
    xs = np.asarray(samples, dtype=np.int64)
    if weights is None:
        pts, counts = np.unique(xs, return_counts=True)
        w = counts / counts.sum()
    else:
        pts = xs
        w = np.asarray(weights, dtype=float)
    m = len(pts)
    if not 1 <= n_eig <= m:
        raise ValueError("need 1 <= n_eig <= number of distinct samples")
    kmat = base.gram(pts, pts)
    # eigenpairs of the weighted operator via the symmetric form
    # D^{1/2} K D^{1/2} v = lam v  ->  u = D^{-1/2} v solves K D u = lam u
    sw = np.sqrt(w)
    sym = sw[:, None] * kmat * sw[None, :]
    lam, v = eigh(sym)
    order = np.argsort(lam)[::-1][:n_eig]
    lam = lam[order]
    if lam[-1] <= max(eta, 1e-12):
        raise ValueError("kernel spectrum too small for requested n_eig")
    u = v[:, order] / sw[:, None]
    # psi_j evaluated in-sample: psi_j(x_m) = u_j(m) (orthonormal wrt w)
    psi_flip = np.empty((n_bits, m, n_eig))
    for i in range(n_bits):
        kfm = base.gram(flip_bit(pts, i), pts)
        psi_flip[i] = (kfm * w[None, :]) @ u / lam[None, :]
    psi_in = u
    beta = np.empty((n_bits, n_eig))
    for i in range(n_bits):
        beta[i] = w @ (psi_in - psi_flip[i])
    return SpectralScore(n_bits, base, pts, w, lam, u, beta)


def stein_kernel(xs: np.ndarray, ys: np.ndarray, score_q: ScoreSource,
                 base: Kernel) -> np.ndarray:
    """Matrix of the score-weighted Stein kernel kappa_q(x, y)."""
    xs = np.asarray(xs, dtype=np.int64)
    ys = np.asarray(ys, dtype=np.int64)
    n = score_q.n_bits
    sx = score_q.scores(xs)
    sy = score_q.scores(ys)
    k = base.gram(xs, ys)
    out = (sx @ sy.T) * k
    trace_term = n * k
    for i in range(n):
        k_xf = base.gram(xs, flip_bit(ys, i))       # k(x, flip_i y)
        k_fx = base.gram(flip_bit(xs, i), ys)       # k(flip_i x, y)
        k_ff = base.gram(flip_bit(xs, i), flip_bit(ys, i))
        out -= sx[:, i:i + 1] * (k - k_xf)          # s(x)_i Delta_{y_i} k
        out -= (k - k_fx) * sy[None, :, i]          # Delta_{x_i} k s(y)_i
        trace_term += -k_xf - k_fx + k_ff
    return out + trace_term


def stein_discrepancy(p: Pmf, score_q: ScoreSource, base: Kernel) -> float:
    """E_{x,y~p}[kappa_q(x,y)]; zero iff p == q when the score is exact."""
    xs, w = p.support_weights()
    km = stein_kernel(xs, xs, score_q, base)
    return float(w @ km @ w)


# ---------------------------------------------------------------------------
# optimal transport and the Sinkhorn divergence


def hamming_cost(xs: np.ndarray, ys: np.ndarray, n_bits: int) -> np.ndarray:
    xb = int_to_bits(np.asarray(xs), n_bits)
    yb = int_to_bits(np.asarray(ys), n_bits)
    return np.abs(xb[:, None, :] - yb[None, :, :]).sum(axis=2)


def ot_exact(p: Pmf, q: Pmf, cost: str = "hamming") -> float:
    """Unregularized optimal transport by linear programming (n <= 6)."""
    _check_same_bits(p, q)
    if p.n_bits > 6:
        raise ValueError("exact OT capped at 6 bits")
    xs, wx = p.support_weights()
    ys, wy = q.support_weights()
    c = hamming_cost(xs, ys, p.n_bits)
    nx, ny = len(xs), len(ys)
    a_eq = []
    for i in range(nx):
        row = np.zeros((nx, ny)); row[i, :] = 1
        a_eq.append(row.ravel())
    for j in range(ny):
        row = np.zeros((nx, ny)); row[:, j] = 1
        a_eq.append(row.ravel())
    b_eq = np.concatenate([wx, wy])
    res = linprog(c.ravel(), A_eq=np.array(a_eq), b_eq=b_eq,
                  bounds=(0, None), method="highs")
    if not res.success:
        raise RuntimeError(f"OT linear program failed: {res.message}")
    return float(res.fun)


@dataclass
class SinkhornState:
    epsilon: float
    xs: np.ndarray            # model support
    ys: np.ndarray            # data support
    wx: np.ndarray
    wy: np.ndarray
    f: np.ndarray
    g: np.ndarray
    s: np.ndarray             # autocorrelation potential on xs
    t: np.ndarray             # autocorrelation potential on ys
    iterations: int
    converged: bool
    n_bits: int


def _ot_dual_potentials(wx, wy, cost, eps, max_iter, tol, init=None):
    """Log-domain Sinkhorn iterations for OT_eps(p, q); returns f, g, iters, ok."""
    log_wx = np.log(wx)
    log_wy = np.log(wy)
    if init is not None:
        f, g = np.array(init[0], dtype=float), np.array(init[1], dtype=float)
    else:
        f = np.zeros(len(wx))
        g = np.zeros(len(wy))
    for it in range(1, max_iter + 1):
        f_new = -eps * logsumexp(log_wy[None, :] + g[None, :] / eps
                                 - cost / eps, axis=1)
        g_new = -eps * logsumexp(log_wx[None, :] + f_new[None, :] / eps
                                 - cost.T / eps, axis=1)
        delta = max(np.max(np.abs(f_new - f)), np.max(np.abs(g_new - g)))
        f, g = f_new, g_new
        if delta < tol:
            return f, g, it, True
    return f, g, max_iter, False


def _autocorrelation_potential(w, cost, eps, max_iter, tol, init=None):
    """Damped symmetric fixed-point update for OT_eps(p, p)."""
    log_w = np.log(w)
    s = np.zeros(len(w)) if init is None else np.array(init, dtype=float)
    for it in range(1, max_iter + 1):
        target = -eps * logsumexp(log_w[None, :] + s[None, :] / eps
                                  - cost / eps, axis=1)
        s_new = 0.5 * (s + target)
        delta = np.max(np.abs(s_new - s))
        s = s_new
        if delta < tol:
            return s, it, True
    return s, max_iter, False


def sinkhorn_divergence(p: Pmf, q: Pmf, epsilon: float, max_iter: int = 1000,
                        tol: float = 1e-9,
                        warm_start: Optional[SinkhornState] = None
                        ) -> tuple[float, SinkhornState]:
    """Debiased entropic OT:  OT_eps(p,q) - OT_eps(p,p)/2 - OT_eps(q,q)/2.

    Computed from dual potentials as <p, f - s> + <q, g - t>. A previous
    state over the same supports can seed the iterations (`warm_start`),
    which is how the training loop keeps per-epoch solves cheap.
    """
    _check_same_bits(p, q)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    xs, wx = p.support_weights()
    ys, wy = q.support_weights()
    n = p.n_bits
    c_xy = hamming_cost(xs, ys, n)
    c_xx = hamming_cost(xs, xs, n)
    c_yy = hamming_cost(ys, ys, n)
    init_fg = init_s = init_t = None
    if warm_start is not None and len(warm_start.wx) == len(wx) \
            and len(warm_start.wy) == len(wy):
        init_fg = (warm_start.f, warm_start.g)
        init_s = warm_start.s
        init_t = warm_start.t
    f, g, it1, ok1 = _ot_dual_potentials(wx, wy, c_xy, epsilon, max_iter,
                                         tol, init=init_fg)
    s, it2, ok2 = _autocorrelation_potential(wx, c_xx, epsilon, max_iter,
                                             tol, init=init_s)
    t, it3, ok3 = _autocorrelation_potential(wy, c_yy, epsilon, max_iter,
                                             tol, init=init_t)
    value = float(wx @ (f - s) + wy @ (g - t))
    state = SinkhornState(epsilon, xs, ys, wx, wy, f, g, s, t,
                          iterations=max(it1, it2, it3),
                          converged=ok1 and ok2 and ok3, n_bits=n)
    return value, state


def sinkhorn_potential_phi(x, state: SinkhornState) -> np.ndarray:
    """Gradient potential phi(x) = dSH/dp(x), valid at any outcome x."""
    xs = np.atleast_1d(np.asarray(x, dtype=np.int64))
    eps = state.epsilon
    c_to_y = hamming_cost(xs, state.ys, state.n_bits)
    c_to_x = hamming_cost(xs, state.xs, state.n_bits)
    term_f = -eps * logsumexp(np.log(state.wy)[None, :] + state.g[None, :] / eps
                              - c_to_y / eps, axis=1)
    term_s = -eps * logsumexp(np.log(state.wx)[None, :] + state.s[None, :] / eps
                              - c_to_x / eps, axis=1)
    return term_f - term_s


# ---------------------------------------------------------------------------
# quantum state distances


def _as_matrix(state) -> np.ndarray:
    if isinstance(state, Statevector):
        return np.outer(state.amplitudes, state.amplitudes.conj())
    if isinstance(state, DensityMatrix):
        return state.matrix
    return np.asarray(state, dtype=complex)


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(mat)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)[None, :]) @ vecs.conj().T


def fidelity(a, b) -> float:
    """Squared-overlap fidelity [Tr sqrt(sqrt(a) b sqrt(a))]^2.

    Pure inputs take the direct overlap path (better conditioned than the
    matrix square roots)."""
    if isinstance(a, Statevector) and isinstance(b, Statevector):
        val = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
        return min(max(float(val), 0.0), 1.0)
    if isinstance(a, Statevector) or isinstance(b, Statevector):
        psi, rho = (a, b) if isinstance(a, Statevector) else (b, a)
        val = np.real(psi.amplitudes.conj() @ _as_matrix(rho) @ psi.amplitudes)
        return min(max(float(val), 0.0), 1.0)
    am, bm = _as_matrix(a), _as_matrix(b)
    if am.shape != bm.shape:
        raise ValueError("states have different dimensions")
    ra = _psd_sqrt(am)
    inner = _psd_sqrt(ra @ bm @ ra)
    val = float(np.real(np.trace(inner)) ** 2)
    return min(max(val, 0.0), 1.0)


def trace_distance(a, b) -> float:
    diff = _as_matrix(a) - _as_matrix(b)
    eigs = np.linalg.eigvalsh(diff)
    return 0.5 * float(np.abs(eigs).sum())


def bures_angle(a, b) -> float:
    return float(np.arccos(np.sqrt(fidelity(a, b))))


def hs_distance(a, b) -> float:
    diff = _as_matrix(a) - _as_matrix(b)
    return float(np.real(np.trace(diff @ diff)))


def von_neumann_entropy(rho) -> float:
    vals = np.linalg.eigvalsh(_as_matrix(rho))
    vals = vals[vals > 1e-14]
    return float(-np.sum(vals * np.log2(vals)))


def holevo_quantity(rho_mix, rho0, rho1) -> float:
    """S(rho) - S(rho0)/2 - S(rho1)/2 for an equiprobable binary ensemble."""
    return (von_neumann_entropy(rho_mix)
            - 0.5 * von_neumann_entropy(rho0)
            - 0.5 * von_neumann_entropy(rho1))


# ---------------------------------------------------------------------------
# SWAP test


def swap_test_probability(pure: Statevector, rho) -> float:
    """Exact Pr[ancilla = 0] of the SWAP test: (1 + <psi|rho|psi>)/2."""
    overlap = float(np.real(pure.amplitudes.conj()
                            @ _as_matrix(rho) @ pure.amplitudes))
    return 0.5 * (1.0 + overlap)


def swap_test_estimate(pure: Statevector, rho, shots: int, seed: int) -> float:
    """Unbiased overlap estimate from `shots` runs of the SWAP test.

    The ancilla-0 outcome has probability (1 + <psi|rho|psi>)/2, so the
    overlap estimate is 2 * freq(0) - 1.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p0 = swap_test_probability(pure, rho)
    rng = np.random.default_rng(seed)
    zeros = rng.binomial(shots, min(max(p0, 0.0), 1.0))
    return 2.0 * zeros / shots - 1.0


# ---------------------------------------------------------------------------
# Meyer-Wallach entanglement


def meyer_wallach_q(psi: Statevector) -> float:
    """Q = 2 (1 - mean_k Tr[rho_k^2]) from single-qubit subsystem purities."""
    n = psi.n_qubits
    rho = np.outer(psi.amplitudes, psi.amplitudes.conj())
    total = 0.0
    for k in range(n):
        red = partial_trace_raw(rho, [k], n)
        total += float(np.real(np.trace(red @ red)))
    return 2.0 * (1.0 - total / n)


def ent_capability(circuit_factory: Callable[[np.ndarray], Statevector],
                   n_params: int, n_samples: int, seed: int) -> tuple[float, float]:
    """Mean and std of Q over uniform random parameter draws in [0, 2pi)."""
    rng = np.random.default_rng(seed)
    qs = []
    for _ in range(n_samples):
        theta = rng.uniform(0.0, 2 * np.pi, size=n_params)
        qs.append(meyer_wallach_q(circuit_factory(theta)))
    return float(np.mean(qs)), float(np.std(qs))


# ---------------------------------------------------------------------------
# Pmf file format: CSV `bitstring,probability`


def save_pmf_csv(p: Pmf, path):
    xs, ws = p.support_weights()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("bitstring,probability\n")
        for x, w in zip(xs, ws):
            fh.write(f"{format(int(x), f'0{p.n_bits}b')},{float(w)!r}\n")


def load_pmf_csv(path, n_bits: int) -> Pmf:
    support, weights = [], []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        if header.strip() != "bitstring,probability":
            raise ValueError("bad pmf csv header")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                bits, prob = line.split(",")
                support.append(int(bits, 2))
                weights.append(float(prob))
            except ValueError as exc:
                raise ValueError(f"bad pmf csv line {lineno}: {line!r}") from exc
    return Pmf(n_bits, support=np.array(support), weights=np.array(weights))
