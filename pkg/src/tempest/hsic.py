"""HSIC statistic, its wild-bootstrapped versions, and instantaneous independence tests.

The empirical HSIC ``(1/n^2) Tr(K H L H)`` is a degree-four V-statistic whose
core is the S4 symmetrization of

    g(z1, z2, z3, z4) = k12 * (l12 + l34 - 2 l23).

In a bootstrapped V-statistic only the first two argument slots carry
weights. After symmetrization every unordered pair of slots {a, b} receives
the weights equally often, so

    Vb = 1 / (6 n^4) * sum_{a < b} sum_i w_{i_a} w_{i_b} g(z_{i_1}, ..., z_{i_4}),

and each inner sum contracts to matrix-vector products with K, L and
K o L. :func:`hsic_vb_fast` evaluates this in O(n^2) per replicate.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .kernels import KernelSpec, as_series, center, evaluate_kernel, gram
from .results import TestResult, check_alpha
from .vstats import Core
from .wild_bootstrap import BootstrapConfig, Purpose, center_w, generate_w_matrix, stream

BOOTSTRAP_FACTOR = 6  # binom(4, 2)
MIN_LENGTH = 6
DEFAULT_SHIFTS = 300

_SLOT_PAIRS = tuple(itertools.combinations(range(4), 2))


def _check_pair(K, L):
    K = np.asarray(K, dtype=float)
    L = np.asarray(L, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1] or K.shape != L.shape:
        raise ValueError(f"Gram matrices must be square and equal in size: {K.shape} vs {L.shape}")
    return K, L


def hsic_stat(K, L) -> float:
    """``(1/n^2) Tr(K H L H)`` from uncentered Gram matrices."""
    K, L = _check_pair(K, L)
    n = K.shape[0]
    # Tr(KHLH) = sum(K o L) - (2/n) (K1).(L1) + (1'K1)(1'L1)/n^2, symmetric in K and L
    k1, l1 = K.sum(axis=1), L.sum(axis=1)
    tr = np.sum(K * L) - 2.0 / n * np.dot(k1, l1) + k1.sum() * l1.sum() / n**2
    return float(tr) / n**2


def hsic_core(z1, z2, z3, z4, k: KernelSpec, l: KernelSpec) -> float:
    """Symmetrized degree-four HSIC core on paired observations ``z = (x, y)``."""
    zs = (z1, z2, z3, z4)
    total = 0.0
    for p in itertools.permutations(range(4)):
        (xa, ya), (xb, yb), (xc, yc), (xd, yd) = (zs[i] for i in p)
        total += evaluate_kernel(k, xa, xb) * (
            evaluate_kernel(l, ya, yb) + evaluate_kernel(l, yc, yd) - 2.0 * evaluate_kernel(l, yb, yc)
        )
    return total / 24.0


def core_tensor(K, L) -> np.ndarray:
    """All n^4 values of the symmetrized core, by brute-force enumeration."""
    K, L = _check_pair(K, L)
    G = K[:, :, None, None] * (L[:, :, None, None] + L[None, None, :, :] - 2.0 * L[None, :, :, None])
    H = np.zeros_like(G)
    for p in itertools.permutations(range(4)):
        H += np.transpose(G, p)
    return H / 24.0


def make_hsic_core(k: KernelSpec, l: KernelSpec) -> Core:
    """HSIC core usable with :mod:`tempest.vstats`; observations are ``(x, y)`` pairs."""

    def tensor(Z):
        X = np.array([np.atleast_1d(z[0]) for z in Z], dtype=float)
        Y = np.array([np.atleast_1d(z[1]) for z in Z], dtype=float)
        return core_tensor(gram(k, X), gram(l, Y))

    return Core(4, lambda *z: hsic_core(*z, k, l), tensor)


def hsic_vb_fast(K, L, W, variant: str = "vb1"):
    """Bootstrapped HSIC V-statistic in O(n^2) per replicate.

    ``W`` may be a single series (returns a float) or an ``(n, B)`` array of
    replicates in columns (returns an array of length B).
    """
    K, L = _check_pair(K, L)
    n = K.shape[0]
    W = np.asarray(W, dtype=float)
    single = W.ndim == 1
    if single:
        W = W[:, None]
    if W.shape[0] != n:
        raise ValueError(f"bootstrap series length {W.shape[0]} does not match n={n}")
    if variant == "vb2":
        W = center_w(W)
    elif variant != "vb1":
        raise ValueError(f"variant must be 'vb1' or 'vb2', got {variant!r}")

    M = K * L
    one = np.ones((n, 1))
    vec = {"1": one, "w": W}
    Kv = {"1": K @ one, "w": K @ W}
    Lv = {"1": L @ one, "w": L @ W}
    Mv = {"1": M @ one, "w": M @ W}
    tot = {"1": float(n), "w": W.sum(axis=0)}

    def inner(a, Av, b):
        return np.sum(vec[a] * Av[b], axis=0)

    acc = np.zeros(W.shape[1])
    for slots in _SLOT_PAIRS:
        v = ["w" if p in slots else "1" for p in range(4)]
        term_a = inner(v[0], Mv, v[1]) * tot[v[2]] * tot[v[3]]
        term_b = inner(v[0], Kv, v[1]) * inner(v[2], Lv, v[3])
        term_c = np.sum(Kv[v[0]] * vec[v[1]] * Lv[v[2]], axis=0) * tot[v[3]]
        acc += term_a + term_b - 2.0 * term_c
    out = acc / (6.0 * n**4)
    return float(out[0]) if single else out


def snap(values, tol: float = 1e-12):
    """Zero out rounding residue (e.g. from a constant series) so ties compare exactly."""
    v = np.asarray(values, dtype=float)
    return np.where(np.abs(v) < tol, 0.0, v)


def _paired(X, Y):
    X = as_series(X, "X")
    Y = as_series(Y, "Y")
    if X.shape[0] != Y.shape[0]:
        raise ValueError(f"X and Y must have equal length, got {X.shape[0]} and {Y.shape[0]}")
    return X, Y


def hsic_v_identity_check(X, Y, k: KernelSpec, l: KernelSpec):
    """(HSIC via traces, HSIC via naive degree-four V-statistic) for small n."""
    from .vstats import v_naive

    X, Y = _paired(X, Y)
    if X.shape[0] > 20:
        raise ValueError("identity check is limited to n <= 20")
    k, l = k.resolve(X), l.resolve(Y)
    fast = hsic_stat(gram(k, X), gram(l, Y))
    naive = v_naive(make_hsic_core(k, l), list(zip(X, Y))).value
    return fast, naive


def _resolved_grams(X, Y, k: KernelSpec, l: KernelSpec):
    # a constant series makes the median heuristic degenerate; any bandwidth gives K = 11'
    def one(Z, spec):
        if spec.is_median and np.all(Z == Z[0]):
            spec = KernelSpec(spec.family, 1.0)
        spec = spec.resolve(Z)
        return gram(spec, Z), spec

    K, k = one(X, k)
    L, l = one(Y, l)
    return K, L, k, l


def instantaneous_independence_test(X, Y, k: KernelSpec = KernelSpec(), l: KernelSpec = KernelSpec(),
                                    config: BootstrapConfig = BootstrapConfig(), alpha: float = 0.05,
                                    factor: bool = True) -> TestResult:
    """Wild-bootstrap HSIC test of ``X_t`` independent of ``Y_t``.

    The statistic is ``n * HSIC``; null samples are ``6 * n * Vb`` (the
    factor 6 can be switched off with ``factor=False``).
    """
    alpha = check_alpha(alpha)
    X, Y = _paired(X, Y)
    n = X.shape[0]
    if n < MIN_LENGTH:
        raise ValueError(f"need at least {MIN_LENGTH} observations, got {n}")
    K, L, k, l = _resolved_grams(X, Y, k, l)
    W = generate_w_matrix(n, config, Purpose.W)
    mult = BOOTSTRAP_FACTOR if factor else 1
    null = snap(mult * n * hsic_vb_fast(K, L, W, config.variant))
    return TestResult.from_null(
        float(snap(n * hsic_stat(K, L))), null, alpha, f"hsic-{config.variant}", config.seed,
        n=n, B=config.num_replicates, l_n=config.block_length, factor_applied=factor,
        bandwidth_x=k.bandwidth, bandwidth_y=l.bandwidth, kernel=k.family,
    )


def default_min_shift(n: int) -> int:
    return max(20, math.ceil(n / 20))


def shift_hsic_test(X, Y, k: KernelSpec = KernelSpec(), l: KernelSpec = KernelSpec(),
                    num_shifts: int = DEFAULT_SHIFTS, alpha: float = 0.05, seed: int = 0,
                    min_shift: int | None = None) -> TestResult:
    """Baseline: null samples from circular shifts ``(X_t, Y_{(t+s) mod n})``."""
    alpha = check_alpha(alpha)
    X, Y = _paired(X, Y)
    n = X.shape[0]
    if min_shift is None:
        min_shift = default_min_shift(n)
    if n < 3 * min_shift:
        raise ValueError(f"series of length {n} too short for minimum shift {min_shift}")
    K, L, k, l = _resolved_grams(X, Y, k, l)
    Kc, Lc = center(K), center(L)
    rng = stream(seed, Purpose.SHIFT)
    shifts = rng.integers(min_shift, n - min_shift, endpoint=True, size=num_shifts)
    null = np.empty(num_shifts)
    for b, s in enumerate(shifts):
        idx = (np.arange(n) + s) % n
        null[b] = np.sum(Kc * Lc[np.ix_(idx, idx)]) / n
    return TestResult.from_null(
        float(snap(n * hsic_stat(K, L))), snap(null), alpha, "hsic-shift", seed,
        n=n, B=num_shifts, min_shift=min_shift, bandwidth_x=k.bandwidth, bandwidth_y=l.bandwidth,
        kernel=k.family,
    )
