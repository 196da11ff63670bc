"""Wild-bootstrap MMD two-sample test for temporally dependent samples.

Two bootstrap modes are available:

* ``"wild"`` (default): two independent auxiliary processes, one per
  sample, each empirically centered; works for ``n_x != n_y``.
* ``"vb1"`` / ``"vb2"``: paired mode for ``n_x == n_y``, where the MMD is a
  degree-two V-statistic on ``z_i = (x_i, y_i)`` and a single process
  weights both arguments (raw or centered).

Statistic and null samples are scaled identically, so decisions do not
depend on the normalization.
"""

from __future__ import annotations

import numpy as np

from .kernels import KernelSpec, as_series, cross_gram, evaluate_kernel
from .results import TestResult, check_alpha
from .vstats import Core
from .wild_bootstrap import BootstrapConfig, Purpose, center_w, generate_w_matrix, stream

DEFAULT_PERMUTATIONS = 300
_SNAP = 1e-13


def mmd_core(z1, z2, k: KernelSpec) -> float:
    """``k(x1,x2) - k(x1,y2) - k(x2,y1) + k(y1,y2)`` for pairs ``z = (x, y)``."""
    (x1, y1), (x2, y2) = z1, z2
    return (evaluate_kernel(k, x1, x2) - evaluate_kernel(k, x1, y2)
            - evaluate_kernel(k, x2, y1) + evaluate_kernel(k, y1, y2))


def make_mmd_core(k: KernelSpec) -> Core:
    """Degree-two MMD core on paired observations, scalar evaluation only."""
    return Core(2, lambda z1, z2: mmd_core(z1, z2, k))


def _prepare(X, Y, kernel: KernelSpec):
    X = as_series(X, "X")
    Y = as_series(Y, "Y")
    if X.shape[1] != Y.shape[1]:
        raise ValueError(f"X and Y differ in dimension: {X.shape[1]} vs {Y.shape[1]}")
    if X.shape[0] < 2 or Y.shape[0] < 2:
        raise ValueError("each sample needs at least 2 observations")
    kernel = kernel.resolve(np.vstack([X, Y]))
    return X, Y, kernel


class MMDGrams:
    """Within- and cross-sample Gram matrices, computed once and shared."""

    def __init__(self, X, Y, kernel: KernelSpec):
        X, Y, kernel = _prepare(X, Y, kernel)
        self.kernel = kernel
        self.nx, self.ny = X.shape[0], Y.shape[0]
        self.Kxx = cross_gram(kernel, X, X)
        self.Kyy = cross_gram(kernel, Y, Y)
        self.Kxy = cross_gram(kernel, X, Y)

    @property
    def scale(self) -> float:
        """rho_x * rho_y * n with n = n_x + n_y."""
        return self.nx * self.ny / (self.nx + self.ny)

    def mmd(self) -> float:
        v = self.Kxx.mean() + self.Kyy.mean() - 2.0 * self.Kxy.mean()
        return 0.0 if v < _SNAP else float(v)

    def wild_null(self, Wx, Wy) -> np.ndarray:
        """Bootstrapped MMD for each column pair of (already centered) weights."""
        Wx = np.atleast_2d(np.asarray(Wx, dtype=float).T).T
        Wy = np.atleast_2d(np.asarray(Wy, dtype=float).T).T
        if Wx.shape[0] != self.nx or Wy.shape[0] != self.ny:
            raise ValueError("bootstrap series lengths must match the sample sizes")
        xx = np.einsum("ib,ib->b", Wx, self.Kxx @ Wx) / self.nx**2
        yy = np.einsum("ib,ib->b", Wy, self.Kyy @ Wy) / self.ny**2
        xy = np.einsum("ib,ib->b", Wx, self.Kxy @ Wy) / (self.nx * self.ny)
        return xx + yy - 2.0 * xy

    def paired_core_matrix(self) -> np.ndarray:
        if self.nx != self.ny:
            raise ValueError("paired mode requires n_x == n_y")
        return self.Kxx + self.Kyy - self.Kxy - self.Kxy.T


def empirical_mmd(X, Y, kernel: KernelSpec) -> float:
    """Biased (V-statistic) squared MMD."""
    return MMDGrams(X, Y, kernel).mmd()


def mmd_wb_null_sample(X, Y, kernel: KernelSpec, Wx, Wy) -> float:
    """One bootstrapped MMD value; ``Wx`` and ``Wy`` are centered here."""
    g = MMDGrams(X, Y, kernel)
    return float(g.wild_null(center_w(Wx), center_w(Wy))[0])


def paired_vb(X, Y, kernel: KernelSpec, W, variant: str = "vb1") -> float:
    """Fast paired-mode bootstrapped V-statistic ``(1/n^2) w' H w``."""
    g = MMDGrams(X, Y, kernel)
    w = np.asarray(W, dtype=float)
    if variant == "vb2":
        w = center_w(w)
    return float(w @ g.paired_core_matrix() @ w) / g.nx**2


def mmd_test(X, Y, kernel: KernelSpec = KernelSpec(), config: BootstrapConfig = BootstrapConfig(),
             alpha: float = 0.05, mode: str = "wild") -> TestResult:
    """Wild-bootstrap two-sample test.

    Parameters
    ----------
    X, Y : array_like, shape (n_x, d) and (n_y, d)
        The two (possibly autocorrelated) samples; row order is time order.
    kernel : KernelSpec
    config : BootstrapConfig
        Block length, replicate count and seed. ``config.variant`` is used
        only in paired mode when ``mode="paired"``.
    alpha : float
    mode : {"wild", "paired", "vb1", "vb2"}
        ``"paired"`` takes the variant from ``config``.
    """
    alpha = check_alpha(alpha)
    g = MMDGrams(X, Y, kernel)
    B = config.num_replicates
    if mode == "wild":
        Wx = center_w(generate_w_matrix(g.nx, config, Purpose.W_X))
        Wy = center_w(generate_w_matrix(g.ny, config, Purpose.W_Y))
        statistic = g.scale * g.mmd()
        null = g.scale * g.wild_null(Wx, Wy)
        method = "mmd-wild"
    elif mode in ("paired", "vb1", "vb2"):
        variant = config.variant if mode == "paired" else mode
        H = g.paired_core_matrix()
        W = generate_w_matrix(g.nx, config, Purpose.W)
        if variant == "vb2":
            W = center_w(W)
        n = g.nx
        statistic = n * g.mmd()
        # binom(2, 2) = 1
        null = n * np.einsum("ib,ib->b", W, H @ W) / n**2
        method = f"mmd-{variant}"
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return TestResult.from_null(
        statistic, null, alpha, method, config.seed,
        n_x=g.nx, n_y=g.ny, B=B, l_n=config.block_length, bandwidth=g.kernel.bandwidth,
        kernel=g.kernel.family,
    )


def mmd_permutation_test(X, Y, kernel: KernelSpec = KernelSpec(),
                         num_permutations: int = DEFAULT_PERMUTATIONS, alpha: float = 0.05,
                         seed: int = 0) -> TestResult:
    """Baseline that relabels the pooled sample at random (ignores dependence)."""
    alpha = check_alpha(alpha)
    X, Y, kernel = _prepare(X, Y, kernel)
    nx, ny = X.shape[0], Y.shape[0]
    P = np.vstack([X, Y])
    K = cross_gram(kernel, P, P)
    scale = nx * ny / (nx + ny)
    base = np.concatenate([np.full(nx, 1.0 / nx), np.full(ny, -1.0 / ny)])
    rng = stream(seed, Purpose.PERMUTATION)
    A = np.empty((nx + ny, num_permutations))
    for b in range(num_permutations):
        A[:, b] = base[rng.permutation(nx + ny)]
    null = np.einsum("ib,ib->b", A, K @ A)
    null = np.where(null < _SNAP, 0.0, null)
    stat = float(base @ K @ base)
    stat = 0.0 if stat < _SNAP else stat
    return TestResult.from_null(
        scale * stat, scale * null, alpha, "mmd-permutation", seed,
        n_x=nx, n_y=ny, B=num_permutations, bandwidth=kernel.bandwidth, kernel=kernel.family,
    )
