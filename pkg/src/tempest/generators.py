"""Seeded synthetic processes used by the experiments and the test-suite.

Every generator takes ``seed``, which may be an integer or an existing
:class:`numpy.random.Generator`; identical seeds give bit-identical output.
Paired generators return ``(X, Y)`` as two ``(n, d)`` arrays.
"""

from __future__ import annotations

import numpy as np

PAPER_GIBBS_MEAN = (0.0, 0.0)
PAPER_GIBBS_COV = ((15.5, 14.5), (14.5, 15.5))
GIBBS_BURN_IN = 500
AR_BURN_IN = 200
BLOWUP = 1e6


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _check_cov(cov) -> np.ndarray:
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (2, 2) or not np.allclose(cov, cov.T):
        raise ValueError("covariance must be a symmetric 2x2 matrix")
    if np.linalg.eigvalsh(cov).min() <= 0:
        raise ValueError("covariance must be positive definite")
    return cov


def gen_gibbs_normal(n: int, mean=PAPER_GIBBS_MEAN, cov=PAPER_GIBBS_COV, thin: int = 1,
                     seed=None, burn_in: int = GIBBS_BURN_IN) -> np.ndarray:
    """Systematic-scan Gibbs chain targeting a bivariate normal.

    One scan updates coordinate 0 then coordinate 1 from their exact
    conditionals. The chain starts at the mean, discards ``burn_in`` scans
    and keeps every ``thin``-th scan afterwards.
    """
    cov = _check_cov(cov)
    if thin < 1:
        raise ValueError("thin must be >= 1")
    mu = np.asarray(mean, dtype=float)
    rng = _rng(seed)
    b01 = cov[0, 1] / cov[1, 1]
    b10 = cov[0, 1] / cov[0, 0]
    s0 = np.sqrt(cov[0, 0] - cov[0, 1] * b01)
    s1 = np.sqrt(cov[1, 1] - cov[0, 1] * b10)
    total = burn_in + n * thin
    eps = rng.standard_normal((total, 2))
    x0, x1 = mu
    out = np.empty((n, 2))
    k = 0
    for t in range(total):
        x0 = mu[0] + b01 * (x1 - mu[1]) + s0 * eps[t, 0]
        x1 = mu[1] + b10 * (x0 - mu[0]) + s1 * eps[t, 1]
        if t >= burn_in and (t - burn_in + 1) % thin == 0:
            out[k] = x0, x1
            k += 1
    return out


def gen_iid_normal(n: int, mean=PAPER_GIBBS_MEAN, cov=PAPER_GIBBS_COV, seed=None) -> np.ndarray:
    cov = np.asarray(cov, dtype=float)
    mean = np.asarray(mean, dtype=float)
    if cov.ndim == 0:
        return mean + np.sqrt(cov) * _rng(seed).standard_normal((n, mean.size or 1))
    chol = np.linalg.cholesky(cov)
    return mean + _rng(seed).standard_normal((n, cov.shape[0])) @ chol.T


def gen_pitch_sound(num_periods: int, d: int = 20, sigma_frac: float = 0.1, lam: float = 0.8,
                    seed=None, j_max: int = 2) -> np.ndarray:
    """Quasi-periodic sound, one period of ``d`` samples per observation.

    A latent pattern ``a_i`` follows a stationary vector AR(1),
    ``a_i = lam a_{i-1} + sqrt(1 - lam^2) eps_i``, and observation ``i`` is
    the Gaussian-smoothed superposition of the patterns of periods
    ``i - j_max .. i + j_max``. The period length is 1 and the sample grid
    is ``t_r = (r - 1) / d``.
    """
    if d < 2 or not 0.0 < lam < 1.0 or sigma_frac <= 0 or num_periods < 1 or j_max < 0:
        raise ValueError("invalid pitch-sound parameters")
    core, back, fwd = _rng(seed).spawn(3)
    s = np.sqrt(1.0 - lam**2)
    # periods 0..num_periods-1 come from one stream and the padding periods on
    # either side from their own, so j_max does not perturb the core draws;
    # the Gaussian AR(1) is time reversible, so backward extension is exact
    a = np.empty((num_periods + 2 * j_max, d))
    a[j_max] = core.standard_normal(d)
    innov = core.standard_normal((num_periods - 1, d)) * s
    for i in range(1, num_periods):
        a[j_max + i] = lam * a[j_max + i - 1] + innov[i - 1]
    back_innov = back.standard_normal((j_max, d)) * s
    fwd_innov = fwd.standard_normal((j_max, d)) * s
    for k in range(j_max):
        a[j_max - 1 - k] = lam * a[j_max - k] + back_innov[k]
        a[j_max + num_periods + k] = lam * a[j_max + num_periods + k - 1] + fwd_innov[k]
    t = np.arange(d) / d
    diff = t[:, None] - t[None, :]
    X = np.zeros((num_periods, d))
    for delta in range(-j_max, j_max + 1):
        G = np.exp(-((diff - delta) ** 2) / (2.0 * sigma_frac**2))
        X += a[j_max + delta: j_max + delta + num_periods] @ G.T
    return X


def gen_extinct_gaussian_pair(n: int, ar: float = 0.5, extinction_radius: float = 1.0, seed=None,
                              burn_in: int = AR_BURN_IN):
    """Two AR(1) chains whose joint innovations avoid a disc around the origin.

    Innovation pairs are standard bivariate normal draws, redrawn while
    ``eps^2 + eta^2 <= radius^2``. Removing the disc couples the two
    innovations, so a larger radius means stronger cross dependence; with
    radius 0 the chains are independent.
    """
    if not 0.0 <= ar < 1.0 or extinction_radius < 0:
        raise ValueError("need 0 <= ar < 1 and extinction_radius >= 0")
    rng = _rng(seed)
    total = n + burn_in
    r2 = extinction_radius**2
    kept = np.empty((0, 2))
    while kept.shape[0] < total:
        draw = rng.standard_normal((2 * (total - kept.shape[0]) + 16, 2))
        if r2 > 0:
            draw = draw[(draw**2).sum(axis=1) > r2]
        kept = np.vstack([kept, draw])
    innov = kept[:total]
    Z = np.empty((total, 2))
    prev = np.zeros(2)
    for t in range(total):
        prev = ar * prev + innov[t]
        Z[t] = prev
    Z = Z[burn_in:]
    return Z[:, :1], Z[:, 1:]


def gen_vec_pair(n: int, coupling: float = 0.45, seed=None, literal: bool = False,
                 burn_in: int = AR_BURN_IN):
    """Pair sharing a common conditional variance.

    ``s_t = 1 + coupling (X_{t-1}^2 + Y_{t-1}^2)`` and by default
    ``X_t = eps_1 sqrt(s_t)``, ``Y_t = eps_2 sqrt(s_t)`` (a bivariate ARCH(1),
    stationary for ``coupling < 0.5``). With ``literal=True`` the
    observations are multiplied by ``s_t`` itself; that recursion diverges
    almost surely and raises once ``|X_t|`` exceeds 1e6.
    """
    if not 0.0 <= coupling <= 0.45:
        raise ValueError("coupling must lie in [0, 0.45]")
    rng = _rng(seed)
    total = n + burn_in
    eps = rng.standard_normal((total, 2))
    out = np.empty((total, 2))
    x = y = 0.0
    for t in range(total):
        s = 1.0 + coupling * (x * x + y * y)
        amp = s if literal else np.sqrt(s)
        x, y = eps[t, 0] * amp, eps[t, 1] * amp
        if abs(x) > BLOWUP or abs(y) > BLOWUP:
            raise FloatingPointError(f"VEC recursion diverged at t={t - burn_in}")
        out[t] = x, y
    out = out[burn_in:]
    return out[:, :1], out[:, 1:]


def gen_oscillator_pair(n: int, C: float = 0.4, f1: float = 4.0, f2: float = 20.0, Ts: float = 0.01,
                        seed=None):
    """Phase-noise oscillators; ``Y``'s amplitude is modulated by ``X``'s phase when ``C != 0``."""
    if Ts <= 0:
        raise ValueError("Ts must be positive")
    rng = _rng(seed)
    eps = rng.standard_normal((n, 2))
    phi1 = np.cumsum(0.1 * eps[:, 0] + 2 * np.pi * f1 * Ts)
    phi2 = np.cumsum(0.1 * eps[:, 1] + 2 * np.pi * f2 * Ts)
    X = np.cos(phi1)
    Y = (2.0 + C * np.sin(phi1)) * np.cos(phi2)
    return X[:, None], Y[:, None]


def gen_ar1(n: int, ar: float = 0.5, seed=None, burn_in: int = AR_BURN_IN) -> np.ndarray:
    if not -1.0 < ar < 1.0:
        raise ValueError("AR coefficient must lie in (-1, 1)")
    rng = _rng(seed)
    eps = rng.standard_normal(n + burn_in)
    out = np.empty(n + burn_in)
    prev = 0.0
    for t in range(n + burn_in):
        prev = ar * prev + eps[t]
        out[t] = prev
    return out[burn_in:, None]


def gen_ar1_pair(n: int, ar: float = 0.5, seed=None):
    """Two independent AR(1) series driven by separate child streams."""
    rng = _rng(seed)
    sx, sy = rng.spawn(2)
    return gen_ar1(n, ar, sx), gen_ar1(n, ar, sy)


def gen_white_noise_pair(n: int, seed=None):
    rng = _rng(seed)
    return rng.standard_normal((n, 1)), rng.standard_normal((n, 1))


GENERATORS = {
    "gibbs": gen_gibbs_normal,
    "iid-normal": gen_iid_normal,
    "pitch": gen_pitch_sound,
    "extinct-gaussian": gen_extinct_gaussian_pair,
    "vec": gen_vec_pair,
    "oscillator": gen_oscillator_pair,
    "ar1-pair": gen_ar1_pair,
    "white-noise-pair": gen_white_noise_pair,
}
