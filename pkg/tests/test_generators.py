import numpy as np
import pytest

from tempest.generators import (PAPER_GIBBS_COV, gen_ar1, gen_ar1_pair, gen_extinct_gaussian_pair,
                                gen_gibbs_normal, gen_iid_normal, gen_oscillator_pair, gen_pitch_sound,
                                gen_vec_pair, gen_white_noise_pair)
from tempest.hsic import hsic_stat
from tempest.kernels import KernelSpec, gram


def acf1(x):
    x = np.ravel(x) - np.mean(x)
    return float(np.dot(x[:-1], x[1:]) / np.dot(x, x))


def halves_close(x):
    # the i.i.d. bound 4 sd / sqrt(n/2) widened by the AR(1) long-run factor
    x = np.ravel(x)
    h = x.size // 2
    r = max(acf1(x), 0.0)
    return abs(x[:h].mean() - x[h:].mean()) < 4 * x.std() * np.sqrt((1 + r) / (1 - r)) / np.sqrt(h)


@pytest.fixture(scope="module")
def chain():
    return gen_gibbs_normal(100_000, seed=0)


class TestGibbs:
    def test_covariance(self, chain):
        np.testing.assert_allclose(np.cov(chain.T), PAPER_GIBBS_COV, atol=0.5)

    def test_slow_mixing(self, chain):
        assert acf1(chain[:, 0]) > 0.5

    def test_thinning_reduces_correlation(self):
        assert acf1(gen_gibbs_normal(20_000, thin=2, seed=1)[:, 0]) < acf1(gen_gibbs_normal(20_000, seed=1)[:, 0])

    def test_diagonal_cov_is_iid(self):
        Z = gen_gibbs_normal(20_000, mean=(1.0, -2.0), cov=((2.0, 0.0), (0.0, 0.5)), seed=2)
        assert abs(acf1(Z[:, 0])) < 0.03
        np.testing.assert_allclose(Z.mean(axis=0), [1.0, -2.0], atol=0.05)
        np.testing.assert_allclose(Z.var(axis=0), [2.0, 0.5], rtol=0.05)

    def test_non_pd(self):
        with pytest.raises(ValueError):
            gen_gibbs_normal(10, cov=((1.0, 2.0), (2.0, 1.0)))

    def test_stationary(self, chain):
        assert halves_close(chain[:, 0])


class TestPitch:
    def test_shape(self):
        assert gen_pitch_sound(50, seed=0).shape == (50, 20)

    def test_truncation_tail(self):
        a = gen_pitch_sound(40, sigma_frac=0.1, seed=3, j_max=2)
        b = gen_pitch_sound(40, sigma_frac=0.1, seed=3, j_max=4)
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-10)

    def test_near_frozen_pattern(self):
        X = gen_pitch_sound(100, lam=0.9999, seed=4)
        step = np.linalg.norm(np.diff(X, axis=0), axis=1).mean()
        assert step < 0.05 * np.linalg.norm(X, axis=1).mean()

    def test_invalid(self):
        with pytest.raises(ValueError):
            gen_pitch_sound(10, lam=1.0)
        with pytest.raises(ValueError):
            gen_pitch_sound(10, d=1)


class TestExtinctGaussian:
    def test_radius_zero_independent(self):
        X, Y = gen_extinct_gaussian_pair(20_000, 0.5, 0.0, seed=5)
        assert abs(np.corrcoef(X[:, 0], Y[:, 0])[0, 1]) < 0.03
        assert abs(np.corrcoef(X[:, 0] ** 2, Y[:, 0] ** 2)[0, 1]) < 0.03
        assert acf1(X) == pytest.approx(0.5, abs=0.03)

    def test_white_noise_limit(self):
        X, _ = gen_extinct_gaussian_pair(20_000, 0.0, 0.0, seed=6)
        assert abs(acf1(X)) < 0.03

    def test_dependence_grows_with_radius(self):
        k = KernelSpec("gaussian", 1.0)
        vals = []
        for r in (0.0, 1.0, 2.0):
            X, Y = gen_extinct_gaussian_pair(800, 0.0, r, seed=7)
            vals.append(hsic_stat(gram(k, X / X.std()), gram(k, Y / Y.std())))
        assert vals[0] < vals[1] < vals[2]

    def test_innovations_outside_disc(self):
        X, Y = gen_extinct_gaussian_pair(1000, 0.0, 1.5, seed=8)
        assert np.all(X[:, 0] ** 2 + Y[:, 0] ** 2 > 1.5**2)


class TestVec:
    def test_common_variance(self):
        X, Y = gen_vec_pair(5000, seed=9)
        assert abs(np.corrcoef(X[:, 0], Y[:, 0])[0, 1]) < 0.1
        assert np.corrcoef(X[:, 0] ** 2, Y[:, 0] ** 2)[0, 1] > 0.1

    def test_zero_coupling(self):
        X, Y = gen_vec_pair(20_000, coupling=0.0, seed=10)
        assert abs(np.corrcoef(X[:, 0] ** 2, Y[:, 0] ** 2)[0, 1]) < 0.03
        assert X.var() == pytest.approx(1.0, abs=0.05)

    def test_literal_recursion_diverges(self):
        with pytest.raises(FloatingPointError):
            gen_vec_pair(1000, seed=11, literal=True)

    def test_independent_copies(self):
        X, _ = gen_vec_pair(5000, seed=12)
        _, Y = gen_vec_pair(5000, seed=13)
        assert abs(np.corrcoef(X[:, 0] ** 2, Y[:, 0] ** 2)[0, 1]) < 0.06

    def test_stationary(self):
        X, _ = gen_vec_pair(20_000, seed=14)
        assert halves_close(X)


class TestOscillator:
    def test_bounds(self):
        X, Y = gen_oscillator_pair(5000, seed=15)
        assert np.all(np.abs(X) <= 1)
        assert np.all(np.abs(Y) <= 2.4)

    def test_decoupled(self):
        X, Y = gen_oscillator_pair(5000, C=0.0, seed=16)
        # with C = 0, Y is a pure function of the second phase
        phi2 = np.cumsum(0.1 * np.random.default_rng(16).standard_normal((5000, 2))[:, 1] + 2 * np.pi * 0.2)
        np.testing.assert_allclose(Y[:, 0], 2 * np.cos(phi2), atol=1e-9)

    def test_invalid(self):
        with pytest.raises(ValueError):
            gen_oscillator_pair(10, Ts=0.0)


class TestAr:
    def test_white_noise(self):
        assert abs(acf1(gen_ar1(20_000, 0.0, seed=17))) < 0.03

    def test_strong(self):
        assert acf1(gen_ar1(10_000, 0.9, seed=18)) == pytest.approx(0.9, abs=0.02)

    def test_pair_independent(self):
        X, Y = gen_ar1_pair(20_000, 0.5, seed=19)
        assert abs(np.corrcoef(X[:, 0], Y[:, 0])[0, 1]) < 0.05

    def test_stationary(self):
        assert halves_close(gen_ar1(20_000, 0.5, seed=20))

    def test_white_noise_pair(self):
        X, Y = gen_white_noise_pair(20_000, seed=21)
        assert abs(np.corrcoef(X[:, 0], Y[:, 0])[0, 1]) < 0.03


@pytest.mark.parametrize("fn,args", [
    (gen_gibbs_normal, (200,)), (gen_iid_normal, (200,)), (gen_pitch_sound, (30,)),
    (gen_extinct_gaussian_pair, (200,)), (gen_vec_pair, (200,)), (gen_oscillator_pair, (200,)),
    (gen_ar1_pair, (200,)), (gen_white_noise_pair, (200,)),
])
def test_deterministic(fn, args):
    a, b = fn(*args, seed=42), fn(*args, seed=42)
    a, b = (a if isinstance(a, tuple) else (a,)), (b if isinstance(b, tuple) else (b,))
    for u, v in zip(a, b):
        assert u.tobytes() == v.tobytes()
