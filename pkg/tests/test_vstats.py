import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from tempest.kernels import KernelSpec
from tempest.mmd import make_mmd_core
from tempest.vstats import Core, check_symmetry, v_naive, vb1_naive, vb2_naive

product = Core(2, lambda a, b: a * b)


def test_constant_core():
    c = Core(3, lambda *z: 2.5)
    assert v_naive(c, [1.0, 7.0, -3.0, 0.5]).value == pytest.approx(2.5)


def test_product_core_closed_form():
    # sum_i sum_j z_i z_j / n^2 = (mean z)^2
    assert v_naive(product, [1.0, 2.0, 3.0]).value == pytest.approx(4.0)


def test_normalized():
    v = v_naive(product, [1.0, 2.0, 3.0])
    assert v.normalized == pytest.approx(12.0)


def test_mmd_core_on_identical_pairs():
    core = make_mmd_core(KernelSpec("gaussian", 1.0))
    Z = [(np.array([x]), np.array([x])) for x in (0.1, -2.0, 0.7)]
    assert v_naive(core, Z).value == 0.0


def test_vb1_unit_and_zero_weights():
    Z = [0.5, -1.0, 2.0, 3.0]
    assert vb1_naive(product, Z, np.ones(4)).value == pytest.approx(v_naive(product, Z).value)
    assert vb1_naive(product, Z, np.zeros(4)).value == 0.0


def test_vb1_enumeration():
    # (1/4)(1*1*1 + 1*(-1)*2 + (-1)*1*2 + (-1)(-1)*4) = 1/4
    assert vb1_naive(product, [1.0, 2.0], [1.0, -1.0]).value == pytest.approx(0.25)


def test_vb2():
    assert vb2_naive(product, [1.0, 2.0, 4.0], np.full(3, 3.0)).value == pytest.approx(0.0, abs=1e-15)
    assert vb2_naive(product, [1.0, 2.0], [1.0, -1.0]).value == pytest.approx(0.25)
    w = np.array([0.5, -1.5, 1.0])
    Z = [2.0, -1.0, 0.3]
    assert vb2_naive(product, Z, w).value == pytest.approx(vb1_naive(product, Z, w).value)


def test_length_mismatch():
    with pytest.raises(ValueError, match="length"):
        vb1_naive(product, [1.0, 2.0], [1.0])


def test_budget():
    quartic = Core(4, lambda *z: 0.0)
    with pytest.raises(ValueError, match="budget"):
        v_naive(quartic, list(range(33)))


def test_tensor_path_matches_loop():
    rng = np.random.default_rng(0)
    Z = rng.normal(size=5)
    f = lambda a, b, c: a * b + b * c + a * c + a * b * c  # noqa: E731
    loop = Core(3, f)
    tens = Core(3, f, tensor=lambda z: np.einsum("i,j->ij", z, z)[:, :, None] * 0
                + (z[:, None, None] * z[None, :, None] + z[None, :, None] * z[None, None, :]
                   + z[:, None, None] * z[None, None, :]
                   + z[:, None, None] * z[None, :, None] * z[None, None, :]))
    w = rng.normal(size=5)
    assert vb1_naive(tens, Z, w).value == pytest.approx(vb1_naive(loop, Z, w).value, rel=1e-12)
    assert v_naive(tens, Z).value == pytest.approx(v_naive(loop, Z).value, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(arrays(float, 6, elements=st.floats(-5, 5)), st.randoms(use_true_random=False))
def test_permutation_invariance(Z, rnd):
    core = Core(3, lambda a, b, c: np.sin(a + b + c) + a * b * c)
    perm = list(range(6))
    rnd.shuffle(perm)
    assert v_naive(core, list(Z[perm])).value == pytest.approx(v_naive(core, list(Z)).value, abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(arrays(float, 5, elements=st.floats(-3, 3)), st.floats(-100, 100))
def test_vb2_shift_invariant(w, c):
    Z = [0.3, -1.2, 2.0, 0.1, 0.9]
    a = vb2_naive(product, Z, w).value
    b = vb2_naive(product, Z, w + c).value
    assert b == pytest.approx(a, rel=1e-12, abs=1e-12 * (1 + abs(c)) ** 2)


def test_symmetry_check():
    rng = np.random.default_rng(1)
    sym = Core(3, lambda a, b, c: a * b * c)
    asym = Core(3, lambda a, b, c: a - b + 2 * c)
    assert check_symmetry(sym, [1.0, 2.0, 3.0], rng)
    assert not check_symmetry(asym, [1.0, 2.0, 3.0], rng)
