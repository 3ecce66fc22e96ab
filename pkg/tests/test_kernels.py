import numpy as np
import pytest
from hypothesis import given, strategies as st
import mpmath as mp

from decaykit import kernels

rng = np.random.default_rng(7)


def test_lorentz_parity():
    x = rng.uniform(-20, 20, 500)
    args = (x, np.array([1.0, 5.0]), np.array([0.5, 0.1]), np.array([0.4, 0.6]))
    np.testing.assert_allclose(kernels.lorentz_sum_nb(*args), kernels.lorentz_sum_np(*args), rtol=1e-14)
    z = x + 0.3j
    args = (z, np.array([1.0, 5.0]), np.array([0.5, 0.1]), np.array([0.4, 0.6]))
    np.testing.assert_allclose(kernels.lorentz_sum_nb(*args), kernels.lorentz_sum_np(*args), rtol=1e-13)


def test_logderiv_and_product_parity():
    z = rng.uniform(-10, 10, 300) + 1j * rng.uniform(-3, 3, 300)
    zeros = np.array([2 + 0.5j, -2 + 0.5j])
    poles = zeros.conjugate()
    np.testing.assert_allclose(kernels.logderiv_sum_nb(z, zeros, poles),
                               kernels.logderiv_sum_np(z, zeros, poles), rtol=1e-13)
    np.testing.assert_allclose(kernels.rational_product_nb(z, zeros, poles),
                               kernels.rational_product_np(z, zeros, poles), rtol=1e-13)


def test_rational_product_unequal_counts():
    z = np.array([1.0 + 1j, 3.0 - 2j])
    zeros = np.zeros(0, dtype=complex)
    poles = np.array([5 - 0.5j])
    np.testing.assert_allclose(kernels.rational_product_np(z, zeros, poles), 1 / (z - poles[0]))
    np.testing.assert_allclose(kernels.rational_product_nb(z, zeros, poles), 1 / (z - poles[0]))


def test_unwrap_parity_and_branch():
    phase = np.cumsum(rng.uniform(-0.9, 0.9, 400))
    v = np.exp(1j * phase)
    p_nb, big_nb = kernels.unwrap_phase_nb(v)
    p_np, big_np = kernels.unwrap_phase_np(v.copy())
    np.testing.assert_allclose(p_nb, p_np, atol=1e-12)
    assert big_nb == pytest.approx(big_np)
    np.testing.assert_allclose(p_np - p_np[0], phase - phase[0], atol=1e-11)
    assert -np.pi < p_np[0] <= np.pi


def test_unwrap_negative_real_start():
    p, _ = kernels.unwrap_phase_nb(np.array([-1.0 + 0j, 1j]))
    assert p[0] == pytest.approx(np.pi)


@pytest.mark.parametrize("n", [1, 5, 24, 40])
def test_moments_parity(n):
    kappa = np.concatenate([[0.0, 1e-8, 0.3, 0.49, 0.5], rng.uniform(-80, 80, 200)])
    np.testing.assert_allclose(kernels.legendre_fourier_moments_nb(kappa, n),
                               kernels.legendre_fourier_moments_np(kappa, n), rtol=1e-10, atol=1e-15)


def _jn_mp(k, x):
    with mp.workdps(30):
        if x == 0:
            return 1.0 if k == 0 else 0.0
        x = mp.mpf(x)
        return float(mp.sqrt(mp.pi / (2 * x)) * mp.besselj(k + mp.mpf(1) / 2, x))


@given(x=st.floats(0.0, 200.0))
def test_spherical_bessel_against_mpmath(x):
    row = np.empty(24)
    kernels._sph_jn_row(x, 24, row)
    ref = np.array([_jn_mp(k, x) for k in range(24)])
    np.testing.assert_allclose(row, ref, rtol=1e-9, atol=1e-15)


def test_numpy_moments_tiny_argument():
    m = kernels.legendre_fourier_moments_np(np.array([5e-324, 0.0]), 4)
    np.testing.assert_allclose(m, [[2, 0, 0, 0], [2, 0, 0, 0]])


def test_moments_are_legendre_fourier_integrals():
    from numpy.polynomial import legendre as L
    x, w = L.leggauss(80)
    kappa = np.array([0.7, 6.0, 31.0])
    m = kernels.legendre_fourier_moments(kappa, 10)
    for i, k in enumerate(kappa):
        for deg in range(10):
            pk = L.legval(x, np.eye(10)[deg])
            assert m[i, deg] == pytest.approx(np.sum(w * pk * np.exp(1j * k * x)), abs=1e-13)
