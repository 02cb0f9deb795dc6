"""Window calculus: Gaussian helpers, the window expectation N, its
derivative structure, sup bounds, and zero finding."""

import math

import numpy as np
import pytest

from sdl import (
    HolderOrder,
    InvalidConfig,
    NormalParams,
    Phi,
    WindowPair,
    find_window_zeros,
    gaussian_product_integral,
    holder_interpolation,
    phi,
    phi_holder_constant,
    window_N,
    window_N_bound,
    window_N_prime,
)
from sdl.normal import _window_zeros_std_batch

from _oracles import FROZEN, central_difference

STD = NormalParams(mu=0.0, sigma=1.0)
W11 = WindowPair(h=1.0, k=1.0)


class TestTypes:
    def test_normal_params_requires_positive_sigma(self):
        with pytest.raises(InvalidConfig):
            NormalParams(mu=0.0, sigma=0.0)
        with pytest.raises(InvalidConfig):
            NormalParams(mu=0.0, sigma=-1.0)
        with pytest.raises(InvalidConfig):
            NormalParams(mu=math.nan, sigma=1.0)

    def test_window_pair_ordering(self):
        with pytest.raises(InvalidConfig):
            WindowPair(h=2.0, k=1.0)
        with pytest.raises(InvalidConfig):
            WindowPair(h=0.0, k=1.0)
        w = WindowPair(h=1.0, k=1.0)
        assert w.h == w.k == 1.0

    def test_holder_order_range(self):
        assert HolderOrder(1.0).alpha == 1.0
        with pytest.raises(InvalidConfig):
            HolderOrder(0.0)
        with pytest.raises(InvalidConfig):
            HolderOrder(1.2)


class TestGaussianHelpers:
    def test_frozen_values(self):
        assert phi(1.0) == pytest.approx(FROZEN["phi(1)"], abs=1e-15)
        assert Phi(1.0) == pytest.approx(FROZEN["Phi(1)"], abs=1e-15)
        assert Phi(2.0) == pytest.approx(FROZEN["Phi(2)"], abs=1e-15)

    def test_phi_holder_constant(self):
        assert phi_holder_constant(0.5) == pytest.approx(
            FROZEN["phi_holder_constant(0.5)"], abs=1e-15
        )
        # alpha = 1 reduces to the sharp Lipschitz constant max|phi'| = phi(1)
        assert phi_holder_constant(1.0) == pytest.approx(phi(1.0), abs=1e-15)

    def test_gaussian_product_integral_frozen_and_symmetry(self):
        assert gaussian_product_integral(1.0, 3.0, 0.0) == pytest.approx(
            FROZEN["gaussian_product_integral(1,3,0)"], abs=1e-15
        )
        assert gaussian_product_integral(2.0, 1.0, -1.0) == pytest.approx(
            gaussian_product_integral(2.0, -1.0, 1.0), abs=1e-16
        )
        # maximal on the diagonal
        assert gaussian_product_integral(1.5, 2.0, 2.0) > gaussian_product_integral(
            1.5, 2.0, 2.5
        )

    def test_holder_interpolation(self):
        assert holder_interpolation(2.0, 0.5, 0.5) == pytest.approx(1.0)
        assert holder_interpolation(3.0, 0.0, 0.7) == 0.0
        assert holder_interpolation(5.0, 2.0, 1.0) == pytest.approx(2.0)
        with pytest.raises(InvalidConfig):
            holder_interpolation(-1.0, 1.0, 0.5)


class TestWindowN:
    def test_frozen_value_at_zero(self):
        assert window_N(0.0, STD, W11) == pytest.approx(
            FROZEN["window_N(0; h=k=1, std)"], abs=1e-15
        )

    def test_matches_direct_probability_form(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            mu = float(rng.uniform(-2, 2))
            sigma = float(rng.uniform(0.2, 3))
            h = float(rng.uniform(0.05, 2))
            k = h + float(rng.uniform(0, 2))
            x = float(rng.uniform(-5, 5))
            p, w = NormalParams(mu=mu, sigma=sigma), WindowPair(h=h, k=k)
            direct = (
                Phi((k + h - x - mu) / sigma)
                - Phi((k - x - mu) / sigma)
                - (Phi((h - x - mu) / sigma) - Phi((-x - mu) / sigma))
            )
            assert window_N(x, p, w) == pytest.approx(direct, abs=5e-16)

    def test_vanishes_at_mirror_point_and_infinity(self):
        for (mu, sigma, h, k) in [(0.0, 1.0, 1.0, 1.0), (0.5, 2.0, 0.3, 1.7)]:
            p, w = NormalParams(mu=mu, sigma=sigma), WindowPair(h=h, k=k)
            mirror = (h + k) / 2.0 - mu
            assert abs(window_N(mirror, p, w)) < 1e-15
            assert abs(window_N(80.0, p, w)) < 1e-15
            assert abs(window_N(-80.0, p, w)) < 1e-15

    def test_prime_matches_central_differences(self):
        p, w = NormalParams(mu=0.3, sigma=1.4), WindowPair(h=0.6, k=1.1)
        for x in np.linspace(-4, 5, 19):
            fd = central_difference(lambda z: window_N(z, p, w), float(x), 1e-6)
            assert window_N_prime(float(x), p, w) == pytest.approx(fd, abs=2e-9)

    def test_bound_dominates_grid_sup(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            sigma = float(rng.uniform(0.3, 4))
            mu = float(rng.uniform(-3, 3))
            h = float(rng.uniform(0.05, 1.5))
            k = h + float(rng.uniform(0, 1.5))
            alpha = float(rng.uniform(0.1, 1.0))
            p, w = NormalParams(mu=mu, sigma=sigma), WindowPair(h=h, k=k)
            xs = np.linspace(-mu - 8 * sigma, h + k - mu + 8 * sigma, 2001)
            sup = float(np.max(np.abs(window_N(xs, p, w))))
            assert sup <= window_N_bound(w, alpha, sigma) + 1e-12


class TestWindowZeros:
    def test_residual_and_symmetry_std(self):
        for (h, k) in [(1.0, 1.0), (0.5, 2.0), (0.25, 0.25), (1.5, 1.5)]:
            w = WindowPair(h=h, k=k)
            a, b = find_window_zeros(STD, w)
            assert a < b
            assert abs(window_N_prime(a, STD, w)) < 1e-12
            assert abs(window_N_prime(b, STD, w)) < 1e-12
            assert a + b == pytest.approx(h + k, abs=1e-10)

    def test_general_params_roundtrip(self):
        p = NormalParams(mu=-0.7, sigma=2.3)
        w = WindowPair(h=0.4, k=1.9)
        a, b = find_window_zeros(p, w)
        assert abs(window_N_prime(a, p, w)) < 1e-12
        assert abs(window_N_prime(b, p, w)) < 1e-12
        # N falls to its minimum first (left zero), then rises to its maximum
        assert window_N(a, p, w) < 0.0 < window_N(b, p, w)

    def test_batch_matches_scalar(self):
        hs = np.array([0.3, 1.0, 2.0, 0.8])
        ks = np.array([0.9, 1.0, 2.5, 4.0])
        a_batch, b_batch = _window_zeros_std_batch(hs, ks)
        for i in range(hs.size):
            w = WindowPair(h=float(hs[i]), k=float(ks[i]))
            a, b = find_window_zeros(STD, w)
            assert a_batch[i] == pytest.approx(a, abs=1e-10)
            assert b_batch[i] == pytest.approx(b, abs=1e-10)

    def test_batch_asymptotic_fallback_consistent(self):
        # widely separated windows: the midpoint density underflows, so the
        # finder falls back to the asymptotic zeros h/2 and k + h/2
        a, b = _window_zeros_std_batch(np.array([10.0]), np.array([110.0]))
        assert a[0] == pytest.approx(5.0, abs=1e-8)
        assert b[0] == pytest.approx(115.0, abs=1e-8)
