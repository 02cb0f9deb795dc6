"""Tests for the reference value function and the control-error bound."""

import math

import numpy as np
import pytest
from scipy.special import ndtr

from sdl.constants import beta_time_integral, c_alpha_unit
from sdl.errors import InvalidConfig
from sdl.normal import NormalParams, WindowPair, phi_holder_constant, window_N_prime
from sdl.value import (
    ErrorBound,
    ValueQuery,
    error_rhs,
    kolmogorov_residual,
    mismatch_zeros,
    v_tilde,
    v_tilde_dx,
)

from _oracles import central_difference

W11 = WindowPair(h=1.0, k=1.0)


class TestValueQuery:
    def test_time_ordering_enforced(self):
        with pytest.raises(InvalidConfig):
            ValueQuery(s=1.0, x=0.0, T=1.0, w=W11)
        with pytest.raises(InvalidConfig):
            ValueQuery(s=-0.1, x=0.0, T=1.0, w=W11)
        with pytest.raises(InvalidConfig):
            ValueQuery(s=0.0, x=0.0, T=0.0, w=W11)

    def test_window_type_enforced(self):
        with pytest.raises(InvalidConfig):
            ValueQuery(s=0.0, x=0.0, T=1.0, w=(1.0, 1.0))

    def test_tau_and_params(self):
        q = ValueQuery(s=0.25, x=0.3, T=1.0, w=W11)
        assert q.tau == 0.75
        p = q.params()
        assert p.mu == -0.75
        assert p.sigma == math.sqrt(0.75)


class TestValueFunction:
    def test_matches_gaussian_cdf_sum(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            s = rng.uniform(0.0, 0.9)
            x = rng.uniform(-3.0, 3.0)
            h = rng.uniform(0.1, 1.5)
            k = rng.uniform(0.1, 1.5)
            w = WindowPair(h=min(h, k), k=max(h, k))
            q = ValueQuery(s=s, x=x, T=1.0, w=w)
            tau = 1.0 - s
            rt = math.sqrt(tau)
            expected = (
                ndtr((w.k + w.h - x + tau) / rt)
                - ndtr((w.k - x + tau) / rt)
                - ndtr((w.h - x + tau) / rt)
                + ndtr((-x + tau) / rt)
            )
            assert v_tilde(q) == pytest.approx(expected, abs=1e-14)

    def test_bounded_by_one(self):
        for x in np.linspace(-6.0, 6.0, 49):
            q = ValueQuery(s=0.0, x=float(x), T=1.0, w=W11)
            assert abs(v_tilde(q)) <= 1.0

    def test_derivative_matches_finite_difference(self):
        for (s, x) in [(0.0, 0.0), (0.3, 1.2), (0.7, -0.8), (0.0, 2.5)]:
            q = ValueQuery(s=s, x=x, T=1.0, w=W11)
            fd = central_difference(
                lambda y: v_tilde(ValueQuery(s=s, x=y, T=1.0, w=W11)), x, 1e-5
            )
            assert v_tilde_dx(q) == pytest.approx(fd, abs=1e-7)

    def test_derivative_is_window_prime(self):
        q = ValueQuery(s=0.2, x=0.5, T=1.0, w=W11)
        assert v_tilde_dx(q) == float(window_N_prime(0.5, q.params(), W11))


class TestKolmogorovResidual:
    def test_reference_drift_cancels(self):
        rng = np.random.default_rng(37)
        for _ in range(30):
            q = ValueQuery(
                s=float(rng.uniform(0.0, 0.95)),
                x=float(rng.uniform(-3.0, 3.0)),
                T=1.0,
                w=WindowPair(h=0.5, k=2.0),
            )
            assert kolmogorov_residual(q) < 1e-8

    def test_wrong_drift_detected(self):
        q = ValueQuery(s=0.2, x=0.9, T=1.0, w=W11)
        res = kolmogorov_residual(q, v_drift=0.5)
        assert res == pytest.approx(abs(1.5 * v_tilde_dx(q)), rel=1e-9)
        assert res > 1e-3

    def test_horizon_guard(self):
        q = ValueQuery(s=1.0 - 1e-9, x=0.0, T=1.0, w=W11)
        with pytest.raises(InvalidConfig):
            kolmogorov_residual(q)


class TestMismatchZeros:
    def test_zeros_are_derivative_roots(self):
        for (s, w) in [(0.0, W11), (0.4, WindowPair(h=0.5, k=2.0)),
                       (0.8, WindowPair(h=0.1, k=0.3))]:
            q = ValueQuery(s=s, x=0.0, T=1.0, w=w)
            a, b = mismatch_zeros(q)
            assert a < b
            assert abs(v_tilde_dx(ValueQuery(s=s, x=a, T=1.0, w=w))) < 1e-10
            assert abs(v_tilde_dx(ValueQuery(s=s, x=b, T=1.0, w=w))) < 1e-10

    def test_derivative_positive_between(self):
        q = ValueQuery(s=0.3, x=0.0, T=1.0, w=W11)
        a, b = mismatch_zeros(q)
        mid = 0.5 * (a + b)
        assert v_tilde_dx(ValueQuery(s=0.3, x=mid, T=1.0, w=W11)) > 0.0
        assert v_tilde_dx(ValueQuery(s=0.3, x=a - 1.0, T=1.0, w=W11)) < 0.0
        assert v_tilde_dx(ValueQuery(s=0.3, x=b + 1.0, T=1.0, w=W11)) < 0.0


class TestErrorBound:
    def test_ordering(self):
        for (w, x, a) in [(W11, 0.0, 0.5), (WindowPair(h=0.5, k=1.0), 0.75, 0.3),
                          (WindowPair(h=0.1, k=0.5), 0.3, 0.9)]:
            out = error_rhs(1.0, w, x, a)
            assert isinstance(out, ErrorBound)
            assert not out.fallback
            assert out.tight <= out.loose + 1e-12
            v0 = v_tilde(ValueQuery(s=0.0, x=x, T=1.0, w=w))
            assert out.tight >= v0  # the mismatch integral is nonnegative

    def test_loose_closed_form(self):
        T, a = 1.0, 0.5
        w = WindowPair(h=0.5, k=1.0)
        out = error_rhs(T, w, 0.25, a)
        integral, _ = beta_time_integral(T, a)
        v0 = v_tilde(ValueQuery(s=0.0, x=0.25, T=T, w=w))
        assert out.loose == v0 + 4.0 * w.h * w.k**a * phi_holder_constant(a) * integral

    def test_loose_ties_to_holder_constant(self):
        # loose - v_tilde(0,x) = h * k^a * (c_alpha_unit - leading term)
        T, a = 2.0, 0.4
        w = WindowPair(h=0.3, k=0.8)
        out = error_rhs(T, w, -0.5, a)
        v0 = v_tilde(ValueQuery(s=0.0, x=-0.5, T=T, w=w))
        lead = phi_holder_constant(a) * T ** (-(1.0 + a) / 2.0)
        expected = w.h * w.k**a * (c_alpha_unit(T, a) - lead)
        assert out.loose - v0 == pytest.approx(expected, rel=1e-12)

    def test_x_enters_only_through_v0(self):
        T, a, w = 1.0, 0.5, W11
        outs = {x: error_rhs(T, w, x, a) for x in (0.0, 0.5, 2.0)}
        v0s = {x: v_tilde(ValueQuery(s=0.0, x=x, T=T, w=w)) for x in outs}
        gaps = [outs[x].tight - v0s[x] for x in outs]
        assert max(gaps) - min(gaps) < 1e-12

    def test_panel_refinement_stable(self):
        coarse = error_rhs(1.0, W11, 0.0, 0.5, n_panels=256)
        fine = error_rhs(1.0, W11, 0.0, 0.5, n_panels=1024)
        assert coarse.tight == pytest.approx(fine.tight, rel=1e-9)

    def test_validation(self):
        with pytest.raises(InvalidConfig):
            error_rhs(1.0, W11, 0.0, 1.5)
        with pytest.raises(InvalidConfig):
            error_rhs(1.0, W11, 0.0, 1.0)  # diverges at alpha = 1
        with pytest.raises(InvalidConfig):
            error_rhs(1.0, (1.0, 1.0), 0.0, 0.5)
        with pytest.raises(InvalidConfig):
            error_rhs(1.0, W11, 0.0, 0.5, n_panels=1)
