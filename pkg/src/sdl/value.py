"""Reference value function of the window test and the error estimate.

Under the constant reference control v = -1 the state at the horizon is
Gaussian, Z^{s,x}(T) ~ Normal(x - (T-s), T-s), so the value function

    v_tilde(s, x) = E[J_{h,k}(Z^{s,x}(T))],    J_{h,k} = 1_[k,k+h] - 1_[0,h],

is the Gaussian window probability window_N evaluated at mu = x - (T-s),
sigma = sqrt(T-s). It solves the backward equation

    d_s v - d_x v + (1/2) d_xx v = 0,

which kolmogorov_residual certifies from the closed-form derivatives. For
any admissible control u with |u| <= 1,

    E[J_{h,k}(X^x_u(T))] <= v_tilde(0, x)
        + 2 * int_0^T beta0(s, 1) * [v_tilde(s, b(s)) - v_tilde(s, a(s))] ds,

where a(s) < b(s) are the zeros of d_x v_tilde(s, .): the time integral
collects |d_x v_tilde| over the region where the reference control disagrees
with -sgn(d_x v_tilde), weighted by the density upper bound beta0. error_rhs
evaluates this bound ("tight") together with its closed-form relaxation
through the window sup bound ("loose").
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import ndtr

from ._validate import check_finite_real, check_positive
from .errors import BracketFailure, InvalidConfig
from .normal import (
    HolderOrder,
    NormalParams,
    WindowPair,
    _window_zeros_std_batch,
    phi_holder_constant,
    window_N,
    window_N_bound,
    window_N_prime,
)

__all__ = [
    "ValueQuery",
    "v_tilde",
    "v_tilde_dx",
    "kolmogorov_residual",
    "mismatch_zeros",
    "ErrorBound",
    "error_rhs",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)

# Minimum distance to the horizon for pointwise derivative evaluations; the
# closed forms lose relative precision as tau -> 0 while the quantities
# themselves degenerate (Gaussian collapses onto a point mass).
_MIN_TAU = 1e-6


@dataclass(frozen=True)
class ValueQuery:
    """Point (s, x) with horizon T and window w; requires 0 <= s < T."""

    s: float
    x: float
    T: float
    w: WindowPair

    def __post_init__(self):
        T = check_positive(self.T, "T")
        s = check_finite_real(self.s, "s")
        x = check_finite_real(self.x, "x")
        if not 0.0 <= s < T:
            raise InvalidConfig(f"need 0 <= s < T, got s={s}, T={T}")
        if not isinstance(self.w, WindowPair):
            raise InvalidConfig("w must be a WindowPair")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "T", T)

    @property
    def tau(self) -> float:
        """Time to the horizon, T - s."""
        return self.T - self.s

    def params(self) -> NormalParams:
        """Law of Z^{s,x}(T) - x: Normal(-(T-s), sqrt(T-s))."""
        return NormalParams(mu=-self.tau, sigma=math.sqrt(self.tau))


def v_tilde(q: ValueQuery) -> float:
    """E[J_{h,k}(Z^{s,x}(T))] under the reference control; |v_tilde| <= 1."""
    return float(window_N(q.x, q.params(), q.w))


def v_tilde_dx(q: ValueQuery) -> float:
    """Spatial derivative of v_tilde; negative-positive-negative in x."""
    return float(window_N_prime(q.x, q.params(), q.w))


def mismatch_zeros(q: ValueQuery) -> tuple[float, float]:
    """Zeros a < b of x -> v_tilde_dx(s, x) at fixed s.

    On (a, b) the derivative is positive, so there the reference control -1
    disagrees with -sgn(d_x v_tilde); with sgn(0) = -1 the endpoints belong
    to the agreement region.
    """
    sigma = math.sqrt(q.tau)
    a_std, b_std = _window_zeros_std_batch(
        np.array([q.w.h / sigma]), np.array([q.w.k / sigma])
    )
    # x = sigma * u - mu with mu = -(T - s)
    return sigma * float(a_std[0]) + q.tau, sigma * float(b_std[0]) + q.tau


def _derivative_terms(q: ValueQuery) -> tuple[float, float, float]:
    """Closed-form (d_s, d_x, d_xx) of v_tilde at q.

    v_tilde = sum_c sign_c * Phi(u_c) with u_c = (c - x + tau)/sqrt(tau) over
    c in {h+k, k, h, 0}, signs (+, -, -, +); differentiate u_c and apply the
    chain rule (Phi' = phi, phi'(z) = -z phi(z)).
    """
    tau = q.tau
    rt = math.sqrt(tau)
    cs = np.array([q.w.h + q.w.k, q.w.k, q.w.h, 0.0])
    signs = np.array([1.0, -1.0, -1.0, 1.0])
    u = (cs - q.x + tau) / rt
    pdf = np.exp(-0.5 * u * u) / _SQRT_2PI
    d_s = float(np.sum(signs * pdf * ((cs - q.x) / (2.0 * tau * rt) - 0.5 / rt)))
    d_x = float(np.sum(signs * pdf * (-1.0 / rt)))
    d_xx = float(np.sum(signs * pdf * (-u) / tau))
    return d_s, d_x, d_xx


def kolmogorov_residual(q: ValueQuery, v_drift: float = -1.0) -> float:
    """|d_s v + v_drift * d_x v + (1/2) d_xx v| from closed-form derivatives.

    For the reference drift v_drift = -1 the four Gaussian terms cancel
    identically and only rounding remains (< 1e-8 away from the horizon);
    a wrong drift leaves |(v_drift + 1) * d_x v_tilde|. Requires
    T - s >= 1e-6 so the closed forms stay well conditioned.
    """
    v_drift = check_finite_real(v_drift, "v_drift")
    if q.tau < _MIN_TAU:
        raise InvalidConfig(
            f"kolmogorov_residual needs T - s >= {_MIN_TAU}, got {q.tau}"
        )
    d_s, d_x, d_xx = _derivative_terms(q)
    return abs(d_s + v_drift * d_x + 0.5 * d_xx)


class ErrorBound(NamedTuple):
    """Upper bounds on E[J_{h,k}(X^x_u(T))]; tight <= loose up to quadrature.

    When the mismatch quadrature cannot locate the zeros of d_x v_tilde,
    `tight` falls back to the value of `loose` (the two entries then agree
    exactly and `fallback` is True).
    """

    tight: float
    loose: float
    fallback: bool = False


def _v_tilde_batch(s: np.ndarray, x: np.ndarray, T: float, w: WindowPair) -> np.ndarray:
    tau = T - s
    rt = np.sqrt(tau)
    return (
        ndtr((w.k + w.h - x + tau) / rt)
        - ndtr((w.k - x + tau) / rt)
        - ndtr((w.h - x + tau) / rt)
        + ndtr((-x + tau) / rt)
    )


def _value_gap(s: np.ndarray, T: float, w: WindowPair) -> np.ndarray:
    """v_tilde(s, b(s)) - v_tilde(s, a(s)) across an array of times s."""
    sigma = np.sqrt(T - s)
    a_std, b_std = _window_zeros_std_batch(w.h / sigma, w.k / sigma)
    tau = T - s
    xa = sigma * a_std + tau
    xb = sigma * b_std + tau
    return _v_tilde_batch(s, xb, T, w) - _v_tilde_batch(s, xa, T, w)


def _gauss_panels(f, a: float, b: float, n_panels: int, nodes: int = 8) -> float:
    """Composite Gauss-Legendre quadrature of a vectorized integrand."""
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(a, b, n_panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    pts = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    vals = f(pts).reshape(n_panels, nodes)
    return float(np.sum((vals @ wg) * half))


def error_rhs(T: float, w: WindowPair, x: float, alpha, n_panels: int = 512) -> ErrorBound:
    """Upper bounds on E[J_{h,k}(X^x_u(T))] over all controls with |u| <= 1.

    tight = v_tilde(0,x) + 2 * int_0^T beta0(s,1) * [v_tilde(s,b(s)) -
    v_tilde(s,a(s))] ds, the integral taken over the sign-mismatch region of
    the reference control. loose replaces the value gap by its ceiling, twice
    the sup bound |v_tilde(s,.)| <= h k^alpha phc(alpha) (T-s)^(-(1+alpha)/2)
    (the gap is a difference of a positive and a negative value, each at most
    the sup in magnitude), giving the closed form

        loose = v_tilde(0,x)
                + 4 h k^alpha phi_holder_constant(alpha)
                  * int_0^T beta0(s,1) (T-s)^(-(1+alpha)/2) ds,

    so loose - v_tilde(0,x) equals h * k^alpha * (c_alpha_unit(T, alpha) -
    its first term). Requires alpha in (0, 1).

    Quadrature: the integrand has an s^(-1/2) singularity at s = 0 (through
    beta0), removed by substituting s = v^2 on [0, T/2]; the slice
    [T - delta, T] with delta = 1e-6 * T, where the zeros approach their
    degenerate limits, is covered by the analytic tail bound
    2 * beta0(T-delta, 1) * delta * min(2, 2 * sup|v_tilde|), keeping the
    result an upper bound. n_panels Gauss-Legendre panels (8 nodes each) are
    split evenly between the two halves.
    """
    from .constants import beta_time_integral

    T = check_positive(T, "T")
    x = check_finite_real(x, "x")
    a = alpha.alpha if isinstance(alpha, HolderOrder) else HolderOrder(alpha).alpha
    if not isinstance(w, WindowPair):
        raise InvalidConfig("w must be a WindowPair")
    if n_panels < 2:
        raise InvalidConfig(f"n_panels must be >= 2, got {n_panels}")

    v0 = v_tilde(ValueQuery(s=0.0, x=x, T=T, w=w))

    integral, _ = beta_time_integral(T, a)
    loose = v0 + 4.0 * w.h * w.k**a * phi_holder_constant(a) * integral

    delta = 1e-6 * T
    half_panels = max(1, n_panels // 2)

    def left(v: np.ndarray) -> np.ndarray:
        # s = v^2: ds = 2v dv cancels the 1/sqrt(s) singularity of beta0,
        # leaving beta0(v^2, 1) * 2v = 2 phi(v) + 2 v Phi(v).
        s = v * v
        weight = 2.0 * np.exp(-0.5 * s) / _SQRT_2PI + 2.0 * v * ndtr(v)
        return weight * _value_gap(s, T, w)

    def right(s: np.ndarray) -> np.ndarray:
        rs = np.sqrt(s)
        beta0 = np.exp(-0.5 * s) / (_SQRT_2PI * rs) + ndtr(rs)
        return beta0 * _value_gap(s, T, w)

    try:
        mismatch = _gauss_panels(left, 0.0, math.sqrt(T / 2.0), half_panels)
        mismatch += _gauss_panels(right, T / 2.0, T - delta, half_panels)
    except BracketFailure:
        return ErrorBound(tight=loose, loose=loose, fallback=True)

    # Tail slice [T - delta, T]: |gap| <= 2 sup|v_tilde| and beta0(., 1) is
    # strictly decreasing, so its value at T - delta dominates the slice.
    gap_cap = min(2.0, 2.0 * window_N_bound(w, a, math.sqrt(delta)))
    rd = math.sqrt(T - delta)
    beta_at = math.exp(-0.5 * (T - delta)) / (_SQRT_2PI * rd) + float(ndtr(rd))
    tail = beta_at * delta * gap_cap

    tight = v0 + 2.0 * (mismatch + tail)
    return ErrorBound(tight=tight, loose=loose, fallback=False)
