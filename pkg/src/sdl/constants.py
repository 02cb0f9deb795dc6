"""Hölder constants of the density in space.

The unit-drift-bound constant on horizon T for exponent alpha in (0, 1) is

    c_alpha_unit(T, alpha) = 1/(sqrt(2*pi*e^alpha) * T^((1+alpha)/2))
        + (4/sqrt(2*pi*e^alpha)) * int_0^T beta0(s, 1) * (T-s)^(-(1+alpha)/2) ds,

with beta0(s, 1) = phi(sqrt(s))/sqrt(s) + Phi(sqrt(s)). For drift bound K the
constant follows by scaling:

    c_alpha_K(T, K, alpha) = K^(1+alpha) * c_alpha_unit(T*K^2, alpha).

The time integral has integrable endpoint singularities at both ends
(s^(-1/2) on the left through beta0, (T-s)^(-(1+alpha)/2) on the right). The
domain is split at T/2 and each half is substituted to a smooth integrand:
s = v^2 on the left, u = (T-s)^((1-alpha)/2) on the right, the unique power
that removes the right singularity exactly.
"""

from __future__ import annotations

import math

from scipy.integrate import quad
from scipy.special import ndtr

from ._validate import check_positive
from .errors import InvalidConfig, QuadratureFailure
from .normal import HolderOrder, phi_holder_constant

__all__ = ["ConstantQuery", "beta_time_integral", "c_alpha_unit", "c_alpha_K"]

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _alpha_strict(alpha) -> float:
    a = alpha.alpha if isinstance(alpha, HolderOrder) else HolderOrder(alpha).alpha
    if a >= 1.0:
        raise InvalidConfig(
            "the Hölder constant diverges as alpha -> 1; alpha must be < 1"
        )
    return a


def _quad_checked(f, a: float, b: float, what: str) -> tuple[float, float]:
    res = quad(f, a, b, epsabs=1e-10, epsrel=1e-8, limit=200, full_output=1)
    if len(res) == 4:
        raise QuadratureFailure(f"{what} did not converge: {res[3]}")
    return res[0], res[1]


def beta_time_integral(T: float, alpha) -> tuple[float, float]:
    """int_0^T beta0(s,1) * (T-s)^(-(1+alpha)/2) ds and its error estimate.

    This is the integral shared by c_alpha_unit and the loose form of the
    window-expectation error bound.
    """
    T = check_positive(T, "T")
    a = _alpha_strict(alpha)
    p = -(1.0 + a) / 2.0

    def left(v: float) -> float:
        # s = v^2: beta0(s,1)*ds becomes (2*phi(v) + 2*v*Phi(v)) dv, smooth at 0
        return (
            2.0 * math.exp(-0.5 * v * v) / _SQRT_2PI + 2.0 * v * float(ndtr(v))
        ) * (T - v * v) ** p

    expo = 2.0 / (1.0 - a)

    def right(u: float) -> float:
        # u = (T-s)^((1-alpha)/2): the Jacobian cancels the singular power exactly
        s = T - u**expo
        if s <= 0.0:
            s = 1e-300
        r = math.sqrt(s)
        b0 = math.exp(-0.5 * s) / (_SQRT_2PI * r) + float(ndtr(r))
        return (2.0 / (1.0 - a)) * b0

    v_left, e_left = _quad_checked(left, 0.0, math.sqrt(T / 2.0), "left half")
    v_right, e_right = _quad_checked(
        right, 0.0, (T / 2.0) ** ((1.0 - a) / 2.0), "right half"
    )
    return v_left + v_right, e_left + e_right


def c_alpha_unit(T: float, alpha) -> float:
    """Hölder constant of the density for drift bound 1 on horizon T."""
    T = check_positive(T, "T")
    a = _alpha_strict(alpha)
    pref = phi_holder_constant(a)
    integral, _ = beta_time_integral(T, a)
    return pref * T ** (-(1.0 + a) / 2.0) + 4.0 * pref * integral


def c_alpha_K(T: float, K: float, alpha) -> float:
    """Hölder constant for drift bound K: K^(1+alpha) * c_alpha_unit(T*K^2, alpha)."""
    T = check_positive(T, "T")
    K = check_positive(K, "K")
    a = _alpha_strict(alpha)
    return K ** (1.0 + a) * c_alpha_unit(T * K * K, a)


class ConstantQuery:
    """Bundle (T, K, alpha) for the CLI; values validated on construction."""

    def __init__(self, T: float, K: float, alpha: float):
        self.T = check_positive(T, "T")
        self.K = check_positive(K, "K")
        self.alpha = _alpha_strict(alpha)
