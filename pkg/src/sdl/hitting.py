"""First-hitting-time densities of the origin under extremal unit drift.

For a start point x != 0, the two densities on s > 0 are

    rho_tau(x, s)   = |x| / sqrt(2*pi*s^3) * exp(-(|x| - s)^2 / (2*s))
    rho_theta(x, s) = |x| / sqrt(2*pi*s^3) * exp(-(|x| + s)^2 / (2*s))

(drift pushing toward, respectively away from, the origin). They differ by
the constant factor exp(-2|x|); rho_tau integrates to 1 over (0, inf) and
rho_theta to exp(-2|x|). Evaluation goes through the log form so that the
s^(-3/2) prefactor cannot overflow for small s.
"""

from __future__ import annotations

import math

import numpy as np

from ._validate import check_finite_real
from .errors import DomainError, InvalidConfig

__all__ = ["rho_tau", "rho_theta", "log_rho_tau", "log_rho_theta", "theta_mass"]

_LOG_2PI = math.log(2.0 * math.pi)


def _check_args(x, s):
    x = check_finite_real(x, "x")
    if x == 0.0:
        raise DomainError("hitting densities are degenerate at x = 0")
    s_arr = np.asarray(s, dtype=np.float64)
    if not np.all(np.isfinite(s_arr)):
        raise InvalidConfig("s must be finite")
    if not np.all(s_arr > 0.0):
        raise InvalidConfig("s must be > 0")
    return abs(x), s_arr


def log_rho_tau(x, s):
    """log of rho_tau(x, s); vectorized in s."""
    ax, s = _check_args(x, s)
    out = math.log(ax) - 0.5 * _LOG_2PI - 1.5 * np.log(s) - (ax - s) ** 2 / (2.0 * s)
    return out if out.ndim else float(out)


def log_rho_theta(x, s):
    """log of rho_theta(x, s); vectorized in s."""
    ax, s = _check_args(x, s)
    out = math.log(ax) - 0.5 * _LOG_2PI - 1.5 * np.log(s) - (ax + s) ** 2 / (2.0 * s)
    return out if out.ndim else float(out)


def rho_tau(x, s):
    """Hitting density under drift toward the origin; vectorized in s.

    Inverse-Gaussian density with mean |x| and shape x^2; total mass 1.
    Underflows cleanly to 0 far in the tails.
    """
    with np.errstate(under="ignore"):
        out = np.exp(log_rho_tau(x, s))
    return out if isinstance(out, np.ndarray) and out.ndim else float(out)


def rho_theta(x, s):
    """Hitting density under drift away from the origin; vectorized in s.

    Equals exp(-2|x|) * rho_tau(x, s); total mass exp(-2|x|) < 1 (the process
    may never hit the origin).
    """
    with np.errstate(under="ignore"):
        out = np.exp(log_rho_theta(x, s))
    return out if isinstance(out, np.ndarray) and out.ndim else float(out)


def theta_mass(x) -> float:
    """Total mass of rho_theta: exp(-2|x|)."""
    x = check_finite_real(x, "x")
    if x == 0.0:
        raise DomainError("hitting densities are degenerate at x = 0")
    return math.exp(-2.0 * abs(x))
