"""Space transform reducing a diffusion with coefficient sigma to unit noise.

For dX = b dt + sigma(t, X) dW on a state interval (c, d) with sigma > 0,
the strictly increasing map

    F(t, x) = int_anchor^x dz / sigma(t, z)

turns Y = F(t, X) into a unit-diffusion process dY = u dt + dW with

    u(t) = b(t, X)/sigma(t, X) - (1/2) d_x sigma(t, X)
           - int_anchor^X d_t sigma(t, z) / sigma(t, z)^2 dz,

the last term vanishing for time-homogeneous sigma. Densities transport
back through rho_X(x) = rho_Y(F(x)) / sigma(x). Everything proved for
unit-noise processes with bounded drift (density sandwich, window bounds)
therefore transfers to X whenever u stays bounded, e.g. |b| <= K * sigma
with Lipschitz sigma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .._validate import check_finite_real
from ..errors import DomainError, InvalidConfig, QuadratureFailure

__all__ = [
    "DiffusionSpec",
    "lamperti_forward",
    "lamperti_inverse",
    "transformed_drift",
    "density_pushforward",
]

_QUAD_TOL = 1e-10
_FD_STEP = 1e-6  # central-difference step for missing sigma derivatives
_MAX_DOUBLINGS = 60


@dataclass(frozen=True)
class DiffusionSpec:
    """Coefficients of dX = drift dt + sigma dW on the interval `domain`.

    All callables take (t, x) and must be numpy-vectorized in x for the
    simulator (the transforms themselves only need scalars). `sigma_dx` /
    `sigma_dt` are optional; missing ones are replaced by central
    differences with step 1e-6 (about 11 accurate digits for smooth sigma).
    `anchor` is the base point where the transform vanishes, F(t, anchor)=0;
    set `time_dependent` when sigma genuinely depends on t so the extra
    drift term is included and the density pushforward is refused.
    """

    sigma: object
    drift: object = None
    sigma_dx: object = None
    sigma_dt: object = None
    domain: tuple = (-math.inf, math.inf)
    anchor: float = 0.0
    time_dependent: bool = False

    def __post_init__(self):
        if not callable(self.sigma):
            raise InvalidConfig("sigma must be callable")
        for name in ("drift", "sigma_dx", "sigma_dt"):
            fn = getattr(self, name)
            if fn is not None and not callable(fn):
                raise InvalidConfig(f"{name} must be callable or None")
        c, d = self.domain
        c, d = float(c), float(d)
        if not c < d:
            raise InvalidConfig(f"domain must be an interval (c, d), got ({c}, {d})")
        anchor = check_finite_real(self.anchor, "anchor")
        if not c < anchor < d:
            raise InvalidConfig(f"anchor {anchor} must lie inside ({c}, {d})")
        object.__setattr__(self, "domain", (c, d))
        object.__setattr__(self, "anchor", anchor)

    def sigma_at(self, t: float, x: float) -> float:
        """sigma(t, x) as a checked positive scalar."""
        s = float(self.sigma(t, x))
        if not (math.isfinite(s) and s > 0.0):
            raise InvalidConfig(f"sigma(t={t}, x={x}) = {s} is not positive finite")
        return s

    def sigma_dx_at(self, t: float, x: float) -> float:
        if self.sigma_dx is not None:
            return float(self.sigma_dx(t, x))
        h = _FD_STEP
        return (float(self.sigma(t, x + h)) - float(self.sigma(t, x - h))) / (2 * h)

    def sigma_dt_at(self, t: float, x: float) -> float:
        if not self.time_dependent:
            return 0.0
        if self.sigma_dt is not None:
            return float(self.sigma_dt(t, x))
        h = _FD_STEP
        return (float(self.sigma(t + h, x)) - float(self.sigma(t - h, x))) / (2 * h)


def _check_domain(spec: DiffusionSpec, x: float, what: str = "x") -> float:
    x = check_finite_real(x, what)
    c, d = spec.domain
    if not c < x < d:
        raise DomainError(f"{what}={x} outside the state interval ({c}, {d})")
    return x


def _quad_checked(fn, a: float, b: float, what: str) -> float:
    res = quad(fn, a, b, epsabs=_QUAD_TOL, epsrel=_QUAD_TOL, limit=200, full_output=1)
    if len(res) == 4:
        raise QuadratureFailure(f"{what}: {res[3].splitlines()[0]}")
    return float(res[0])


def lamperti_forward(spec: DiffusionSpec, x: float, t: float = 0.0) -> float:
    """F(t, x) = integral of 1/sigma(t, .) from the anchor to x.

    Strictly increasing in x; F(t, anchor) = 0. DomainError outside (c, d).
    """
    x = _check_domain(spec, x)
    if x == spec.anchor:
        return 0.0
    return _quad_checked(
        lambda z: 1.0 / spec.sigma_at(t, z), spec.anchor, x, "lamperti_forward"
    )


def _just_inside(limit: float, toward: float) -> float:
    return float(np.nextafter(limit, toward))


def lamperti_inverse(spec: DiffusionSpec, y: float, t: float = 0.0) -> float:
    """The x with F(t, x) = y; DomainError when y is outside F's range.

    Monotone bracketing (geometric expansion from the anchor, capped at the
    state interval) followed by Brent root-finding; round-trips with
    lamperti_forward to well below 1e-8.
    """
    y = check_finite_real(y, "y")
    if y == 0.0:
        return spec.anchor
    c, d = spec.domain
    limit = d if y > 0.0 else c
    sign = 1.0 if y > 0.0 else -1.0

    def gap(x: float) -> float:
        return lamperti_forward(spec, x, t) - y

    lo = spec.anchor  # gap(anchor) = -y*sign < 0 toward the target side
    hi = None
    step = 1.0
    for _ in range(_MAX_DOUBLINGS):
        cand = spec.anchor + sign * step
        hit_wall = not math.isfinite(cand) or (cand - limit) * sign >= 0.0
        if hit_wall:
            if math.isinf(limit):
                break
            cand = _just_inside(limit, spec.anchor)
            if (cand - lo) * sign <= 0.0:
                break
        g = gap(cand)
        if g * sign >= 0.0:
            hi = cand
            break
        lo = cand
        if hit_wall:
            break
        step *= 2.0
    if hi is None:
        raise DomainError(
            f"y={y} is outside the range of the transform on ({c}, {d})"
        )
    if lo > hi:
        lo, hi = hi, lo
    root = brentq(gap, lo, hi, xtol=1e-13, rtol=4.0 * np.finfo(float).eps, maxiter=200)
    return float(root)


def transformed_drift(spec: DiffusionSpec, t: float, x: float) -> float:
    """Drift of Y = F(t, X) at state x: b/sigma - sigma_x/2 - time term.

    The integral term int_anchor^x sigma_t / sigma^2 appears only for
    time-dependent sigma; for |b| <= K sigma and Lipschitz sigma the result
    is bounded by K + Lip(sigma)/2, which is what puts the transformed
    process into a bounded-drift unit-noise class.
    """
    x = _check_domain(spec, x)
    if spec.drift is None:
        raise InvalidConfig("spec.drift is required for transformed_drift")
    s = spec.sigma_at(t, x)
    u = float(spec.drift(t, x)) / s - 0.5 * spec.sigma_dx_at(t, x)
    if spec.time_dependent and x != spec.anchor:
        u -= _quad_checked(
            lambda z: spec.sigma_dt_at(t, z) / spec.sigma_at(t, z) ** 2,
            spec.anchor,
            x,
            "transformed_drift time term",
        )
    return u


def density_pushforward(rho_y, spec: DiffusionSpec, t: float = 0.0):
    """Transport a density of Y = F(X) back to X: x -> rho_y(F(x))/sigma(x).

    Requires a time-homogeneous spec (otherwise the map between the laws at
    a fixed time involves the time term and is not a pure pushforward).
    Returns a callable accepting scalars or arrays; mass is conserved
    because dF = dx / sigma(x).
    """
    if not callable(rho_y):
        raise InvalidConfig("rho_y must be callable")
    if spec.time_dependent:
        raise InvalidConfig("density_pushforward needs a time-homogeneous sigma")

    def density(x):
        arr = np.asarray(x, dtype=np.float64)
        flat = np.atleast_1d(arr)
        out = np.empty_like(flat)
        for i, xi in enumerate(flat):
            xi = _check_domain(spec, float(xi))
            F = lamperti_forward(spec, xi, t)
            out[i] = float(rho_y(F)) / spec.sigma_at(t, xi)
        return out if arr.ndim else float(out[0])

    return density
