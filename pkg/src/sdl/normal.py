"""Gaussian window calculus.

The object of interest is the signed window probability

    N(x) = P(Z + x in [k, k+h]) - P(Z + x in [0, h]),      Z ~ Normal(mu, sigma),

for a window pair 0 < h <= k: the expected value of the test function
1_[k,k+h] - 1_[0,h] under a Gaussian shift. Everything downstream (the value
function, the error estimate, the Hölder constants) reduces to N, its
derivative, its sup bound h*k^alpha / (sqrt(2*pi*e^alpha) * sigma^(1+alpha)),
and the two zeros of N'.

Conventions: probabilities of intervals are evaluated as differences of Phi
at the standardized endpoints, and sgn(0) = -1 wherever a sign appears.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from ._validate import check_finite_real, check_positive
from .errors import BracketFailure, InvalidConfig

__all__ = [
    "NormalParams",
    "WindowPair",
    "HolderOrder",
    "phi",
    "Phi",
    "holder_interpolation",
    "phi_holder_constant",
    "gaussian_product_integral",
    "window_N",
    "window_N_prime",
    "window_N_bound",
    "find_window_zeros",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)

# Widening limit for root brackets, in units of sigma. Beyond roughly 38 sigma
# every phi term underflows and no widening can recover a sign change.
_MAX_WIDEN = 50.0


@dataclass(frozen=True)
class NormalParams:
    """Location/scale of a Gaussian; sigma must be strictly positive."""

    mu: float
    sigma: float

    def __post_init__(self):
        object.__setattr__(self, "mu", check_finite_real(self.mu, "mu"))
        object.__setattr__(self, "sigma", check_positive(self.sigma, "sigma"))


@dataclass(frozen=True)
class WindowPair:
    """Window widths 0 < h <= k defining 1_[k,k+h] - 1_[0,h]."""

    h: float
    k: float

    def __post_init__(self):
        object.__setattr__(self, "h", check_positive(self.h, "h"))
        object.__setattr__(self, "k", check_positive(self.k, "k"))
        if self.h > self.k:
            raise InvalidConfig(f"window pair needs h <= k, got h={self.h}, k={self.k}")


@dataclass(frozen=True)
class HolderOrder:
    """Hölder exponent alpha in (0, 1]."""

    alpha: float

    def __post_init__(self):
        a = check_finite_real(self.alpha, "alpha")
        if not 0.0 < a <= 1.0:
            raise InvalidConfig(f"alpha must lie in (0, 1], got {a!r}")
        object.__setattr__(self, "alpha", a)


def _alpha_value(alpha) -> float:
    if isinstance(alpha, HolderOrder):
        return alpha.alpha
    return HolderOrder(alpha).alpha


def phi(x):
    """Standard normal density, vectorized."""
    x = np.asarray(x, dtype=np.float64)
    out = np.exp(-0.5 * x * x) / _SQRT_2PI
    return out if out.ndim else float(out)


def Phi(x):
    """Standard normal distribution function, vectorized."""
    x = np.asarray(x, dtype=np.float64)
    out = ndtr(x)
    return out if out.ndim else float(out)


def holder_interpolation(bound: float, lipschitz: float, alpha) -> float:
    """Interpolated Hölder constant B^(1-alpha) * L^alpha.

    `bound` is a sup bound B of |f|-differences (or 2*sup|f|) and `lipschitz`
    a Lipschitz constant L of f; the product bounds the alpha-Hölder constant
    of f. Degenerate L = 0 gives 0 for alpha > 0.
    """
    a = _alpha_value(alpha)
    b = check_finite_real(bound, "bound")
    lip = check_finite_real(lipschitz, "lipschitz")
    if b < 0.0 or lip < 0.0:
        raise InvalidConfig("bound and lipschitz must be >= 0")
    if lip == 0.0:
        return 0.0
    return b ** (1.0 - a) * lip**a


def phi_holder_constant(alpha) -> float:
    """alpha-Hölder constant of the standard normal density: 1/sqrt(2*pi*e^alpha).

    At alpha = 1 this is phi(1) = max|phi'|, the sharp Lipschitz constant.
    """
    a = _alpha_value(alpha)
    return math.exp(-0.5 * a) / _SQRT_2PI


def gaussian_product_integral(sigma: float, y: float, z: float) -> float:
    """(1/sigma^2) * integral of phi((x-y)/sigma) * phi((x-z)/sigma) dx over R.

    Closed form: phi((y-z)/sqrt(2*sigma^2)) / sqrt(2*sigma^2). Symmetric in
    (y, z) and maximal at y = z.
    """
    s = check_positive(sigma, "sigma")
    y = check_finite_real(y, "y")
    z = check_finite_real(z, "z")
    s2 = math.sqrt(2.0) * s
    return phi((y - z) / s2) / s2


def _standardized(x, p: NormalParams, w: WindowPair):
    """Map to the unit problem: N_{h,k,p}(x) = N~_{h/s,k/s}((x+mu)/s)."""
    s = p.sigma
    return (np.asarray(x, dtype=np.float64) + p.mu) / s, w.h / s, w.k / s


def window_N(x, p: NormalParams, w: WindowPair):
    """Signed window probability N(x); vectorized in x.

    N(x) = P(Z+x in [k, k+h]) - P(Z+x in [0, h]) for Z ~ Normal(p.mu, p.sigma).
    Vanishes as x -> +-inf and at the mirror point x = (h+k)/2 - mu.
    """
    u, h, k = _standardized(x, p, w)
    out = ndtr(k + h - u) - ndtr(k - u) - ndtr(h - u) + ndtr(-u)
    return out if out.ndim else float(out)


def _nprime_std(u, h: float, k: float):
    z = np.asarray(u, dtype=np.float64)
    return (
        -np.exp(-0.5 * z * z)
        + np.exp(-0.5 * (z - h) ** 2)
        + np.exp(-0.5 * (z - k) ** 2)
        - np.exp(-0.5 * (z - h - k) ** 2)
    ) / _SQRT_2PI


def window_N_prime(x, p: NormalParams, w: WindowPair):
    """d/dx of window_N; vectorized in x.

    In standardized coordinates u = (x+mu)/sigma:
        N'(x) = (1/sigma) * [-phi(u) + phi(u-h/sigma) + phi(u-k/sigma)
                             - phi(u-(h+k)/sigma)].
    Strictly negative left of -mu-sigma and right of h+k-mu+sigma, with
    exactly two zeros in between.
    """
    u, h, k = _standardized(x, p, w)
    out = _nprime_std(u, h, k) / p.sigma
    return out if out.ndim else float(out)


def window_N_bound(w: WindowPair, alpha, sigma: float) -> float:
    """Sup bound on |window_N|: h * k^alpha / (sqrt(2*pi*e^alpha) * sigma^(1+alpha)).

    Valid for every mu; scales like sigma^-(1+alpha).
    """
    a = _alpha_value(alpha)
    s = check_positive(sigma, "sigma")
    return w.h * w.k**a * phi_holder_constant(a) / s ** (1.0 + a)


def _bisect_scalar(f, lo: float, hi: float) -> float:
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # interval collapsed to adjacent floats
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_window_zeros(p: NormalParams, w: WindowPair) -> tuple[float, float]:
    """Locate the two zeros a < b of window_N_prime by bisection.

    Brackets (standardized): a in [-1, (h+k)/2], b in [(h+k)/2, h+k+1], where
    N' is negative at the outer ends and strictly positive at the midpoint.
    Ends are widened outward if the sign is lost to underflow; if no sign
    change is found within 50 standard deviations, raises BracketFailure
    (windows tens of sigma wide make every phi term underflow).

    For mu = 0 the zeros satisfy a + b = h + k (N' is symmetric about (h+k)/2).
    """
    h, k = w.h / p.sigma, w.k / p.sigma
    f = lambda u: float(_nprime_std(u, h, k))
    center = 0.5 * (h + k)

    fc = f(center)
    if not fc > 0.0:
        raise BracketFailure(
            f"window_N_prime underflows at the bracket midpoint for h/sigma={h:g}, "
            f"k/sigma={k:g}; windows this wide relative to sigma are not resolvable"
        )

    lo = -1.0
    while not f(lo) < 0.0:
        lo -= 1.0
        if lo < -_MAX_WIDEN:
            raise BracketFailure("no sign change left of the window within 50 sigma")
    hi = h + k + 1.0
    while not f(hi) < 0.0:
        hi += 1.0
        if hi > h + k + _MAX_WIDEN:
            raise BracketFailure("no sign change right of the window within 50 sigma")

    a_std = _bisect_scalar(f, lo, center)
    b_std = _bisect_scalar(f, center, hi)
    # back to original coordinates: x = sigma*u - mu
    return p.sigma * a_std - p.mu, p.sigma * b_std - p.mu


def _window_zeros_std_batch(h: np.ndarray, k: np.ndarray, iters: int = 110):
    """Vectorized zeros of the standardized N' for arrays of (h, k).

    Lanes where the bracket midpoint value underflows to 0 (windows beyond
    ~38 sigma) fall back to the asymptotic zeros h/2 and k + h/2; there the
    cross terms of N' are below 1e-308 and the true zeros agree with the
    asymptotic ones to far below double precision.
    """
    h = np.asarray(h, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    center = 0.5 * (h + k)

    def f(u):
        return (
            -np.exp(-0.5 * u * u)
            + np.exp(-0.5 * (u - h) ** 2)
            + np.exp(-0.5 * (u - k) ** 2)
            - np.exp(-0.5 * (u - h - k) ** 2)
        )

    ok = (f(center) > 0.0) & (f(np.full_like(h, -1.0)) < 0.0)

    lo_a, hi_a = np.full_like(h, -1.0), center.copy()
    lo_b, hi_b = center.copy(), h + k + 1.0
    for _ in range(iters):
        mid = 0.5 * (lo_a + hi_a)
        pos = f(mid) > 0.0
        hi_a = np.where(pos, mid, hi_a)
        lo_a = np.where(pos, lo_a, mid)
        mid = 0.5 * (lo_b + hi_b)
        pos = f(mid) > 0.0
        lo_b = np.where(pos, mid, lo_b)
        hi_b = np.where(pos, hi_b, mid)

    a = np.where(ok, 0.5 * (lo_a + hi_a), 0.5 * h)
    b = np.where(ok, 0.5 * (lo_b + hi_b), k + 0.5 * h)
    return a, b
