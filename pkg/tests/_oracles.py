"""Independent numerical routes and frozen high-precision values.

Everything here is computed by a different algorithm (or a different
library) than the package uses, so agreement is evidence, not tautology:

* frozen constants were evaluated with mpmath at 40 decimal digits;
* quadrature oracles use mpmath adaptive Gauss-Legendre or fixed composite
  rules in numpy, never scipy's QUADPACK that the package calls;
* derivatives are checked by central finite differences.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.polynomial.legendre import leggauss

SQRT_2PI = math.sqrt(2.0 * math.pi)

# mpmath, 40 significant digits
FROZEN = {
    "phi(1)": 0.2419707245191433498,
    "Phi(1)": 0.84134474606854294859,
    "Phi(2)": 0.9772498680518207928,
    "window_N(0; h=k=1, std)": -0.20543962408526510437,
    "alpha0(1,1)": 0.083315470587686298383,
    "beta0(1,1)": 1.0833154705876862984,
    "phi_holder_constant(0.5)": 0.31069656037692774487,
    "rho_theta(1,1)": 0.053990966513188051951,
    "gaussian_product_integral(1,3,0)": 0.029732572305907342883,
    "bound_at(1,1,1).lower": 0.031240834565008845,
    "bound_at(1,1,1).upper": 0.89894228040143268,
}

# mpmath, 40 digits, via the de-singularized legs (this session's rerun)
FROZEN_C_ALPHA = {
    (1.0, 0.5): 6.20626427265831843,
    (1.0, 0.3): 5.14147811961124912,
    (1.0, 0.7): 8.87993558465741725,
    (1.0, 0.9): 22.7482221280755536,
    (2.0, 0.5): 6.60867726750666063,
    (0.25, 0.5): 6.61441528196426578,
}

_GL_NODES, _GL_WEIGHTS = leggauss(12)


def gauss_panels(f, a: float, b: float, n_panels: int) -> float:
    """Composite 12-node Gauss-Legendre over uniform panels; f vectorized."""
    edges = np.linspace(a, b, n_panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1] - edges[0])
    z = mid[:, None] + half * _GL_NODES[None, :]
    vals = f(z)
    return float(np.sum(vals @ _GL_WEIGHTS) * half)


def phi_np(x):
    return np.exp(-0.5 * np.asarray(x, dtype=np.float64) ** 2) / SQRT_2PI


def Phi_np(x):
    from scipy.special import ndtr

    return ndtr(np.asarray(x, dtype=np.float64))


def c_alpha_unit_mp(T: float, alpha: float) -> float:
    """Second quadrature scheme: mpmath adaptive Gauss-Legendre on the two
    de-singularized legs of the envelope-time integral.

    The substitutions (s = v^2 near 0; u = (T-s)^((1-alpha)/2) near T) were
    derived independently for this oracle; the engine, precision, and node
    placement differ from the package's QUADPACK route.
    """
    import mpmath as mp

    with mp.workdps(25):
        Tm, am = mp.mpf(repr(float(T))), mp.mpf(repr(float(alpha)))
        p = -(1 + am) / 2

        def beta0(s):
            return mp.exp(-s / 2) / mp.sqrt(2 * mp.pi * s) + mp.ncdf(mp.sqrt(s))

        left = mp.quad(
            lambda v: (2 * mp.npdf(v) + 2 * v * mp.ncdf(v)) * (Tm - v * v) ** p,
            [0, mp.sqrt(Tm / 2)],
        )
        expo = 2 / (1 - am)
        right = mp.quad(
            lambda u: (2 / (1 - am)) * beta0(Tm - u**expo),
            [0, (Tm / 2) ** ((1 - am) / 2)],
        )
        phc = mp.exp(-am / 2) / mp.sqrt(2 * mp.pi)
        return float(phc * Tm**p + 4 * phc * (left + right))


def envelope_integrals_gl(t: float, C: float, x: float, n_panels: int = 4000):
    """Envelope bounds at x != 0 by composite Gauss-Legendre in the u variable.

    Same mathematical object as the package's adaptive route, evaluated with
    fixed uniform panels and an independently written integrand built from
    first principles: the time-s integrands are
        lower: alpha0(tC^2 - s, 1) * rho_theta(C|x|, s)
        upper: beta0(tC^2 - s, 1) * rho_tau(C|x|, s)
    scaled by C, with s = tC^2 - u^2 flattening the alpha0/beta0 endpoint
    singularity (the 2u Jacobian cancels the 1/sqrt factors).
    """
    horizon = t * C * C
    U = math.sqrt(horizon)
    a = C * abs(x)

    def hit(s, shift_sign):
        # rho with (a + shift_sign * s)^2 / (2s) exponent; vectorized, safe logs
        s = np.asarray(s)
        out = np.zeros_like(s)
        ok = s > 0.0
        sv = s[ok]
        logp = math.log(a) - 0.5 * math.log(2 * math.pi) - 1.5 * np.log(sv)
        logp -= (a + shift_sign * sv) ** 2 / (2.0 * sv)
        out[ok] = np.exp(np.maximum(logp, -745.0))
        return out

    def lower_integrand(u):
        s = horizon - u * u
        env = 2.0 * phi_np(u) - 2.0 * u * Phi_np(-u)
        return C * env * hit(s, +1.0)

    def upper_integrand(u):
        s = horizon - u * u
        env = 2.0 * phi_np(u) + 2.0 * u * Phi_np(u)
        return C * env * hit(s, -1.0)

    lower = gauss_panels(lower_integrand, 0.0, U, n_panels)
    upper = gauss_panels(upper_integrand, 0.0, U, n_panels)
    return lower, upper


def central_difference(f, x: float, h: float) -> float:
    return (f(x + h) - f(x - h)) / (2.0 * h)


def second_difference(f, x: float, h: float) -> float:
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)


def lamperti_forward_batch(xs: np.ndarray, sigma, anchor: float = 0.0) -> np.ndarray:
    """F(x) = int_anchor^x dz/sigma(z) for a whole sample at once.

    Composite 12-node Gauss-Legendre over the union of the sorted samples
    and a fine uniform break grid, cumulatively summed; every panel is short,
    so the result matches scalar adaptive quadrature to ~1e-14.
    """
    xs = np.asarray(xs, dtype=np.float64)
    lo = min(float(xs.min()), anchor) - 0.1
    hi = max(float(xs.max()), anchor) + 0.1
    breaks = np.union1d(np.union1d(xs, np.linspace(lo, hi, 1024)), [anchor])
    a, b = breaks[:-1], breaks[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    z = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    seg = (sigma(z) ** -1.0 @ _GL_WEIGHTS) * half
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    cum -= cum[np.searchsorted(breaks, anchor)]
    return cum[np.searchsorted(breaks, xs)]


def hitting_mass_quad(density, x: float) -> float:
    """Total mass of a first-passage density s -> density(x, s) on (0, inf).

    scipy quad with split points around the inverse-Gaussian mode; used as
    the acceptance oracle for the mass identities.
    """
    from scipy.integrate import quad

    mode = x * x / 3.0
    pieces = [0.0, mode, x * x, max(4.0 * x, 4.0), max(40.0 * x, 40.0)]
    pieces = sorted(set(p for p in pieces if p >= 0.0))
    total = 0.0
    for lo, hi in zip(pieces[:-1], pieces[1:]):
        total += quad(lambda s: density(x, s), lo, hi, limit=300, epsabs=1e-13, epsrel=1e-11)[0]
    total += quad(lambda s: density(x, s), pieces[-1], np.inf, limit=300, epsabs=1e-13, epsrel=1e-11)[0]
    return total
