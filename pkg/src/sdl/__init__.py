"""Density regularity of drifted Brownian motion, end to end.

The package covers one tightly-coupled pipeline:

* ``sdl.normal`` — Gaussian window calculus: the test functional's normal
  expectation N, its derivative structure, and sharp sup bounds;
* ``sdl.hitting`` — first-passage densities of drifted Brownian motion;
* ``sdl.bounds`` — pointwise density envelopes (lower/upper sandwich);
* ``sdl.constants`` — the Hölder constants of the density, by quadrature;
* ``sdl.value`` — the reference-control value function, its Kolmogorov
  residual, and the computable error estimate for arbitrary controls;
* ``sdl.sim`` — deterministic, seeded Euler simulation of dX = u dt + dW
  (counter-based streams, thread-count invariant), file formats, and the
  unit-diffusion (Lamperti) reduction of general scalar diffusions;
* ``sdl.empirical`` — ECDF/KDE estimators with explicit DKW/bias budgets;
* ``sdl.verify`` / ``sdl.cli`` — the statistical verification suite and
  the ``sdl`` command-line runner with reproducible JSONL reports.
"""

from .errors import (
    BracketFailure,
    DomainError,
    FormatError,
    InvalidConfig,
    QuadratureFailure,
    SdlError,
)
from .normal import (
    HolderOrder,
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
from .hitting import log_rho_tau, log_rho_theta, rho_tau, rho_theta, theta_mass
from .bounds import BoundEvaluation, BoundQuery, alpha0, beta0, bound_at
from .constants import ConstantQuery, beta_time_integral, c_alpha_K, c_alpha_unit
from .value import (
    ErrorBound,
    ValueQuery,
    error_rhs,
    kolmogorov_residual,
    mismatch_zeros,
    v_tilde,
    v_tilde_dx,
)
from .empirical import (
    EmpiricalCDF,
    GaussianKDE,
    GridSpec,
    HolderEstimate,
    HolderModulus,
    KDEDensity,
    SandwichReport,
    dkw_epsilon,
    ecdf,
    holder_floor,
    holder_modulus,
    j_window,
    kde,
    modulus_on_grid,
    sandwich_check,
    silverman_bandwidth,
)
from . import sim

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "SdlError",
    "InvalidConfig",
    "DomainError",
    "BracketFailure",
    "QuadratureFailure",
    "FormatError",
    # normal window calculus
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
    # hitting densities
    "rho_tau",
    "rho_theta",
    "log_rho_tau",
    "log_rho_theta",
    "theta_mass",
    # density envelopes
    "BoundQuery",
    "BoundEvaluation",
    "alpha0",
    "beta0",
    "bound_at",
    # Holder constants
    "ConstantQuery",
    "beta_time_integral",
    "c_alpha_unit",
    "c_alpha_K",
    # value function and error estimate
    "ValueQuery",
    "v_tilde",
    "v_tilde_dx",
    "kolmogorov_residual",
    "mismatch_zeros",
    "ErrorBound",
    "error_rhs",
    # empirical estimators
    "EmpiricalCDF",
    "ecdf",
    "j_window",
    "dkw_epsilon",
    "holder_floor",
    "GridSpec",
    "HolderEstimate",
    "holder_modulus",
    "modulus_on_grid",
    "silverman_bandwidth",
    "KDEDensity",
    "kde",
    "SandwichReport",
    "sandwich_check",
    "GaussianKDE",
    "HolderModulus",
    # simulation subpackage
    "sim",
]
