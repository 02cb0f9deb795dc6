"""Empirical CDF, window-ratio modulus estimation, and kernel densities.

The density regularity of a law is read off its CDF F through the window
ratio

    |F(x+h+k) - F(x+k) - F(x+h) + F(x)| / (h * k^alpha),

whose supremum over x and window pairs 0 < h <= k is finite exactly when F
has an alpha-Holder density (and then equals the best Holder constant up to
the trivial two-sided estimates). holder_modulus evaluates that supremum on
finite search grids, which — because a supremum over a subset can only be
smaller — yields a certified LOWER bound of the true modulus: acceptance
checks against theoretical constants are therefore one-sided.

For empirical CDFs the four-point difference carries sampling noise bounded
via Dvoretzky-Kiefer-Wolfowitz: sup|F_hat - F| <= eps with probability
1 - delta for eps = sqrt(ln(2/delta)/(2n)), so the ratio is off by at most
4 eps / (h k^alpha); the window floor h_min is chosen to keep that budget
below a requested level.

GaussianKDE / HolderModulus wrap the same functionality in fit/predict
estimator form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri
from sklearn.base import BaseEstimator

from ._validate import (
    check_finite_real,
    check_nonnegative,
    check_positive,
    check_samples,
)
from .bounds import BoundQuery, beta0, bound_at
from .errors import InvalidConfig
from .normal import HolderOrder, WindowPair, _alpha_value

__all__ = [
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
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_SQRT_PI = math.sqrt(math.pi)


# --------------------------------------------------------------------------
# Empirical CDF


class EmpiricalCDF:
    """Right-continuous empirical CDF F_hat(x) = #{X_i <= x} / n.

    Samples are stored sorted; evaluation is vectorized binary search.
    """

    def __init__(self, samples):
        arr = check_samples(samples, "samples", min_size=2)
        self.samples = np.sort(arr)
        self.n = int(arr.size)

    def __call__(self, x):
        q = np.asarray(x, dtype=np.float64)
        out = np.searchsorted(self.samples, q, side="right") / self.n
        return out if out.ndim else float(out)

    def quantile_range(self, lo: float = 0.001, hi: float = 0.999) -> tuple:
        return (
            float(np.quantile(self.samples, lo)),
            float(np.quantile(self.samples, hi)),
        )

    def __repr__(self) -> str:
        return f"EmpiricalCDF(n={self.n})"


def ecdf(samples) -> EmpiricalCDF:
    """Build the empirical CDF of a 1-d sample (needs n >= 2)."""
    return EmpiricalCDF(samples)


def dkw_epsilon(n: int, delta: float = 0.01) -> float:
    """Dvoretzky-Kiefer-Wolfowitz band: sup|F_hat - F| <= eps w.p. 1-delta."""
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise InvalidConfig(f"n must be a positive integer, got {n!r}")
    delta = check_positive(delta, "delta")
    if delta >= 1.0:
        raise InvalidConfig(f"delta must be in (0, 1), got {delta}")
    return math.sqrt(math.log(2.0 / delta) / (2.0 * n))


# --------------------------------------------------------------------------
# Window ratio and its grid supremum


def j_window(F, x: float, w: WindowPair) -> float:
    """Four-point difference F(x+h+k) - F(x+k) - F(x+h) + F(x).

    For an exact CDF whose density is alpha-Holder with constant C the
    absolute value is at most C * h * k^alpha; it is invariant under adding
    a constant to F.
    """
    if not isinstance(w, WindowPair):
        raise InvalidConfig("w must be a WindowPair")
    x = check_finite_real(x, "x")
    h, k = w.h, w.k
    return float(F(x + h + k)) - float(F(x + k)) - float(F(x + h)) + float(F(x))


def _j_window_batch(F, xs: np.ndarray, h: float, k: float) -> np.ndarray:
    return (
        np.asarray(F(xs + h + k))
        - np.asarray(F(xs + k))
        - np.asarray(F(xs + h))
        + np.asarray(F(xs))
    )


@dataclass(frozen=True)
class GridSpec:
    """Search grids for the modulus: x uniform, (h, k) geometric with h <= k."""

    x_lo: float
    x_hi: float
    h_min: float
    h_max: float
    n_x: int = 512
    ratio: float = math.sqrt(2.0)

    def __post_init__(self):
        lo = check_finite_real(self.x_lo, "x_lo")
        hi = check_finite_real(self.x_hi, "x_hi")
        if not lo < hi:
            raise InvalidConfig(f"need x_lo < x_hi, got {lo}, {hi}")
        hmin = check_positive(self.h_min, "h_min")
        hmax = check_positive(self.h_max, "h_max")
        if hmin > hmax:
            raise InvalidConfig(f"need h_min <= h_max, got {hmin} > {hmax}")
        if not isinstance(self.n_x, (int, np.integer)) or self.n_x < 2:
            raise InvalidConfig(f"n_x must be an integer >= 2, got {self.n_x!r}")
        r = check_positive(self.ratio, "ratio")
        if r <= 1.0:
            raise InvalidConfig(f"ratio must be > 1, got {r}")
        object.__setattr__(self, "x_lo", lo)
        object.__setattr__(self, "x_hi", hi)
        object.__setattr__(self, "h_min", hmin)
        object.__setattr__(self, "h_max", hmax)
        object.__setattr__(self, "n_x", int(self.n_x))
        object.__setattr__(self, "ratio", r)

    def x_grid(self) -> np.ndarray:
        return np.linspace(self.x_lo, self.x_hi, self.n_x)

    def window_sizes(self) -> np.ndarray:
        """Geometric ladder h_min, h_min*ratio, ... capped at h_max."""
        n = int(math.floor(math.log(self.h_max / self.h_min) / math.log(self.ratio)))
        sizes = self.h_min * self.ratio ** np.arange(n + 1)
        if sizes[-1] < self.h_max * (1.0 - 1e-12):
            sizes = np.append(sizes, self.h_max)
        return sizes

    def window_pairs(self):
        """All (h, k) with h <= k from the ladder."""
        sizes = self.window_sizes()
        return [
            WindowPair(h=float(sizes[i]), k=float(sizes[j]))
            for i in range(sizes.size)
            for j in range(i, sizes.size)
        ]


@dataclass(frozen=True)
class HolderEstimate:
    """Grid supremum of the window ratio plus its sampling budget.

    modulus is a lower bound of the true supremum (finite grids); for
    empirical CDFs the ratio itself is accurate to stat_error =
    4*eps_DKW/(h_min * k_min^alpha) at the spec'd confidence. Analytic CDFs
    carry stat_error = 0.
    """

    alpha: HolderOrder
    modulus: float
    h_min: float
    stat_error: float
    grid_spec: GridSpec

    def __post_init__(self):
        check_nonnegative(self.modulus, "modulus")
        check_nonnegative(self.stat_error, "stat_error")


def modulus_on_grid(F, alpha, xs, pairs) -> float:
    """max over xs and window pairs of |j_window| / (h k^alpha).

    The raw grid supremum: refining the grids (supersets of points/pairs)
    can only increase it.
    """
    a = _alpha_value(alpha)
    xs = np.asarray(xs, dtype=np.float64)
    best = 0.0
    for w in pairs:
        vals = np.abs(_j_window_batch(F, xs, w.h, w.k))
        m = float(vals.max()) / (w.h * w.k**a)
        if m > best:
            best = m
    return best


def holder_floor(n: int, alpha, stat_budget: float, delta: float = 0.01) -> float:
    """Smallest square window h = k keeping the DKW ratio noise <= budget.

    Solves 4*eps/(h^(1+alpha)) = stat_budget.
    """
    a = _alpha_value(alpha)
    stat_budget = check_positive(stat_budget, "stat_budget")
    eps = dkw_epsilon(n, delta)
    return float((4.0 * eps / stat_budget) ** (1.0 / (1.0 + a)))


_ANALYTIC_H_MIN = 1e-8  # float-precision floor for exact CDFs


def default_grid(
    F,
    alpha,
    *,
    stat_budget: float | None = None,
    delta: float = 0.01,
    n_x: int = 512,
) -> GridSpec:
    """Construct the default search grid for holder_modulus.

    Empirical CDFs get x spanning [0.1%-quantile - 1, 99.9%-quantile + 1]
    and a window floor from the DKW budget (default budget: 10% of the
    unit-horizon theoretical constant for this alpha). Analytic CDFs have
    no intrinsic scale, so a grid must be supplied explicitly.
    """
    from .constants import c_alpha_unit

    if not isinstance(F, EmpiricalCDF):
        raise InvalidConfig(
            "default_grid needs an EmpiricalCDF; pass an explicit GridSpec "
            "for analytic CDFs"
        )
    a = _alpha_value(alpha)
    if stat_budget is None:
        stat_budget = 0.1 * c_alpha_unit(1.0, a)
    lo, hi = F.quantile_range()
    x_lo, x_hi = lo - 1.0, hi + 1.0
    h_min = holder_floor(F.n, a, stat_budget, delta)
    h_max = x_hi - x_lo
    if h_min > h_max:
        raise InvalidConfig(
            f"requested budget {stat_budget} needs windows >= {h_min:.3g}, "
            f"larger than the sample range {h_max:.3g}: more samples required"
        )
    return GridSpec(x_lo=x_lo, x_hi=x_hi, h_min=h_min, h_max=h_max, n_x=n_x)


def holder_modulus(
    F,
    alpha,
    grid: GridSpec | None = None,
    *,
    stat_budget: float | None = None,
    delta: float = 0.01,
) -> HolderEstimate:
    """Grid supremum of the window ratio, with its statistical budget.

    `F` is any callable CDF; EmpiricalCDF instances additionally get a
    DKW-based stat_error (and, when `grid` is omitted, an automatic grid
    whose window floor keeps that error below `stat_budget`). For analytic
    CDFs stat_error is 0 and windows below 1e-8 are refused as numerically
    meaningless.
    """
    a = HolderOrder(alpha) if not isinstance(alpha, HolderOrder) else alpha
    empirical = isinstance(F, EmpiricalCDF)
    if grid is None:
        grid = default_grid(F, a, stat_budget=stat_budget, delta=delta)
    elif not isinstance(grid, GridSpec):
        raise InvalidConfig("grid must be a GridSpec")
    if not empirical and grid.h_min < _ANALYTIC_H_MIN:
        raise InvalidConfig(
            f"h_min={grid.h_min} below the floating-point floor {_ANALYTIC_H_MIN}"
        )
    pairs = grid.window_pairs()
    modulus = modulus_on_grid(F, a, grid.x_grid(), pairs)
    if empirical:
        stat_error = 4.0 * dkw_epsilon(F.n, delta) / (grid.h_min ** (1.0 + a.alpha))
    else:
        stat_error = 0.0
    return HolderEstimate(
        alpha=a,
        modulus=modulus,
        h_min=grid.h_min,
        stat_error=stat_error,
        grid_spec=grid,
    )


# --------------------------------------------------------------------------
# Kernel density estimation


def silverman_bandwidth(samples) -> float:
    """0.9 * min(std, IQR/1.34) * n^(-1/5); requires a non-degenerate sample."""
    arr = check_samples(samples, "samples", min_size=2)
    std = float(np.std(arr))
    q75, q25 = np.percentile(arr, [75.0, 25.0])
    iqr = float(q75 - q25)
    scale = min(std, iqr / 1.34) if iqr > 0.0 else std
    if scale <= 0.0:
        raise InvalidConfig("samples are degenerate (zero spread)")
    return 0.9 * scale * arr.size ** (-0.2)


class KDEDensity:
    """Gaussian-kernel density estimate with an explicit error budget.

    rho_hat(x) = (1/(n*bw)) * sum_i phi((x - X_i)/bw). The estimate is a
    genuine probability density (integrates to 1 exactly). error_budget
    bounds |rho_hat - rho| pointwise given only a sup bound M on the true
    density: bias <= (bw^2/2)*sup|rho''| with sup|rho''| replaced by the
    Gaussian-at-cap proxy 2*pi*M^3 (exact when rho is a normal density at
    its own cap), plus a fluctuation term z_{(1+conf)/2} *
    sqrt(M/(2*sqrt(pi)*n*bw)) from the kernel's L2 norm. The budget is
    reported, never silently absorbed.
    """

    def __init__(self, samples, bandwidth: float | None = None):
        self.samples = check_samples(samples, "samples", min_size=2)
        if bandwidth is None:
            bandwidth = silverman_bandwidth(self.samples)
        self.bandwidth = check_positive(bandwidth, "bandwidth")
        self.n = int(self.samples.size)

    def __call__(self, x):
        q = np.asarray(x, dtype=np.float64)
        flat = np.atleast_1d(q).ravel()
        out = np.zeros(flat.size, dtype=np.float64)
        bw = self.bandwidth
        # chunk the sample axis to keep the (queries x samples) table small
        chunk = max(1, int(4_000_000 // max(flat.size, 1)))
        for lo in range(0, self.n, chunk):
            block = self.samples[lo : lo + chunk]
            z = (flat[:, None] - block[None, :]) / bw
            out += np.exp(-0.5 * z * z).sum(axis=1)
        out /= self.n * bw * _SQRT_2PI
        if q.ndim == 0:
            return float(out[0])
        return out.reshape(q.shape)

    def error_budget(self, density_cap: float, confidence: float = 0.99) -> float:
        M = check_positive(density_cap, "density_cap")
        confidence = check_positive(confidence, "confidence")
        if confidence >= 1.0:
            raise InvalidConfig(f"confidence must be in (0, 1), got {confidence}")
        bias = math.pi * self.bandwidth**2 * M**3
        z = float(ndtri(0.5 * (1.0 + confidence)))
        fluct = z * math.sqrt(M / (2.0 * _SQRT_PI * self.n * self.bandwidth))
        return bias + fluct

    def __repr__(self) -> str:
        return f"KDEDensity(n={self.n}, bandwidth={self.bandwidth:.6g})"


def kde(samples, bandwidth: float | None = None) -> KDEDensity:
    """Gaussian kernel density estimate; Silverman bandwidth by default."""
    return KDEDensity(samples, bandwidth)


# --------------------------------------------------------------------------
# Density sandwich checking


@dataclass(frozen=True)
class SandwichReport:
    """Per-point comparison of a density against the two-sided bounds."""

    x: np.ndarray
    density: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    budget: float
    low_violations: int
    high_violations: int

    @property
    def violations(self) -> int:
        return self.low_violations + self.high_violations

    @property
    def passed(self) -> bool:
        return self.violations == 0


def sandwich_check(
    density, t: float, C: float, x_grid, *, budget: float | None = None
) -> SandwichReport:
    """Check lower - budget <= density <= upper + budget on a grid.

    `density` is any callable (a KDEDensity gets its own error budget by
    default, computed at the theoretical density cap beta0(t, C); exact
    closed-form densities should be checked with budget 0, the default for
    plain callables). PASS iff no grid point violates either side.
    """
    t = check_positive(t, "t")
    C = check_positive(C, "C")
    xs = np.asarray(x_grid, dtype=np.float64)
    if xs.ndim != 1 or xs.size == 0 or not np.all(np.isfinite(xs)):
        raise InvalidConfig("x_grid must be a finite 1-d array")
    if budget is None:
        if isinstance(density, KDEDensity):
            budget = density.error_budget(beta0(t, C))
        else:
            budget = 0.0
    budget = check_nonnegative(budget, "budget")

    dens = np.asarray(density(xs), dtype=np.float64)
    lower = np.empty_like(xs)
    upper = np.empty_like(xs)
    for i, xi in enumerate(xs):
        ev = bound_at(BoundQuery(t=t, C=C, x=float(xi)))
        lower[i] = ev.lower
        upper[i] = ev.upper
    low_bad = int(np.count_nonzero(dens < lower - budget))
    high_bad = int(np.count_nonzero(dens > upper + budget))
    return SandwichReport(
        x=xs,
        density=dens,
        lower=lower,
        upper=upper,
        budget=float(budget),
        low_violations=low_bad,
        high_violations=high_bad,
    )


# --------------------------------------------------------------------------
# Estimator wrappers (fit/predict style)


def _column_to_1d(X) -> np.ndarray:
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    return arr


class GaussianKDE(BaseEstimator):
    """Estimator wrapper around KDEDensity.

    Parameters: bandwidth (None = Silverman at fit time). After fit,
    `bandwidth_` and `density_` are available; predict(X) returns density
    values at the query points.
    """

    def __init__(self, bandwidth: float | None = None):
        self.bandwidth = bandwidth

    def fit(self, X, y=None):
        samples = check_samples(_column_to_1d(X), "X", min_size=2)
        self.density_ = KDEDensity(samples, self.bandwidth)
        self.bandwidth_ = self.density_.bandwidth
        self.n_samples_ = self.density_.n
        return self

    def _require_fit(self):
        if not hasattr(self, "density_"):
            raise InvalidConfig("this GaussianKDE instance is not fitted yet")

    def predict(self, X):
        self._require_fit()
        return self.density_(_column_to_1d(X))

    def error_budget(self, density_cap: float, confidence: float = 0.99) -> float:
        self._require_fit()
        return self.density_.error_budget(density_cap, confidence)


class HolderModulus(BaseEstimator):
    """Estimator wrapper around holder_modulus for empirical samples.

    Parameters mirror the functional API; fit(X) builds the ECDF and stores
    the HolderEstimate as `estimate_` (with `modulus_`, `stat_error_`,
    `h_min_` shortcuts).
    """

    def __init__(
        self,
        alpha: float = 0.5,
        grid: GridSpec | None = None,
        stat_budget: float | None = None,
        delta: float = 0.01,
    ):
        self.alpha = alpha
        self.grid = grid
        self.stat_budget = stat_budget
        self.delta = delta

    def fit(self, X, y=None):
        samples = check_samples(_column_to_1d(X), "X", min_size=2)
        est = holder_modulus(
            ecdf(samples),
            self.alpha,
            self.grid,
            stat_budget=self.stat_budget,
            delta=self.delta,
        )
        self.estimate_ = est
        self.modulus_ = est.modulus
        self.stat_error_ = est.stat_error
        self.h_min_ = est.h_min
        return self
