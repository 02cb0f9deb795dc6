"""Euler simulation of X(t) = x0 + int_0^t u ds + W(t) with drift clamping.

Scheme: drift frozen at the left endpoint of each step (the controls are
merely measurable, so higher-order schemes buy nothing), exact Gaussian
increments sqrt(dt) * xi. A frozen-drift grid control is itself an adapted
control of the continuous-time class, so distributional bounds proved for
that class apply to the simulated law exactly, not just in the dt -> 0
limit.

Random numbers: one Philox counter stream per master seed; path p consumes
exactly the flat positions [p * n_steps, (p+1) * n_steps), each position
being one uniform mapped through the normal quantile function. Consequently
the increments of a given path are invariant under chunk size, thread count
and total path count, and every engine below is bit-reproducible. The
engines share increments across controls and start points (common random
numbers), which the batched terminal engine exploits.

Memory: engines work in path chunks; full-path storage is refused above a
hard cap with a pointer to the streaming terminal engine.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .._validate import check_finite_real, check_positive
from ..errors import InvalidConfig
from .controls import Control

__all__ = [
    "SamplePath",
    "PathBatch",
    "TerminalSample",
    "normal_increments",
    "simulate",
    "simulate_terminal",
    "simulate_diffusion",
    "scale_transform",
]

_U64_MASK = (1 << 64) - 1
_I64_MIN, _I64_MAX = -(1 << 63), (1 << 63) - 1
# Shift uniforms off 0 so the quantile map stays finite; preserves the
# 2^-53 equidistribution of numpy doubles.
_HALF_ULP = 2.0**-54
_DEFAULT_CHUNK = 32768
_FULL_STORAGE_CAP = 3_500_000_000  # bytes of float64 path storage
_INCREMENT_BUDGET = 268_435_456  # target bytes of increments per chunk


def check_seed(seed) -> int:
    """Validate a 64-bit signed master seed."""
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise InvalidConfig(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not _I64_MIN <= seed <= _I64_MAX:
        raise InvalidConfig(f"seed must fit in a signed 64-bit integer, got {seed}")
    return seed


def _check_count(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise InvalidConfig(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < 1:
        raise InvalidConfig(f"{name} must be >= 1, got {value}")
    return value


def _stream_at(seed: int, offset: int) -> np.random.Generator:
    """Generator positioned at flat draw `offset` of the stream keyed by seed.

    Philox.advance counts 4-draw counter blocks, so land on the containing
    block and discard the remainder to reach an arbitrary draw position.
    """
    bg = np.random.Philox(key=np.uint64(seed & _U64_MASK))
    blocks, rem = divmod(offset, 4)
    if blocks:
        bg.advance(blocks)
    gen = np.random.Generator(bg)
    if rem:
        gen.random(rem)
    return gen


def normal_increments(seed: int, n_steps: int, lo: int, hi: int) -> np.ndarray:
    """Standard normal draws for paths [lo, hi), shape (hi - lo, n_steps).

    Row p - lo holds the draws of global path p, taken from the flat Philox
    positions [p * n_steps, (p + 1) * n_steps) of the stream keyed by
    `seed`. One uniform is consumed per position and mapped through the
    normal quantile function (fixed consumption, unlike rejection samplers),
    which is what makes the layout chunk- and thread-invariant.
    """
    if hi <= lo:
        raise InvalidConfig(f"need lo < hi, got [{lo}, {hi})")
    gen = _stream_at(seed, lo * n_steps)
    u = gen.random((hi - lo, n_steps))
    u += _HALF_ULP
    return ndtri(u, out=u)


@dataclass(frozen=True)
class SamplePath:
    """One simulated path on a uniform grid."""

    grid: np.ndarray
    values: np.ndarray
    seed: int


@dataclass(frozen=True)
class PathBatch:
    """Paths on a shared uniform grid; values[p, i] = X_p(times[i])."""

    times: np.ndarray
    values: np.ndarray
    seed: int
    clamp_violations: int = 0

    def __post_init__(self):
        t = np.asarray(self.times, dtype=np.float64)
        v = np.asarray(self.values, dtype=np.float64)
        if t.ndim != 1 or t.size < 2:
            raise InvalidConfig("times must be a 1-d grid with >= 2 points")
        if v.ndim != 2 or v.shape[1] != t.size:
            raise InvalidConfig(
                f"values must be (n_paths, {t.size}), got {v.shape}"
            )
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @property
    def n_paths(self) -> int:
        return self.values.shape[0]

    @property
    def n_steps(self) -> int:
        return self.times.size - 1

    @property
    def T(self) -> float:
        return float(self.times[-1])

    @property
    def dt(self) -> float:
        return self.T / self.n_steps

    def path(self, i: int) -> SamplePath:
        if not 0 <= i < self.n_paths:
            raise InvalidConfig(f"path index {i} out of range [0, {self.n_paths})")
        return SamplePath(grid=self.times, values=self.values[i], seed=self.seed)

    def terminal(self) -> np.ndarray:
        """Values at the horizon, shape (n_paths,)."""
        return np.ascontiguousarray(self.values[:, -1])


@dataclass(frozen=True)
class TerminalSample:
    """Horizon values for a (controls x starts) matrix sharing increments.

    values[c, j, p] is X(T) for controls[c], start x0[j], path stream p; all
    (c, j) lanes of a given p share the same Brownian increments, so lane
    differences are common-random-number comparisons.
    """

    values: np.ndarray  # (n_controls, n_x0, n_paths)
    x0: np.ndarray  # (n_x0,)
    T: float
    n_steps: int
    seed: int
    labels: tuple
    clamp_violations: np.ndarray  # (n_controls,) int64

    def lane(self, control_index: int, x0_index: int) -> np.ndarray:
        return self.values[control_index, x0_index]


def _chunk_ranges(n_paths: int, chunk_size: int):
    return [
        (lo, min(lo + chunk_size, n_paths)) for lo in range(0, n_paths, chunk_size)
    ]


def _auto_chunk(n_paths: int, n_steps: int, requested) -> int:
    if requested is not None:
        return min(_check_count(requested, "chunk_size"), n_paths)
    by_memory = max(1024, _INCREMENT_BUDGET // (n_steps * 8))
    return max(1, min(n_paths, _DEFAULT_CHUNK, by_memory))


def _clamped_drift(control: Control, d, x: np.ndarray):
    """Clip a raw drift to [-K, K]; returns (drift, violation count).

    Controls whose batch rule satisfies the bound by construction
    (exact_bound) skip the scan; everything else is checked elementwise.
    NaN drift is rejected outright.
    """
    K = control.bound
    d_arr = np.asarray(d, dtype=np.float64)
    if d_arr.ndim == 0:
        dv = float(d_arr)
        if math.isnan(dv):
            raise InvalidConfig(f"control {control.label!r} returned NaN drift")
        if abs(dv) > K:
            return math.copysign(K, dv), x.size
        return dv, 0
    if getattr(control, "exact_bound", False):
        return d_arr, 0
    bad = ~(np.abs(d_arr) <= K)  # catches NaN too
    n_bad = int(np.count_nonzero(bad))
    if n_bad:
        if np.isnan(d_arr).any():
            raise InvalidConfig(f"control {control.label!r} returned NaN drift")
        d_arr = np.clip(d_arr, -K, K)
    return d_arr, n_bad


def _simulate_chunk_full(
    control: Control,
    x0: float,
    dt: float,
    n_steps: int,
    seed: int,
    lo: int,
    hi: int,
    values: np.ndarray,
) -> int:
    sdt = math.sqrt(dt)
    z = normal_increments(seed, n_steps, lo, hi)
    zt = np.ascontiguousarray(z.T)
    del z
    c = hi - lo
    x = np.full(c, x0, dtype=np.float64)
    state = control.begin(x)
    values[lo:hi, 0] = x0
    violations = 0
    for i in range(n_steps):
        d, n_bad = _clamped_drift(control, control.drift_batch(i * dt, x, state), x)
        violations += n_bad
        if not isinstance(d, float) or d != 0.0:
            x += d * dt
        x += zt[i] * sdt
        values[lo:hi, i + 1] = x
        state = control.advance((i + 1) * dt, x, state)
    return violations


def _simulate_chunk_history(
    control: Control,
    x0: float,
    dt: float,
    n_steps: int,
    seed: int,
    lo: int,
    hi: int,
    values: np.ndarray,
) -> int:
    """Per-path fallback driving a control through evaluate(t, history)."""
    sdt = math.sqrt(dt)
    z = normal_increments(seed, n_steps, lo, hi)
    K = control.bound
    violations = 0
    for p in range(lo, hi):
        row = values[p]
        row[0] = x0
        zr = z[p - lo]
        for i in range(n_steps):
            hist = row[: i + 1]
            hist.flags.writeable = False
            d = float(control.evaluate(i * dt, hist))
            if math.isnan(d):
                raise InvalidConfig(f"control {control.label!r} returned NaN drift")
            if abs(d) > K:
                violations += 1
                d = math.copysign(K, d)
            row[i + 1] = row[i] + d * dt + zr[i] * sdt
    return violations


def simulate(
    control: Control,
    x0: float,
    T: float,
    n_steps: int,
    n_paths: int,
    seed: int,
    *,
    chunk_size: int | None = None,
    threads: int = 1,
) -> PathBatch:
    """Simulate full paths of dX = u dt + dW from x0 on [0, T].

    Euler with frozen drift: X_{i+1} = X_i + clamp(u(t_i, X_{<=t_i})) dt
    + sqrt(dt) xi_i. Identical (seed, config) give bit-identical batches for
    any chunk_size/threads. Controls implementing the vectorized protocol
    run chunked and optionally threaded; any other control runs through the
    scalar evaluate(t, history) contract, one call per path per step.

    Full-path storage of n_paths * (n_steps + 1) doubles is refused beyond
    ~3.5 GB; use simulate_terminal for horizon-only statistics at scale.
    """
    if not isinstance(control, Control):
        raise InvalidConfig("control must be a Control instance")
    x0 = check_finite_real(x0, "x0")
    T = check_positive(T, "T")
    n_steps = _check_count(n_steps, "n_steps")
    n_paths = _check_count(n_paths, "n_paths")
    seed = check_seed(seed)
    threads = _check_count(threads, "threads")

    nbytes = n_paths * (n_steps + 1) * 8
    if nbytes > _FULL_STORAGE_CAP:
        raise InvalidConfig(
            f"full-path storage would need {nbytes/1e9:.1f} GB; "
            "use simulate_terminal for horizon statistics at this scale"
        )
    values = np.empty((n_paths, n_steps + 1), dtype=np.float64)
    dt = T / n_steps

    if control.supports_batch:
        worker = _simulate_chunk_full
        chunk = _auto_chunk(n_paths, n_steps, chunk_size)
    else:
        worker = _simulate_chunk_history
        chunk = n_paths  # python loop; chunking buys nothing
    ranges = _chunk_ranges(n_paths, chunk)

    if threads > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(worker, control, x0, dt, n_steps, seed, lo, hi, values)
                for lo, hi in ranges
            ]
            violations = sum(f.result() for f in futures)
    else:
        violations = sum(
            worker(control, x0, dt, n_steps, seed, lo, hi, values)
            for lo, hi in ranges
        )

    times = np.linspace(0.0, T, n_steps + 1)
    return PathBatch(
        times=times, values=values, seed=seed, clamp_violations=int(violations)
    )


def _terminal_chunk(
    controls,
    x0v: np.ndarray,
    dt: float,
    n_steps: int,
    seed: int,
    lo: int,
    hi: int,
    out: np.ndarray,
) -> np.ndarray:
    sdt = math.sqrt(dt)
    z = normal_increments(seed, n_steps, lo, hi)
    zt = np.ascontiguousarray(z.T)
    del z
    c = hi - lo
    n_x0 = x0v.size
    xs = [np.tile(x0v[:, None], (1, c)) for _ in controls]
    states = [ctrl.begin(xs[ci]) for ci, ctrl in enumerate(controls)]
    violations = np.zeros(len(controls), dtype=np.int64)
    for i in range(n_steps):
        incr = zt[i] * sdt  # shared by every lane: common random numbers
        t = i * dt
        t_next = (i + 1) * dt
        for ci, ctrl in enumerate(controls):
            x = xs[ci]
            d, n_bad = _clamped_drift(ctrl, ctrl.drift_batch(t, x, states[ci]), x)
            violations[ci] += n_bad
            if not isinstance(d, float) or d != 0.0:
                x += d * dt
            x += incr
            states[ci] = ctrl.advance(t_next, x, states[ci])
    for ci in range(len(controls)):
        out[ci, :, lo:hi] = xs[ci]
    return violations


def simulate_terminal(
    controls,
    x0,
    T: float,
    n_steps: int,
    n_paths: int,
    seed: int,
    *,
    chunk_size: int | None = None,
    threads: int = 1,
) -> TerminalSample:
    """Horizon values X(T) for every (control, start) lane, streaming.

    Memory stays O(chunk * n_steps) regardless of n_paths: only the current
    state column per lane is kept while stepping. All lanes share the same
    increment stream (common random numbers), and every control must
    implement the vectorized protocol (begin/drift_batch/advance).

    `controls` may be a single Control or a sequence; `x0` a float or a 1-d
    array of starts. Returns values of shape (n_controls, n_x0, n_paths).
    """
    if isinstance(controls, Control):
        controls = (controls,)
    controls = tuple(controls)
    if not controls:
        raise InvalidConfig("need at least one control")
    for ctrl in controls:
        if not isinstance(ctrl, Control):
            raise InvalidConfig("controls must be Control instances")
        if not ctrl.supports_batch:
            raise InvalidConfig(
                f"control {ctrl.label!r} lacks the vectorized protocol; "
                "wrap it as a MarkovControl or use simulate()"
            )
    x0v = np.atleast_1d(np.asarray(x0, dtype=np.float64))
    if x0v.ndim != 1 or x0v.size == 0 or not np.all(np.isfinite(x0v)):
        raise InvalidConfig("x0 must be a finite scalar or 1-d array")
    T = check_positive(T, "T")
    n_steps = _check_count(n_steps, "n_steps")
    n_paths = _check_count(n_paths, "n_paths")
    seed = check_seed(seed)
    threads = _check_count(threads, "threads")

    out = np.empty((len(controls), x0v.size, n_paths), dtype=np.float64)
    dt = T / n_steps
    chunk = _auto_chunk(n_paths, n_steps, chunk_size)
    ranges = _chunk_ranges(n_paths, chunk)

    if threads > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(
                    _terminal_chunk, controls, x0v, dt, n_steps, seed, lo, hi, out
                )
                for lo, hi in ranges
            ]
            violations = sum(f.result() for f in futures)
    else:
        violations = sum(
            _terminal_chunk(controls, x0v, dt, n_steps, seed, lo, hi, out)
            for lo, hi in ranges
        )

    return TerminalSample(
        values=out,
        x0=x0v,
        T=T,
        n_steps=n_steps,
        seed=seed,
        labels=tuple(c.label for c in controls),
        clamp_violations=np.asarray(violations, dtype=np.int64),
    )


def simulate_diffusion(
    spec,
    x0: float,
    T: float,
    n_steps: int,
    n_paths: int,
    seed: int,
    *,
    chunk_size: int | None = None,
) -> PathBatch:
    """Euler-Maruyama paths of dX = b(t, X) dt + sigma(t, X) dW.

    `spec` is a DiffusionSpec with a drift set; its sigma/drift callables
    must be numpy-vectorized in x. Uses the same per-path increment streams
    as simulate(), so X here and Y = F(X) simulated as a unit diffusion are
    driven by the same noise when seeds match. The state space (c, d) is not
    enforced pathwise; steps may overshoot for diffusions on a sub-interval.
    """
    from .lamperti import DiffusionSpec

    if not isinstance(spec, DiffusionSpec):
        raise InvalidConfig("spec must be a DiffusionSpec")
    if spec.drift is None:
        raise InvalidConfig("spec.drift is required for simulation")
    x0 = check_finite_real(x0, "x0")
    T = check_positive(T, "T")
    n_steps = _check_count(n_steps, "n_steps")
    n_paths = _check_count(n_paths, "n_paths")
    seed = check_seed(seed)

    nbytes = n_paths * (n_steps + 1) * 8
    if nbytes > _FULL_STORAGE_CAP:
        raise InvalidConfig(
            f"full-path storage would need {nbytes/1e9:.1f} GB; reduce n_paths"
        )
    values = np.empty((n_paths, n_steps + 1), dtype=np.float64)
    dt = T / n_steps
    sdt = math.sqrt(dt)
    chunk = _auto_chunk(n_paths, n_steps, chunk_size)

    for lo, hi in _chunk_ranges(n_paths, chunk):
        z = normal_increments(seed, n_steps, lo, hi)
        zt = np.ascontiguousarray(z.T)
        del z
        x = np.full(hi - lo, x0, dtype=np.float64)
        values[lo:hi, 0] = x0
        for i in range(n_steps):
            t = i * dt
            x += np.asarray(spec.drift(t, x), dtype=np.float64) * dt
            x += np.asarray(spec.sigma(t, x), dtype=np.float64) * (zt[i] * sdt)
            values[lo:hi, i + 1] = x

    times = np.linspace(0.0, T, n_steps + 1)
    return PathBatch(times=times, values=values, seed=seed, clamp_violations=0)


def scale_transform(batch: PathBatch, K: float) -> PathBatch:
    """Diffusive rescaling Y(t) = K * X(t / K^2) applied to a batch.

    The grid becomes K^2 * times and values K * values; a drift bounded by
    C on the source becomes a drift bounded by C / K on the target, which is
    how a bound-K problem is reduced to the unit-bound one. K = 1 is the
    identity; applying K then 1/K returns the original batch up to rounding
    (exactly, when K is a power of two).
    """
    if not isinstance(batch, PathBatch):
        raise InvalidConfig("batch must be a PathBatch")
    K = check_positive(K, "K")
    return PathBatch(
        times=batch.times * (K * K),
        values=batch.values * K,
        seed=batch.seed,
        clamp_violations=batch.clamp_violations,
    )
