"""End-to-end statistical verification: theory bounds vs simulated laws.

One Monte Carlo corpus — every built-in unit-bound control crossed with
every start point, all lanes sharing increments — feeds three independent
check families:

* error-estimate: the window expectation E[J_{h,k}(X^x_u(T))] under each
  control stays below error_rhs(...).tight within 3 standard errors, and
  for the reference control u = -1 it matches v_tilde(0, x) two-sidedly
  (an equality case, since the bound is built around that control);
* density sandwich: the kernel density of the bang-bang law at t = T lies
  between the lower/upper density bounds within the reported KDE budget,
  and the two closed-form laws (u = 0 and u = -1) lie inside with no
  budget at all;
* modulus-vs-constant: for every control and each Holder order, the
  empirical window-ratio modulus minus its DKW budget stays below the
  theoretical constant c_alpha_unit(T, alpha).

A frozen-drift Euler path is itself driven by an admissible control of the
continuous-time class, so these are exact statements about the simulated
law — the only slack is statistical, which is why 3-sigma / 99%-budget
policies make the checks sharp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import beta0
from .constants import c_alpha_unit
from .empirical import ecdf, holder_modulus, kde, sandwich_check
from .errors import InvalidConfig
from .normal import WindowPair
from .sim import (
    BangBangControl,
    ConstantControl,
    RunningMaxControl,
    TerminalSample,
    simulate_terminal,
)
from .value import ValueQuery, error_rhs, v_tilde

__all__ = [
    "CheckResult",
    "j_window_mc",
    "default_window_sizes",
    "default_alphas",
    "build_corpus",
    "corpus_controls",
    "check_error_estimate",
    "check_sandwich",
    "check_modulus",
    "run_verification",
]

DEFAULT_WINDOW_SIZES = (0.1, 0.5, 1.0)
DEFAULT_EXTRA_STARTS = (-1.0, 0.0, 2.0)
DEFAULT_ALPHAS = (0.3, 0.5, 0.7, 0.9)


@dataclass(frozen=True)
class CheckResult:
    """One verdict line of the suite.

    `claim` names the mathematical statement being tested; `details` carries
    the measured quantities backing the verdict.
    """

    name: str
    passed: bool
    claim: str
    details: dict

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}"


def default_window_sizes():
    return DEFAULT_WINDOW_SIZES


def default_alphas():
    return DEFAULT_ALPHAS


def corpus_controls():
    """The four built-in unit-bound controls exercised by the suite."""
    return (
        ConstantControl(-1.0),
        ConstantControl(0.0, bound=1.0),
        BangBangControl(),
        RunningMaxControl(),
    )


def window_pairs(sizes=DEFAULT_WINDOW_SIZES):
    """All valid (h <= k) pairs over the size ladder."""
    sizes = sorted(float(s) for s in sizes)
    return [
        WindowPair(h=sizes[i], k=sizes[j])
        for i in range(len(sizes))
        for j in range(i, len(sizes))
    ]


def corpus_starts(pairs, extra=DEFAULT_EXTRA_STARTS):
    """Distinct start points: the extras plus each pair's window midpoint."""
    xs = set(float(x) for x in extra)
    xs.update((w.h + w.k) / 2.0 for w in pairs)
    return tuple(sorted(xs))


def build_corpus(
    n_paths: int,
    n_steps: int,
    seed: int,
    T: float = 1.0,
    *,
    controls=None,
    starts=None,
    threads: int = 1,
    chunk_size=None,
) -> TerminalSample:
    """Simulate the (controls x starts) terminal corpus with shared noise."""
    controls = corpus_controls() if controls is None else tuple(controls)
    if starts is None:
        starts = corpus_starts(window_pairs())
    return simulate_terminal(
        controls,
        np.asarray(starts, dtype=np.float64),
        T,
        n_steps,
        n_paths,
        seed,
        threads=threads,
        chunk_size=chunk_size,
    )


def j_window_mc(samples_sorted: np.ndarray, w: WindowPair):
    """Monte Carlo mean and standard error of J_{h,k} over sorted samples.

    J takes values in {-1, 0, 1}: +1 on [k, k+h], -1 on [0, h]. Counting on
    the sorted array makes the windows closed intervals; ties at endpoints
    have probability zero under the simulated (atomless) laws.
    """
    n = samples_sorted.size
    c_plus = int(
        np.searchsorted(samples_sorted, w.k + w.h, side="right")
        - np.searchsorted(samples_sorted, w.k, side="left")
    )
    c_minus = int(
        np.searchsorted(samples_sorted, w.h, side="right")
        - np.searchsorted(samples_sorted, 0.0, side="left")
    )
    mean = (c_plus - c_minus) / n
    var = (c_plus + c_minus) / n - mean * mean
    se = math.sqrt(max(var, 0.0) / n)
    return mean, se


def _start_index(starts: np.ndarray, x: float) -> int:
    idx = int(np.argmin(np.abs(starts - x)))
    if abs(starts[idx] - x) > 1e-12:
        raise InvalidConfig(f"start {x} missing from the corpus starts {starts}")
    return idx


def check_error_estimate(
    corpus: TerminalSample,
    alpha: float = 0.5,
    sizes=DEFAULT_WINDOW_SIZES,
    extra_starts=DEFAULT_EXTRA_STARTS,
) -> list:
    """MC window means vs the tight bound, plus the reference equality case.

    For every control lane and every (h, k, x) in the test matrix:
    mean <= tight + 3 SE. For the u = -1 lane additionally
    |mean - v_tilde(0, x)| <= 3 SE (its law is exactly the reference one).
    """
    pairs = window_pairs(sizes)
    T = corpus.T
    results = []
    # error_rhs depends on x only through v_tilde(0, x): split it once per pair.
    correction = {}
    for w in pairs:
        rhs0 = error_rhs(T, w, 0.0, alpha)
        correction[(w.h, w.k)] = rhs0.tight - v_tilde(
            ValueQuery(s=0.0, x=0.0, T=T, w=w)
        )

    for ci, label in enumerate(corpus.labels):
        is_reference = label == "constant:-1"
        worst_margin = math.inf
        worst_eq = 0.0
        n_checks = 0
        ok = True
        eq_ok = True
        sorted_lanes = {}
        for w in pairs:
            xs = sorted(set(list(extra_starts) + [(w.h + w.k) / 2.0]))
            for x in xs:
                j = _start_index(corpus.x0, x)
                if j not in sorted_lanes:
                    sorted_lanes[j] = np.sort(corpus.values[ci, j])
                mean, se = j_window_mc(sorted_lanes[j], w)
                v0 = v_tilde(ValueQuery(s=0.0, x=float(x), T=T, w=w))
                tight = v0 + correction[(w.h, w.k)]
                margin = tight + 3.0 * se - mean
                worst_margin = min(worst_margin, margin)
                n_checks += 1
                if margin < 0.0:
                    ok = False
                if is_reference:
                    dev = abs(mean - v0) - 3.0 * se
                    worst_eq = max(worst_eq, dev)
                    if dev > 0.0:
                        eq_ok = False
        results.append(
            CheckResult(
                name=f"window-mean-vs-tight-bound[{label}]",
                passed=ok,
                claim="window-expectation error bound",
                details={
                    "control": label,
                    "alpha": alpha,
                    "n_checks": n_checks,
                    "worst_margin": worst_margin,
                    "clamp_violations": int(corpus.clamp_violations[ci]),
                },
            )
        )
        if is_reference:
            results.append(
                CheckResult(
                    name="reference-control-equality",
                    passed=eq_ok,
                    claim="reference-control equality case",
                    details={
                        "control": label,
                        "worst_excess_over_3se": worst_eq,
                        "n_checks": n_checks,
                    },
                )
            )
    return results


def check_sandwich(
    corpus: TerminalSample,
    C: float = 1.0,
    x_lo: float = -3.0,
    x_hi: float = 3.0,
    step: float = 0.1,
) -> list:
    """Density sandwich at t = T: KDE of bang-bang within budget, closed
    forms for u = 0 and u = -1 with zero budget."""
    T = corpus.T
    n_pts = int(round((x_hi - x_lo) / step)) + 1
    xs = x_lo + step * np.arange(n_pts)
    results = []

    j0 = _start_index(corpus.x0, 0.0)
    labels = list(corpus.labels)

    if "bang_bang_sgn" in labels:
        ci = labels.index("bang_bang_sgn")
        density = kde(corpus.values[ci, j0])
        rep = sandwich_check(density, T, C, xs)
        results.append(
            CheckResult(
                name="sandwich-kde[bang_bang_sgn]",
                passed=rep.passed,
                claim="density sandwich (kernel estimate)",
                details={
                    "budget": rep.budget,
                    "bandwidth": density.bandwidth,
                    "low_violations": rep.low_violations,
                    "high_violations": rep.high_violations,
                    "n_points": int(xs.size),
                },
            )
        )

    rt = math.sqrt(T)
    closed_forms = {
        "constant:0": lambda x: np.exp(-0.5 * (x / rt) ** 2) / (rt * math.sqrt(2 * math.pi)),
        "constant:-1": lambda x: np.exp(-0.5 * ((x + T) / rt) ** 2)
        / (rt * math.sqrt(2 * math.pi)),
    }
    for label, fn in closed_forms.items():
        rep = sandwich_check(fn, T, C, xs, budget=0.0)
        results.append(
            CheckResult(
                name=f"sandwich-closed-form[{label}]",
                passed=rep.passed,
                claim="density sandwich (closed form)",
                details={
                    "budget": 0.0,
                    "low_violations": rep.low_violations,
                    "high_violations": rep.high_violations,
                    "n_points": int(xs.size),
                },
            )
        )
    return results


def check_modulus(corpus: TerminalSample, alphas=DEFAULT_ALPHAS) -> list:
    """Empirical window-ratio modulus vs c_alpha_unit for every control."""
    T = corpus.T
    j0 = _start_index(corpus.x0, 0.0)
    results = []
    for ci, label in enumerate(corpus.labels):
        F = ecdf(corpus.values[ci, j0])
        for a in alphas:
            budget = 0.1 * c_alpha_unit(T, a)
            est = holder_modulus(F, a, stat_budget=budget)
            c_theory = c_alpha_unit(T, a)
            passed = est.modulus - est.stat_error <= c_theory
            results.append(
                CheckResult(
                    name=f"modulus-vs-constant[{label},alpha={a:g}]",
                    passed=passed,
                    claim="empirical modulus vs theoretical constant",
                    details={
                        "control": label,
                        "alpha": a,
                        "modulus": est.modulus,
                        "stat_error": est.stat_error,
                        "h_min": est.h_min,
                        "constant": c_theory,
                    },
                )
            )
    return results


def run_verification(
    n_paths: int = 1_000_000,
    n_steps: int = 1024,
    seed: int = 1729,
    T: float = 1.0,
    *,
    alpha: float = 0.5,
    alphas=DEFAULT_ALPHAS,
    threads: int = 1,
    chunk_size=None,
) -> list:
    """Run the full suite on a fresh corpus; returns all CheckResults."""
    corpus = build_corpus(
        n_paths, n_steps, seed, T, threads=threads, chunk_size=chunk_size
    )
    results = []
    results += check_error_estimate(corpus, alpha=alpha)
    results += check_sandwich(corpus)
    results += check_modulus(corpus, alphas=alphas)
    return results
