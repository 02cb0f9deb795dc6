"""Bounded adapted drift controls for the unit-diffusion simulator.

A control is a rule u(t, history) with a declared bound K; the simulator
clamps anything outside [-K, K] and counts the violations. Controls see the
path only through its own past (the grid prefix up to the current time), so
adaptedness holds by construction.

Sign convention used throughout: sgn(x) = 1 for x > 0 and -1 for x <= 0,
so the bang-bang rule -sgn(X) pushes strictly toward 0 from above and
strictly away from 0 upward when X = 0.

Two evaluation protocols coexist:

* ``evaluate(t, history)`` — the scalar contract: ``history`` is a read-only
  view of the path values on [0, t] (the last entry is the current state).
  Any subclass must implement it; the full-path simulator can drive any
  control through it (slowly, one call per path per step).
* the vectorized hooks ``begin`` / ``drift_batch`` / ``advance`` — optional,
  used by the streaming engines. ``begin(x0)`` allocates per-run state for an
  array of lanes, ``drift_batch(t, x, state)`` returns the drift for every
  lane (scalar broadcast allowed), ``advance(t_next, x_next, state)`` folds
  the post-step values into the state. State is owned by the engine run, so
  hooks may mutate it freely; the control instance itself must stay
  read-only during simulation (reentrancy).
"""

from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np

from .._validate import check_finite_real, check_positive
from ..errors import InvalidConfig

__all__ = [
    "Control",
    "ConstantControl",
    "BangBangControl",
    "RunningMaxControl",
    "MarkovControl",
    "builtin_controls",
    "make_control",
]


class Control(ABC):
    """Adapted drift rule with declared bound K > 0; |u| <= K after clamping."""

    def __init__(self, bound: float, label: str = ""):
        self.bound = check_positive(bound, "bound")
        self.label = label or type(self).__name__
        # True only when drift_batch respects the bound by construction;
        # lets the engine skip the elementwise clamp scan (violations are
        # then provably zero). User-supplied rules are always scanned.
        self.exact_bound = False

    @abstractmethod
    def evaluate(self, t: float, history: np.ndarray) -> float:
        """Drift at time t given the path values on [0, t] (last = current)."""

    # --- vectorized engine hooks (optional) ---------------------------------

    def begin(self, x0: np.ndarray):
        """Allocate per-run state for an array of lane start values."""
        return None

    def drift_batch(self, t: float, x: np.ndarray, state):
        """Drift for every lane; scalars broadcast. Override to enable."""
        raise NotImplementedError(
            f"{type(self).__name__} does not implement the vectorized protocol"
        )

    def advance(self, t_next: float, x_next: np.ndarray, state):
        """Fold post-step values into the state; returns the (new) state."""
        return state

    @property
    def supports_batch(self) -> bool:
        return type(self).drift_batch is not Control.drift_batch

    def __repr__(self) -> str:
        return f"{type(self).__name__}(label={self.label!r}, bound={self.bound!r})"


def _sgn(x):
    """sgn with sgn(0) = -1; works on scalars and arrays."""
    return np.where(np.asarray(x) > 0.0, 1.0, -1.0)


class ConstantControl(Control):
    """u identically equal to `value`; bound defaults to |value| (1 if zero)."""

    def __init__(self, value: float, bound: float | None = None):
        value = check_finite_real(value, "value")
        if bound is None:
            bound = abs(value) if value != 0.0 else 1.0
        super().__init__(bound, label=f"constant:{value:g}")
        if abs(value) > self.bound:
            raise InvalidConfig(
                f"|value|={abs(value)} exceeds the declared bound {self.bound}"
            )
        self.value = value
        self.exact_bound = True

    def evaluate(self, t: float, history: np.ndarray) -> float:
        return self.value

    def drift_batch(self, t: float, x: np.ndarray, state):
        return self.value


class BangBangControl(Control):
    """u(t) = -scale * sgn(X(t)), the drift pushing toward the origin."""

    def __init__(self, scale: float = 1.0):
        scale = check_positive(scale, "scale")
        label = "bang_bang_sgn" if scale == 1.0 else f"bang_bang_sgn:{scale:g}"
        super().__init__(scale, label=label)
        self.scale = scale
        self.exact_bound = True

    def evaluate(self, t: float, history: np.ndarray) -> float:
        return float(-self.scale * _sgn(history[-1]))

    def drift_batch(self, t: float, x: np.ndarray, state):
        return np.where(x > 0.0, -self.scale, self.scale)


class RunningMaxControl(Control):
    """u(t) = -scale * sgn(X(t) + max_{s<=t} X(s)); genuinely path-dependent.

    Two paths that agree at time t but carry different running maxima get
    different drifts, so the rule is not a function of the current state.
    """

    def __init__(self, scale: float = 1.0):
        scale = check_positive(scale, "scale")
        label = "running_max" if scale == 1.0 else f"running_max:{scale:g}"
        super().__init__(scale, label=label)
        self.scale = scale
        self.exact_bound = True

    def evaluate(self, t: float, history: np.ndarray) -> float:
        s = history[-1] + history.max()
        return float(-self.scale * _sgn(s))

    def begin(self, x0: np.ndarray):
        return np.array(x0, dtype=np.float64, copy=True)

    def drift_batch(self, t: float, x: np.ndarray, state):
        return np.where(x + state > 0.0, -self.scale, self.scale)

    def advance(self, t_next: float, x_next: np.ndarray, state):
        return np.maximum(state, x_next, out=state)


class MarkovControl(Control):
    """u(t) = fn(t, X(t)) for a user rule of the current state only.

    `fn` must be vectorized in its second argument (numpy broadcasting) for
    the streaming engines; the declared bound is enforced by the simulator's
    clamp, with violations counted.
    """

    def __init__(self, fn, bound: float, label: str = ""):
        if not callable(fn):
            raise InvalidConfig("fn must be callable")
        super().__init__(bound, label=label or "markov")
        self.fn = fn

    def evaluate(self, t: float, history: np.ndarray) -> float:
        return float(self.fn(t, history[-1]))

    def drift_batch(self, t: float, x: np.ndarray, state):
        return self.fn(t, x)


def builtin_controls() -> dict:
    """Catalog of the built-in control factories, keyed by CLI name.

    ``constant`` takes the drift value, the bang-bang rules take an optional
    scale (default 1). Anything else is expressed through the Control
    interface directly.
    """
    return {
        "constant": ConstantControl,
        "bang_bang_sgn": BangBangControl,
        "running_max": RunningMaxControl,
    }


def make_control(text: str) -> Control:
    """Build a control from its CLI spelling, e.g. ``constant:-1``.

    Grammar: ``name`` or ``name:arg`` with name in builtin_controls() and a
    single float argument (the constant's value, or the bang-bang scale).
    """
    if not isinstance(text, str) or not text:
        raise InvalidConfig("control spec must be a non-empty string")
    name, _, arg = text.partition(":")
    catalog = builtin_controls()
    if name not in catalog:
        raise InvalidConfig(
            f"unknown control {name!r}; available: {sorted(catalog)}"
        )
    factory = catalog[name]
    if name == "constant":
        if not arg:
            raise InvalidConfig("constant control needs a value, e.g. constant:-1")
        try:
            return factory(float(arg))
        except ValueError as exc:
            raise InvalidConfig(f"bad constant value {arg!r}") from exc
    if arg:
        try:
            return factory(float(arg))
        except ValueError as exc:
            raise InvalidConfig(f"bad scale {arg!r} for {name}") from exc
    return factory()
