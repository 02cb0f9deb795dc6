"""Small input-validation helpers shared across modules."""

from __future__ import annotations

import math
import numbers

import numpy as np

from .errors import InvalidConfig


def check_finite_real(value, name: str) -> float:
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise InvalidConfig(f"{name} must be a real number, got {value!r}")
    x = float(value)
    if not math.isfinite(x):
        raise InvalidConfig(f"{name} must be finite, got {x!r}")
    return x


def check_positive(value, name: str) -> float:
    x = check_finite_real(value, name)
    if x <= 0.0:
        raise InvalidConfig(f"{name} must be > 0, got {x!r}")
    return x


def check_nonnegative(value, name: str) -> float:
    x = check_finite_real(value, name)
    if x < 0.0:
        raise InvalidConfig(f"{name} must be >= 0, got {x!r}")
    return x


def check_index(value, name: str, minimum: int = 0) -> int:
    if not isinstance(value, numbers.Integral) or isinstance(value, bool):
        raise InvalidConfig(f"{name} must be an integer, got {value!r}")
    n = int(value)
    if n < minimum:
        raise InvalidConfig(f"{name} must be >= {minimum}, got {n}")
    return n


def check_samples(samples, name: str = "samples", min_size: int = 1) -> np.ndarray:
    """Coerce to a finite 1-d float64 array."""
    arr = np.asarray(samples, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidConfig(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_size:
        raise InvalidConfig(f"{name} needs at least {min_size} values, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise InvalidConfig(f"{name} must be finite")
    return arr
