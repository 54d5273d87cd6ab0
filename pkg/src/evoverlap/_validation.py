"""Input validation helpers shared by the estimators and the functional API."""

from __future__ import annotations

import math
import numbers
import warnings
from dataclasses import dataclass

import numpy as np


class OutOfSupportError(ValueError):
    """An observation or evaluation point lies outside the declared support."""


class EngineFrozenError(RuntimeError):
    """An observation arrived after the overlap engine reached a decision."""


@dataclass(frozen=True)
class SupportBounds:
    """Closed support interval ``[a, b]`` of a bounded random variable."""

    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ValueError(f"support bounds must be finite, got [{a}, {b}]")
        if not a < b:
            raise ValueError(f"support bounds require a < b, got [{a}, {b}]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def width(self) -> float:
        return self.b - self.a

    def contains(self, x: float) -> bool:
        return self.a <= x <= self.b

    def check(self, x: float, what: str = "observation") -> float:
        x = float(x)
        if not (self.a <= x <= self.b):
            raise OutOfSupportError(
                f"{what} x={x!r} lies outside the support [a={self.a!r}, b={self.b!r}]"
            )
        return x

    def as_tuple(self) -> tuple[float, float]:
        return (self.a, self.b)


def as_bounds(bounds) -> SupportBounds:
    """Coerce ``bounds`` (a SupportBounds, a pair, or ``"a,b"``) to SupportBounds."""
    if isinstance(bounds, SupportBounds):
        return bounds
    if isinstance(bounds, str):
        parts = bounds.split(",")
        if len(parts) != 2:
            raise ValueError(f"bounds must look like 'a,b', got {bounds!r}")
        return SupportBounds(float(parts[0]), float(parts[1]))
    a, b = bounds
    return SupportBounds(a, b)


def check_alpha(alpha) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return alpha


def check_tuning_constant(c) -> float:
    """Validate the weight tuning constant; values below 1 are allowed with a warning."""
    c = float(c)
    if not (c > 0.0 and math.isfinite(c)):
        raise ValueError(f"tuning constant c must be positive and finite, got {c}")
    if c < 1.0:
        warnings.warn(
            f"tuning constant c={c} is below 1; the intervals stay valid but the "
            "type I bound derivation assumes c >= 1",
            stacklevel=3,
        )
    return c


def check_count(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        else:
            raise ValueError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_sample(values, bounds: SupportBounds, name: str = "sample") -> np.ndarray:
    """Return ``values`` as a 1-d float array after checking it lies in ``bounds``."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 2 and 1 in arr.shape:
        arr = arr.reshape(-1)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    bad = np.flatnonzero((arr < bounds.a) | (arr > bounds.b))
    if bad.size:
        i = int(bad[0])
        raise OutOfSupportError(
            f"{name}[{i}] x={arr[i]!r} lies outside the support "
            f"[a={bounds.a!r}, b={bounds.b!r}]"
        )
    return arr
