"""Predictable betting weights and the running variance that feeds them.

Three schedules are provided:

* :class:`FixedHoeffding` -- constant weights tuned for a known horizon ``n``;
* :class:`FixedBernstein` -- horizon-tuned weights plugging in the running
  variance, capped at the Hoeffding weight so that ``w (b - a) < 1``;
* :class:`Anytime` -- deterministic weights during a burn-in of ``t0``
  observations, variance-adaptive weights afterwards.

Every schedule exposes ``weight(t, sigma_sq_prev)`` where ``sigma_sq_prev`` is
the empirical variance of the first ``t - 1`` observations, so the weight used
with ``x_t`` never looks at ``x_t`` itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import (
    SupportBounds,
    as_bounds,
    check_alpha,
    check_count,
    check_tuning_constant,
)

__all__ = [
    "Anytime",
    "FixedBernstein",
    "FixedHoeffding",
    "RunningVariance",
    "anytime_weight",
    "fixed_bernstein_weight",
    "fixed_hoeffding_weight",
    "make_schedule",
    "update_variance",
    "SCHEDULES",
]


def fixed_hoeffding_weight(n, alpha, c, bounds) -> float:
    """Constant weight ``1/(b-a) * 1/(1 + sqrt(n / (8 c^2 log(2/alpha))))``."""
    n = check_count(n, "n")
    alpha = check_alpha(alpha)
    c = check_tuning_constant(c)
    bounds = as_bounds(bounds)
    return _hoeffding(n, math.log(2.0 / alpha), c, bounds.width)


def fixed_bernstein_weight(n, alpha, sigma_sq_prev, bounds) -> float:
    """Uncapped fixed-time Bernstein weight ``1/((b-a) + sqrt(n s^2 / (2 log(2/alpha))))``.

    With ``sigma_sq_prev == 0`` this equals ``1/(b-a)``, which is not a valid
    weight on its own; :class:`FixedBernstein` applies the cap.
    """
    n = check_count(n, "n")
    alpha = check_alpha(alpha)
    if sigma_sq_prev < 0:
        raise ValueError(f"sigma_sq_prev must be >= 0, got {sigma_sq_prev}")
    bounds = as_bounds(bounds)
    return _bernstein(n, math.log(2.0 / alpha), sigma_sq_prev, bounds.width)


def anytime_weight(t, t0, alpha, c, sigma_sq_prev, bounds) -> float:
    """Anytime weight at step ``t`` (deterministic for ``t <= t0``)."""
    t = check_count(t, "t")
    t0 = check_count(t0, "t0")
    alpha = check_alpha(alpha)
    c = check_tuning_constant(c)
    bounds = as_bounds(bounds)
    return _anytime(t, t0, math.log(2.0 / alpha), c, sigma_sq_prev, bounds.width)


# unchecked kernels used on the hot path


def _hoeffding(n, log_term, c, width):
    return 1.0 / (width * (1.0 + math.sqrt(n / (8.0 * c * c * log_term))))


def _bernstein(n, log_term, sigma_sq, width):
    return 1.0 / (width + math.sqrt(n * sigma_sq / (2.0 * log_term)))


def _anytime(t, t0, log_term, c, sigma_sq, width):
    if t <= t0:
        return _hoeffding(t * math.log(t + 1.0), log_term, c, width)
    cap = _hoeffding(t0 * math.log(t + 1.0), log_term, c, width)
    return min(_bernstein(t * math.log1p(t), log_term, sigma_sq, width), cap)


@dataclass
class RunningVariance:
    """One-pass (Welford) mean and sum of squared deviations.

    ``variance`` is the biased empirical variance ``ssq / count``; before any
    observation it returns ``sigma0_sq``.
    """

    count: int = 0
    mean: float = 0.0
    ssq: float = 0.0
    sigma0_sq: float = 0.25

    @property
    def variance(self) -> float:
        if self.count == 0:
            return self.sigma0_sq
        return max(self.ssq / self.count, 0.0)

    def update(self, x: float) -> "RunningVariance":
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self.ssq += delta * (x - self.mean)
        return self


def update_variance(rv: RunningVariance, x: float) -> RunningVariance:
    """Functional form of :meth:`RunningVariance.update` (returns a new object)."""
    out = RunningVariance(rv.count, rv.mean, rv.ssq, rv.sigma0_sq)
    return out.update(float(x))


@dataclass(frozen=True)
class _Schedule:
    alpha: float = 0.1
    bounds: SupportBounds = field(default_factory=SupportBounds)

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        object.__setattr__(self, "bounds", as_bounds(self.bounds))

    @property
    def log_term(self) -> float:
        return math.log(2.0 / self.alpha)

    def weights(self, sigma_sq_prev) -> np.ndarray:
        """Weights for ``t = 1..len(sigma_sq_prev)`` given the predictable variances."""
        return np.array(
            [self.weight(t, s) for t, s in enumerate(sigma_sq_prev, start=1)]
        )


@dataclass(frozen=True)
class FixedHoeffding(_Schedule):
    n: int = 1
    c: float = 1.0
    name = "fixed-hoeffding"

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "n", check_count(self.n, "n"))
        object.__setattr__(self, "c", check_tuning_constant(self.c))
        object.__setattr__(
            self, "_w", _hoeffding(self.n, self.log_term, self.c, self.bounds.width)
        )

    @property
    def deterministic_until(self) -> float:
        return math.inf

    def weight(self, t: int, sigma_sq_prev: float = 0.0) -> float:
        return self._w


@dataclass(frozen=True)
class FixedBernstein(_Schedule):
    n: int = 1
    c: float = 1.0
    name = "fixed-bernstein"

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "n", check_count(self.n, "n"))
        object.__setattr__(self, "c", check_tuning_constant(self.c))
        object.__setattr__(
            self, "_cap", _hoeffding(self.n, self.log_term, self.c, self.bounds.width)
        )

    @property
    def deterministic_until(self) -> float:
        return 0

    def weight(self, t: int, sigma_sq_prev: float) -> float:
        w = _bernstein(self.n, self.log_term, sigma_sq_prev, self.bounds.width)
        return min(w, self._cap)


@dataclass(frozen=True)
class Anytime(_Schedule):
    c: float = 1.0
    t0: int = 1
    name = "anytime"

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "c", check_tuning_constant(self.c))
        object.__setattr__(self, "t0", check_count(self.t0, "t0"))

    @property
    def deterministic_until(self) -> float:
        return self.t0

    def weight(self, t: int, sigma_sq_prev: float) -> float:
        return _anytime(
            t, self.t0, self.log_term, self.c, sigma_sq_prev, self.bounds.width
        )


SCHEDULES = {
    "fixed-hoeffding": FixedHoeffding,
    "fixed-bernstein": FixedBernstein,
    "anytime": Anytime,
}


def make_schedule(name, *, alpha, bounds, n=None, c=1.0, t0=1):
    """Build a schedule from its CLI name."""
    if name not in SCHEDULES:
        raise ValueError(f"unknown schedule {name!r}; choose from {sorted(SCHEDULES)}")
    if name == "anytime":
        return Anytime(alpha=alpha, bounds=bounds, c=c, t0=t0)
    if n is None:
        raise ValueError(f"schedule {name!r} needs the horizon n")
    return SCHEDULES[name](alpha=alpha, bounds=bounds, n=n, c=c)
