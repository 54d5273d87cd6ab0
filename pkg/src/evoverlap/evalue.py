"""Betting e-process for the mean of a bounded stream.

For a candidate mean ``z`` and predictable weights ``w_t`` the e-process is

    E_n(z) = 1/2 * max( prod_t (1 + w_t (x_t - z)), prod_t (1 - w_t (x_t - z)) ).

:class:`EProcessState` stores the whole ``(x_t, w_t)`` history, because
``E_n(z)`` has no finite sufficient statistic in ``z``.  Evaluation is only
offered on the support ``[a, b]`` where every factor is strictly positive.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from . import _kernels
from ._validation import OutOfSupportError, SupportBounds, check_sample
from .weights import RunningVariance

__all__ = [
    "EProcessState",
    "LogEValue",
    "log_derivative_bounds",
    "log_eprocess_at",
    "minimizer",
    "observe",
]

LOG2 = math.log(2.0)


class LogEValue(NamedTuple):
    log_plus: float
    log_minus: float
    log_e: float


class EProcessState:
    """Observation/weight history of one stream plus its running moments.

    Parameters
    ----------
    schedule : weight schedule
        Any object with ``bounds`` and ``weight(t, sigma_sq_prev)``; see
        :mod:`evoverlap.weights`.
    grid : array-like, optional
        Fixed evaluation points inside the support.  When given, the two
        one-sided log-products are maintained on the grid in ``O(len(grid))``
        per observation (see :meth:`log_evalue_grid`).
    """

    def __init__(self, schedule, grid=None):
        self.schedule = schedule
        self.bounds: SupportBounds = schedule.bounds
        self._x = np.empty(64)
        self._w = np.empty(64)
        self.n = 0
        self._rv = RunningVariance(sigma0_sq=(self.bounds.width / 2.0) ** 2)
        self._warm: dict = {}
        if grid is None:
            self.grid = None
        else:
            self.grid = np.asarray(grid, dtype=float)
            if self.grid.ndim != 1 or np.any(
                (self.grid < self.bounds.a) | (self.grid > self.bounds.b)
            ):
                raise OutOfSupportError("grid points must lie inside the support")
            self._grid_plus = np.zeros_like(self.grid)
            self._grid_minus = np.zeros_like(self.grid)

    def __repr__(self):
        return (
            f"EProcessState(n={self.n}, bounds=[{self.bounds.a}, {self.bounds.b}], "
            f"schedule={self.schedule.name})"
        )

    # -- history ---------------------------------------------------------

    @property
    def xs(self) -> np.ndarray:
        return self._x[: self.n]

    @property
    def weights(self) -> np.ndarray:
        return self._w[: self.n]

    @property
    def running_mean(self) -> float:
        return self._rv.mean

    @property
    def running_ssq(self) -> float:
        return self._rv.ssq

    @property
    def variance(self) -> float:
        """Empirical variance of the observations so far (``sigma0^2`` when empty)."""
        return self._rv.variance

    def next_weight(self) -> float:
        """Weight that the next observation will be paired with."""
        return self.schedule.weight(self.n + 1, self._rv.variance)

    def observe(self, x: float) -> "EProcessState":
        x = self.bounds.check(x)
        w = self.next_weight()
        if self.n == self._x.shape[0]:
            self._x = np.concatenate([self._x, np.empty_like(self._x)])
            self._w = np.concatenate([self._w, np.empty_like(self._w)])
        self._x[self.n] = x
        self._w[self.n] = w
        self.n += 1
        self._rv.update(x)
        if self.grid is not None:
            d = w * (x - self.grid)
            self._grid_plus += np.log1p(d)
            self._grid_minus += np.log1p(-d)
        return self

    def extend(self, xs) -> "EProcessState":
        for x in check_sample(xs, self.bounds):
            self.observe(x)
        return self

    def copy(self) -> "EProcessState":
        new = EProcessState.__new__(EProcessState)
        new.__dict__.update(self.__dict__)
        new._x = self._x.copy()
        new._w = self._w.copy()
        new._rv = RunningVariance(
            self._rv.count, self._rv.mean, self._rv.ssq, self._rv.sigma0_sq
        )
        new._warm = dict(self._warm)
        if self.grid is not None:
            new._grid_plus = self._grid_plus.copy()
            new._grid_minus = self._grid_minus.copy()
        return new

    # -- evaluation ------------------------------------------------------

    def log_evalue(self, z: float) -> LogEValue:
        z = self.bounds.check(z, what="evaluation point")
        lp, lm = _kernels.log_sums(self.xs, self.weights, z)
        return LogEValue(lp, lm, max(lp, lm) - LOG2)

    def log_evalue_many(self, zs) -> np.ndarray:
        """Vectorised ``log E_n`` over an array of points in the support."""
        zs = check_sample(zs, self.bounds, name="evaluation points")
        out = np.empty(zs.shape[0])
        step = max(1, 2_000_000 // max(self.n, 1))
        for i in range(0, zs.shape[0], step):
            d = self.weights[None, :] * (self.xs[None, :] - zs[i : i + step, None])
            lp = np.log1p(d).sum(axis=1)
            lm = np.log1p(-d).sum(axis=1)
            out[i : i + step] = np.maximum(lp, lm) - LOG2
        return out

    def log_evalue_grid(self) -> np.ndarray:
        """``log E_n`` on the fixed grid, from the incrementally updated sums."""
        if self.grid is None:
            raise ValueError("state was created without an evaluation grid")
        return np.maximum(self._grid_plus, self._grid_minus) - LOG2

    def minimizer(self) -> float:
        if self.n < 1:
            raise ValueError("the minimiser needs at least one observation")
        a, b = self.bounds.a, self.bounds.b
        z0 = self._warm.get("mu_hat", self.running_mean)
        mu = _kernels.crossing(
            self.xs, self.weights, a, b, z0, 1e-10 * (b - a), 200
        )
        self._warm["mu_hat"] = mu
        return mu

    def log_derivative_bounds(self) -> tuple[float, float]:
        if self.n < 1:
            raise ValueError("derivative bounds need at least one observation")
        wr = self.weights * self.bounds.width
        w = self.weights
        return float(np.sum(w / (1.0 + wr))), float(np.sum(w / (1.0 - wr)))


# functional spellings


def observe(state: EProcessState, x: float) -> EProcessState:
    return state.observe(x)


def log_eprocess_at(state: EProcessState, z: float) -> LogEValue:
    return state.log_evalue(z)


def minimizer(state: EProcessState) -> float:
    return state.minimizer()


def log_derivative_bounds(state: EProcessState) -> tuple[float, float]:
    return state.log_derivative_bounds()
