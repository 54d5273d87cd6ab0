"""scikit-learn style wrappers around the interval and the overlap test."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import as_bounds, check_alpha
from .evalue import EProcessState
from .intervals import confidence_interval
from .overlap import OverlapEngine, TestConfig, fixed_time_decision
from .weights import make_schedule

__all__ = ["BettingConfidenceInterval", "OverlapTest"]


def _column(X) -> np.ndarray:
    """Accept a 1-d sample or a single-column 2-d array."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 2 and X.shape[1] == 1:
        X = X[:, 0]
    if X.ndim != 1:
        raise ValueError(f"expected a 1-d sample or one column, got shape {X.shape}")
    return X


class BettingConfidenceInterval(BaseEstimator):
    """Confidence interval for the mean of a bounded sample.

    Parameters
    ----------
    alpha : float, default=0.1
    bounds : tuple of float, default=(0.0, 1.0)
        Support ``(a, b)`` of the observations.  Never inferred from data.
    schedule : {"anytime", "fixed-hoeffding", "fixed-bernstein"}
    c : float, default=1.0
    t0 : int, default=1
        Burn-in of the anytime schedule.
    n_horizon : int or None
        Horizon of the fixed schedules; the size of the first ``fit`` sample
        when None.
    method : {"newton", "bisection"}

    Attributes
    ----------
    lo_, hi_, mu_hat_ : float
    n_samples_seen_ : int
    state_ : EProcessState
    """

    def __init__(
        self, alpha=0.1, bounds=(0.0, 1.0), schedule="anytime", c=1.0, t0=1,
        n_horizon=None, method="newton",
    ):
        self.alpha = alpha
        self.bounds = bounds
        self.schedule = schedule
        self.c = c
        self.t0 = t0
        self.n_horizon = n_horizon
        self.method = method

    def _new_state(self, horizon):
        check_alpha(self.alpha)
        sched = make_schedule(
            self.schedule, alpha=self.alpha, bounds=as_bounds(self.bounds),
            n=self.n_horizon or horizon, c=self.c, t0=self.t0,
        )
        return EProcessState(sched)

    def fit(self, X, y=None):
        X = _column(X)
        self.state_ = self._new_state(max(X.shape[0], 1))
        return self._update(X)

    def partial_fit(self, X, y=None):
        """Append observations (in order) to the current history."""
        X = _column(X)
        if not hasattr(self, "state_"):
            self.state_ = self._new_state(max(X.shape[0], 1))
        return self._update(X)

    def _update(self, X):
        self.state_.extend(X)
        ci = confidence_interval(self.state_, self.alpha, self.method)
        self.interval_ = ci
        self.lo_, self.hi_, self.mu_hat_ = ci.lo, ci.hi, ci.mu_hat
        self.n_samples_seen_ = self.state_.n
        return self

    def predict(self, Z):
        """Membership of candidate means in the interval."""
        check_is_fitted(self, "interval_")
        Z = np.asarray(Z, dtype=float)
        return (Z >= self.lo_) & (Z <= self.hi_)

    def transform(self, X=None):
        """The interval as a ``(1, 2)`` array ``[[lo, hi]]``."""
        check_is_fitted(self, "interval_")
        return np.array([[self.lo_, self.hi_]])


class OverlapTest(BaseEstimator):
    """Overlap test between two bounded samples.

    ``fit(X, Y)`` runs the fixed-time test in ``mode="fixed"``.  In
    ``mode="anytime"`` the two samples are replayed alternately (X first)
    through the sequential engine until a decision; ``partial_fit`` then
    continues the same engine.

    Attributes
    ----------
    decision_ : Decision
    outcome_ : str
        ``"H1-"``, ``"H0"``, ``"H1+"`` or ``"continue"``.
    """

    def __init__(
        self, alpha=0.1, delta=0.1, t0=1, c=1.0, bounds_x=(0.0, 1.0),
        bounds_y=(0.0, 1.0), mode="fixed", method="newton",
    ):
        self.alpha = alpha
        self.delta = delta
        self.t0 = t0
        self.c = c
        self.bounds_x = bounds_x
        self.bounds_y = bounds_y
        self.mode = mode
        self.method = method

    def _config(self) -> TestConfig:
        return TestConfig(
            alpha=self.alpha, delta=self.delta, t0=self.t0, c=self.c,
            bounds_p=self.bounds_x, bounds_q=self.bounds_y, mode=self.mode,
            method=self.method,
        )

    def fit(self, X, Y):
        X, Y = _column(X), _column(Y)
        config = self._config()
        if self.mode == "fixed":
            self.engine_ = None
            self.decision_ = fixed_time_decision(X, Y, config)
        else:
            self.engine_ = OverlapEngine(config)
            self.decision_ = self._replay(X, Y)
        self.outcome_ = self.decision_.outcome.value
        return self

    def partial_fit(self, X, Y):
        if self.mode == "fixed":
            raise ValueError("partial_fit needs mode='anytime'")
        if getattr(self, "engine_", None) is None:
            self.engine_ = OverlapEngine(self._config())
        self.decision_ = self._replay(_column(X), _column(Y))
        self.outcome_ = self.decision_.outcome.value
        return self

    def _replay(self, X, Y):
        eng = self.engine_
        d = None
        for i in range(max(X.shape[0], Y.shape[0])):
            for arm, s in (("P", X), ("Q", Y)):
                if i < s.shape[0]:
                    d = eng.observe(arm, s[i])
                    if d.terminal:
                        return d
        return d if d is not None else eng._evaluate(force=True)

    def predict(self, X=None):
        check_is_fitted(self, "decision_")
        return self.outcome_
