"""Three-way overlap test between the means of two bounded streams.

The possible outcomes are ``H1-`` (``E_P[X] < E_Q[Y]``: the X interval lies
strictly below the Y interval), ``H1+`` (the mirror case), ``H0`` (the
intervals intersect) and, for the sequential engine only, ``continue``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

from ._validation import (
    EngineFrozenError,
    SupportBounds,
    as_bounds,
    check_alpha,
    check_count,
    check_sample,
)
from .evalue import EProcessState
from .intervals import ConfidenceInterval, confidence_interval, interval_endpoints
from .weights import make_schedule

__all__ = [
    "Decision",
    "OverlapEngine",
    "Outcome",
    "TestConfig",
    "anytime_step",
    "decide",
    "fixed_time_decision",
    "union_length",
]


class Outcome(str, enum.Enum):
    H1_MINUS = "H1-"
    H0 = "H0"
    H1_PLUS = "H1+"
    CONTINUE = "continue"

    @property
    def label(self) -> str:
        """Table label: relation of the X mean to the Y mean."""
        return _LABELS[self]


_LABELS = {
    Outcome.H1_MINUS: "lower",
    Outcome.H0: "equal",
    Outcome.H1_PLUS: "larger",
    Outcome.CONTINUE: "undecided",
}

MODES = ("anytime", "fixed")


@dataclass(frozen=True)
class TestConfig:
    """Parameters of one pairwise comparison.

    ``schedule`` defaults to ``"anytime"`` in anytime mode and to
    ``"fixed-hoeffding"`` in fixed mode.  ``n`` and ``m`` are the fixed-time
    horizons; when left unset they are taken from the sample sizes.
    """

    __test__ = False  # not a pytest class

    alpha: float = 0.1
    delta: float = 0.1
    t0: int = 1
    c: float = 1.0
    bounds_p: SupportBounds = field(default_factory=SupportBounds)
    bounds_q: SupportBounds = field(default_factory=SupportBounds)
    mode: str = "anytime"
    n: int | None = None
    m: int | None = None
    schedule: str | None = None
    stride: int = 1
    method: str = "newton"

    def __post_init__(self):
        check_alpha(self.alpha)
        if not self.delta > 0:
            raise ValueError(f"effect size delta must be > 0, got {self.delta}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        object.__setattr__(self, "t0", check_count(self.t0, "t0"))
        object.__setattr__(self, "stride", check_count(self.stride, "stride"))
        object.__setattr__(self, "bounds_p", as_bounds(self.bounds_p))
        object.__setattr__(self, "bounds_q", as_bounds(self.bounds_q))
        if self.schedule is None:
            default = "anytime" if self.mode == "anytime" else "fixed-hoeffding"
            object.__setattr__(self, "schedule", default)

    def make_schedule(self, arm: str, horizon: int | None = None):
        arm = _arm(arm)
        bounds = self.bounds_p if arm == "P" else self.bounds_q
        if horizon is None:
            horizon = self.n if arm == "P" else self.m
        return make_schedule(
            self.schedule,
            alpha=self.alpha,
            bounds=bounds,
            n=horizon,
            c=self.c,
            t0=self.t0,
        )

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "alpha": self.alpha,
            "delta": self.delta,
            "t0": self.t0,
            "c": self.c,
            "schedule": self.schedule,
            "bounds_p": list(self.bounds_p.as_tuple()),
            "bounds_q": list(self.bounds_q.as_tuple()),
            "n": self.n,
            "m": self.m,
            "stride": self.stride,
            "method": self.method,
        }


@dataclass(frozen=True)
class Decision:
    outcome: Outcome
    n: int
    m: int
    ci_x: ConfidenceInterval | None = None
    ci_y: ConfidenceInterval | None = None

    @property
    def terminal(self) -> bool:
        return self.outcome is not Outcome.CONTINUE

    def as_dict(self) -> dict:
        return {
            "decision": self.outcome.value,
            "relation": self.outcome.label,
            "n": self.n,
            "m": self.m,
            "interval_x": None if self.ci_x is None else self.ci_x.as_dict(),
            "interval_y": None if self.ci_y is None else self.ci_y.as_dict(),
        }


def union_length(ci_x, ci_y) -> float:
    """Length of the smallest interval covering both intervals."""
    return max(ci_x.hi, ci_y.hi) - min(ci_x.lo, ci_y.lo)


def decide(lo_x, hi_x, lo_y, hi_y, delta=None) -> Outcome:
    """Apply the overlap rules in order H1+, H1-, H0.

    With ``delta=None`` (fixed-time test) intersecting intervals give H0
    directly; otherwise H0 also needs the union to be no longer than ``delta``.
    """
    if lo_x > hi_y:
        return Outcome.H1_PLUS
    if hi_x < lo_y:
        return Outcome.H1_MINUS
    if delta is None or max(hi_x, hi_y) - min(lo_x, lo_y) <= delta:
        return Outcome.H0
    return Outcome.CONTINUE


def fixed_time_decision(xs, ys, config: TestConfig) -> Decision:
    """Fixed-time overlap test on two complete samples.

    Each stream's weights use its own horizon (``config.n`` / ``config.m`` if
    set, else the sample size).
    """
    xs = check_sample(xs, config.bounds_p, name="xs")
    ys = check_sample(ys, config.bounds_q, name="ys")
    if xs.size == 0 or ys.size == 0:
        raise ValueError("fixed-time decision needs non-empty samples")
    if config.mode != "fixed":
        config = replace(config, mode="fixed", schedule=None)
    sx = EProcessState(config.make_schedule("P", config.n or xs.size)).extend(xs)
    sy = EProcessState(config.make_schedule("Q", config.m or ys.size)).extend(ys)
    ci_x = confidence_interval(sx, config.alpha, config.method)
    ci_y = confidence_interval(sy, config.alpha, config.method)
    outcome = decide(ci_x.lo, ci_x.hi, ci_y.lo, ci_y.hi)
    return Decision(outcome, sx.n, sy.n, ci_x, ci_y)


def _arm(arm) -> str:
    key = str(arm).upper()
    if key in ("P", "X", "0"):
        return "P"
    if key in ("Q", "Y", "1"):
        return "Q"
    raise ValueError(f"arm must be 'P' or 'Q', got {arm!r}")


class OverlapEngine:
    """Sequential overlap test fed one observation at a time.

    No decision is evaluated before both streams hold ``t0`` observations.
    After a terminal decision the engine is frozen and rejects input.

    Parameters
    ----------
    config : TestConfig
        In anytime mode the default schedule is :class:`~evoverlap.weights.Anytime`
        with the config's ``t0``.
    """

    def __init__(self, config: TestConfig):
        if config.mode != "anytime":
            config = replace(config, mode="anytime")
        self.config = config
        self.x_state = EProcessState(config.make_schedule("P"))
        self.y_state = EProcessState(config.make_schedule("Q"))
        self.terminal: Decision | None = None
        self.checks = 0
        self._ends = {"P": None, "Q": None}
        self._pending = 0

    def __repr__(self):
        state = "frozen" if self.terminal is not None else "running"
        return f"OverlapEngine(n={self.n}, m={self.m}, {state})"

    @property
    def n(self) -> int:
        return self.x_state.n

    @property
    def m(self) -> int:
        return self.y_state.n

    def state(self, arm) -> EProcessState:
        return self.x_state if _arm(arm) == "P" else self.y_state

    @property
    def burned_in(self) -> bool:
        t0 = self.config.t0
        return self.x_state.n >= t0 and self.y_state.n >= t0

    def observe(self, arm, value) -> Decision:
        """Ingest one observation and evaluate the decision rules."""
        self._ingest(arm, value)
        return self._evaluate()

    def observe_batch(self, arm, values) -> Decision:
        """Ingest every value, then evaluate the rules once."""
        for v in values:
            self._ingest(arm, v)
        return self._evaluate(force=True)

    def endpoints(self, arm) -> tuple[float, float, bool, bool]:
        key = _arm(arm)
        if self._ends[key] is None:
            self._ends[key] = interval_endpoints(
                self.state(key), self.config.alpha, self.config.method
            )
        return self._ends[key]

    def interval(self, arm) -> ConfidenceInterval:
        """Current interval of one arm (reuses the endpoints the rules saw)."""
        key = _arm(arm)
        st = self.state(key)
        lo, hi, clo, chi = self.endpoints(key)
        mu = 0.5 * (lo + hi) if st.n == 0 else min(max(st.minimizer(), lo), hi)
        return ConfidenceInterval(lo, hi, self.config.alpha, st.n, mu, clo, chi)

    def intervals(self) -> tuple[ConfidenceInterval, ConfidenceInterval]:
        return self.interval("P"), self.interval("Q")

    def _ingest(self, arm, value):
        if self.terminal is not None:
            raise EngineFrozenError(
                f"engine already decided {self.terminal.outcome.value} at "
                f"n={self.terminal.n}, m={self.terminal.m}; every observation "
                "must be part of the test"
            )
        key = _arm(arm)
        self.state(key).observe(value)
        self._ends[key] = None
        self._pending += 1

    def _evaluate(self, force=False) -> Decision:
        if not self.burned_in:
            return Decision(Outcome.CONTINUE, self.n, self.m)
        if not force and self.checks and self._pending < self.config.stride:
            return Decision(Outcome.CONTINUE, self.n, self.m)
        self._pending = 0
        self.checks += 1
        lo_x, hi_x, _, _ = self.endpoints("P")
        lo_y, hi_y, _, _ = self.endpoints("Q")
        outcome = decide(lo_x, hi_x, lo_y, hi_y, self.config.delta)
        if outcome is Outcome.CONTINUE:
            return Decision(outcome, self.n, self.m)
        ci_x, ci_y = self.intervals()
        self.terminal = Decision(outcome, self.n, self.m, ci_x, ci_y)
        return self.terminal


def anytime_step(engine: OverlapEngine, arm, x) -> Decision:
    return engine.observe(arm, x)
