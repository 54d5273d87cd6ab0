"""Betting e-process confidence intervals and overlap tests for bounded means."""

from ._validation import EngineFrozenError, OutOfSupportError, SupportBounds
from .bounds import (
    ErrorBounds,
    GapBoundResult,
    c_t0,
    error_bounds,
    gap_probability_bound,
    t0_heuristic,
    type1_bound,
    type2_anytime_bound,
    type2_fixed_bound,
    type3_bound,
)
from .estimators import BettingConfidenceInterval, OverlapTest
from .evalue import EProcessState, LogEValue, log_eprocess_at
from .intervals import (
    ConfidenceInterval,
    LengthBound,
    confidence_interval,
    length_bound_constant_weights,
    lh_bound,
)
from .overlap import (
    Decision,
    Outcome,
    OverlapEngine,
    TestConfig,
    anytime_step,
    decide,
    fixed_time_decision,
    union_length,
)
from .weights import (
    Anytime,
    FixedBernstein,
    FixedHoeffding,
    RunningVariance,
    anytime_weight,
    fixed_bernstein_weight,
    fixed_hoeffding_weight,
    make_schedule,
)

__all__ = [
    "Anytime",
    "BettingConfidenceInterval",
    "ConfidenceInterval",
    "Decision",
    "EProcessState",
    "EngineFrozenError",
    "ErrorBounds",
    "FixedBernstein",
    "FixedHoeffding",
    "GapBoundResult",
    "LengthBound",
    "LogEValue",
    "OutOfSupportError",
    "Outcome",
    "OverlapEngine",
    "OverlapTest",
    "RunningVariance",
    "SupportBounds",
    "TestConfig",
    "anytime_step",
    "anytime_weight",
    "c_t0",
    "confidence_interval",
    "decide",
    "error_bounds",
    "fixed_bernstein_weight",
    "fixed_hoeffding_weight",
    "fixed_time_decision",
    "gap_probability_bound",
    "length_bound_constant_weights",
    "lh_bound",
    "log_eprocess_at",
    "make_schedule",
    "t0_heuristic",
    "type1_bound",
    "type2_anytime_bound",
    "type2_fixed_bound",
    "type3_bound",
    "union_length",
]
