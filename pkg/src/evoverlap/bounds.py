"""Closed-form bounds on the error probabilities of the overlap tests.

All bounds are per side (type I) or per direction (type III) and capped at 1.
:func:`error_bounds` assembles them for a :class:`~evoverlap.overlap.TestConfig`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import as_bounds, check_alpha, check_count
from .intervals import lh_bound
from .weights import FixedHoeffding

__all__ = [
    "ErrorBounds",
    "GapBoundResult",
    "bernoulli_kl",
    "c_t0",
    "error_bounds",
    "gap_probability_bound",
    "optimal_eta_prime",
    "t0_heuristic",
    "type1_bound",
    "type2_anytime_bound",
    "type2_fixed_bound",
    "type3_bound",
    "weight_sums",
]


def _cap(p: float) -> float:
    return min(p, 1.0)


def weight_sums(weights, bounds) -> tuple[float, float]:
    """``(sum w/(1 + w(b-a)), sum w/(1 - w(b-a)))`` for a weight sequence."""
    w = np.asarray(weights, dtype=float)
    wr = w * as_bounds(bounds).width
    if np.any(wr >= 1.0) or np.any(w <= 0.0):
        raise ValueError("every weight must satisfy 0 < w (b - a) < 1")
    return float(np.sum(w / (1.0 + wr))), float(np.sum(w / (1.0 - wr)))


def c_t0(weights_x, weights_y, bounds_p, bounds_q) -> float:
    """Largest ratio ``sum w/(1 - w(b-a)) / sum w/(1 + w(b-a))`` over the two streams."""
    plus_x, minus_x = weight_sums(weights_x, bounds_p)
    plus_y, minus_y = weight_sums(weights_y, bounds_q)
    return max(minus_x / plus_x, minus_y / plus_y)


def type1_bound(alpha, c_t0) -> float:
    """Per-side probability of declaring a difference when the means are equal."""
    alpha = check_alpha(alpha)
    C = float(c_t0)
    if C < 1.0:
        raise ValueError(f"C_t0 must be >= 1, got {C}")
    # (4 / (alpha C))^(C/(1+C)) overflows for huge C; work in logs
    t1 = math.exp(math.log(alpha) + math.log(alpha * C / 4.0) / (1.0 + C))
    t2 = math.exp(2.0 * math.log(alpha) - math.log(4.0)
                  + C / (1.0 + C) * math.log(4.0 / (alpha * C)))
    return _cap(t1 + t2)


def type2_anytime_bound(alpha) -> float:
    return _cap(2.0 * check_alpha(alpha))


def type2_fixed_bound(delta, n, m, alpha, c, bounds_p, bounds_q) -> float | None:
    """Fixed-time type II bound, or None when it does not apply.

    The bound needs ``delta > L_H(P) + L_H(Q)``; with too few samples either
    length bound is not computable or the gap condition fails.
    """
    bounds_p, bounds_q = as_bounds(bounds_p), as_bounds(bounds_q)
    lh_p = lh_bound(n, alpha, c, bounds_p)
    lh_q = lh_bound(m, alpha, c, bounds_q)
    if lh_p is None or lh_q is None or delta < lh_p + lh_q:
        return None
    gap = delta - lh_p - lh_q
    total = 0.0
    for horizon, b in ((n, bounds_p), (m, bounds_q)):
        w = FixedHoeffding(n=horizon, alpha=alpha, c=c, bounds=b).weight(1)
        total += math.exp(-gap * horizon * w / (1.0 + w * b.width))
    return _cap(alpha * total)


def type3_bound(delta, t0, weights_x, weights_y, alpha, bounds_p, bounds_q=None):
    """Per-direction bound on deciding the wrong strict inequality.

    ``weights_x`` / ``weights_y`` are the deterministic weights of the first
    ``t0`` observations of each stream.  They are truncated to ``t0`` unless
    ``t0`` is None.
    """
    alpha = check_alpha(alpha)
    bounds_q = bounds_p if bounds_q is None else bounds_q
    wx = np.asarray(weights_x, dtype=float)
    wy = np.asarray(weights_y, dtype=float)
    if t0 is not None:
        wx, wy = wx[:t0], wy[:t0]
    plus_x, _ = weight_sums(wx, bounds_p)
    plus_y, _ = weight_sums(wy, bounds_q)
    return _cap(
        alpha**2 + alpha * (math.exp(-delta * plus_y) + math.exp(-delta * plus_x))
    )


@dataclass(frozen=True)
class GapBoundResult:
    eta: float
    eta_prime: float
    ell_requirement: float
    probability_bound: float


def gap_probability_bound(
    eta, eta_prime, alpha, weights_x, weights_y, bounds_p, bounds_q=None
) -> GapBoundResult:
    """Probability that two equal-mean intervals end up separated by ``ell``.

    ``ell_requirement`` is the smallest separation the bound covers; a
    negative value means any ``ell >= 0`` is admissible.
    """
    alpha = check_alpha(alpha)
    if not (eta > 0 and eta_prime > 0):
        raise ValueError("eta and eta_prime must be positive")
    bounds_q = bounds_p if bounds_q is None else bounds_q
    plus_x, minus_x = weight_sums(weights_x, bounds_p)
    plus_y, minus_y = weight_sums(weights_y, bounds_q)
    half_log = math.log(1.0 / alpha) / 2.0
    ell = half_log * max(
        eta_prime / plus_x - eta / minus_x, eta_prime / plus_y - eta / minus_y
    )
    prob = alpha ** (eta_prime + 1.0) + 0.25 * alpha ** (2.0 - eta)
    return GapBoundResult(float(eta), float(eta_prime), ell, prob)


def optimal_eta_prime(alpha, c_t0) -> float:
    """Minimiser of ``alpha^(1+e) + alpha^(2 - C e)/4`` over ``e``."""
    C = float(c_t0)
    return math.log(alpha * C / 4.0) / ((1.0 + C) * math.log(alpha))


def bernoulli_kl(p, q) -> float:
    def term(a, b):
        return 0.0 if a == 0 else a * math.log(a / b)

    return term(p, q) + term(1.0 - p, 1.0 - q)


def t0_heuristic(alpha, delta) -> int:
    """Burn-in length ``ceil(log(1/alpha) / kl(1/2, 1/2 + delta))``."""
    alpha = check_alpha(alpha)
    if not 0.0 < delta < 0.5:
        raise ValueError(f"t0 heuristic needs 0 < delta < 1/2, got {delta}")
    return math.ceil(math.log(1.0 / alpha) / bernoulli_kl(0.5, 0.5 + delta))


@dataclass(frozen=True)
class ErrorBounds:
    mode: str
    type1_per_side: float
    type1_two_sided: float
    type2: float | None
    type3_per_direction: float
    type3_two_sided: float
    c_t0: float
    l_h_p: float | None = None
    l_h_q: float | None = None
    applicable: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "c_t0": self.c_t0,
            "type1_per_side": self.type1_per_side,
            "type1_two_sided": self.type1_two_sided,
            "type2": self.type2,
            "type2_display": "no guarantee (<= 1)" if self.type2 is None else self.type2,
            "type3_per_direction": self.type3_per_direction,
            "type3_two_sided": self.type3_two_sided,
            "l_h_p": self.l_h_p,
            "l_h_q": self.l_h_q,
            "applicable": dict(self.applicable),
        }


def _deterministic_weights(schedule, horizon):
    return np.array([schedule.weight(t, 0.0) for t in range(1, horizon + 1)])


def error_bounds(config, n=None, m=None, c_t0_override=None) -> ErrorBounds:
    """Theoretical bounds for a comparison configured by ``config``.

    In anytime mode the deterministic phase is the burn-in ``t0``; in fixed
    mode every weight is deterministic, so the whole horizons ``n`` and ``m``
    enter ``C_t0`` and the type III bound.
    """
    n = config.n if n is None else n
    m = config.m if m is None else m
    applicable = {"type1": True, "type2": True, "type3": True}
    if config.mode == "anytime":
        sp = config.make_schedule("P", n)
        sq = config.make_schedule("Q", m)
        deterministic = min(sp.deterministic_until, config.t0)
        if deterministic < config.t0:
            applicable["type1"] = applicable["type3"] = False
        hx = hy = config.t0
        type2 = type2_anytime_bound(config.alpha)
        lh_p = lh_q = None
    else:
        n = check_count(n, "n")
        m = check_count(m, "m")
        sp = FixedHoeffding(n=n, alpha=config.alpha, c=config.c, bounds=config.bounds_p)
        sq = FixedHoeffding(n=m, alpha=config.alpha, c=config.c, bounds=config.bounds_q)
        hx, hy = n, m
        lh_p = lh_bound(n, config.alpha, config.c, config.bounds_p)
        lh_q = lh_bound(m, config.alpha, config.c, config.bounds_q)
        if config.schedule == "fixed-bernstein":
            type2 = None
            applicable["type1"] = applicable["type3"] = False
        else:
            type2 = type2_fixed_bound(
                config.delta, n, m, config.alpha, config.c,
                config.bounds_p, config.bounds_q,
            )
        applicable["type2"] = type2 is not None
    wx = _deterministic_weights(sp, hx)
    wy = _deterministic_weights(sq, hy)
    C = c_t0(wx, wy, config.bounds_p, config.bounds_q)
    if c_t0_override is not None:
        C = float(c_t0_override)
    t1 = type1_bound(config.alpha, C)
    t3 = type3_bound(config.delta, None, wx, wy, config.alpha, config.bounds_p, config.bounds_q)
    return ErrorBounds(
        mode=config.mode,
        type1_per_side=t1,
        type1_two_sided=_cap(2.0 * t1),
        type2=type2,
        type3_per_direction=t3,
        type3_two_sided=_cap(2.0 * t3),
        c_t0=C,
        l_h_p=lh_p,
        l_h_q=lh_q,
        applicable=applicable,
    )
