"""Level-set confidence intervals ``{z : E_n(z) <= 1/alpha}`` and their length bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import _kernels
from ._validation import as_bounds, check_alpha
from .evalue import EProcessState
from .weights import fixed_hoeffding_weight

__all__ = [
    "ConfidenceInterval",
    "LengthBound",
    "confidence_interval",
    "interval_endpoints",
    "length_bound_constant_weights",
    "lh_bound",
]

ROOT_RTOL = 1e-9
MAXITER = 200
METHODS = {"newton": _kernels.NEWTON, "bisection": _kernels.BISECTION}


@dataclass(frozen=True)
class ConfidenceInterval:
    lo: float
    hi: float
    alpha: float
    n: int
    mu_hat: float
    clamped_lo: bool = False
    clamped_hi: bool = False

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, z: float) -> bool:
        return self.lo <= z <= self.hi

    def as_dict(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "mu_hat": self.mu_hat,
            "alpha": self.alpha,
            "n": self.n,
            "clamped_lo": self.clamped_lo,
            "clamped_hi": self.clamped_hi,
        }


def interval_endpoints(state: EProcessState, alpha: float, method: str = "newton"):
    """Endpoints ``(lo, hi, clamped_lo, clamped_hi)`` without the minimiser.

    The level set is ``[r_plus, r_minus]`` where ``r_plus`` solves
    ``log_plus(z) = log(2/alpha)`` (decreasing in ``z``) and ``r_minus`` solves
    ``log_minus(z) = log(2/alpha)`` (increasing), each clipped to ``[a, b]``.
    Previous endpoints for the same ``alpha`` are used as starting points.
    """
    a, b = state.bounds.a, state.bounds.b
    if state.n == 0:
        return a, b, True, True
    target = math.log(2.0 / alpha)
    tol = ROOT_RTOL * (b - a)
    code = METHODS[method]
    xs, ws = state.xs, state.weights
    lo0, hi0 = state._warm.get(alpha, (b, a))
    lo, clo, _ = _kernels.branch_root(xs, ws, 1.0, target, a, b, lo0, tol, MAXITER, code)
    u, chi, _ = _kernels.branch_root(
        xs, ws, -1.0, target, -b, -a, -hi0, tol, MAXITER, code
    )
    hi = -u
    state._warm[alpha] = (lo, hi)
    return lo, hi, clo, chi


def confidence_interval(
    state: EProcessState, alpha: float, method: str = "newton"
) -> ConfidenceInterval:
    """Confidence interval of level ``1 - alpha`` from the current history.

    Parameters
    ----------
    state : EProcessState
    alpha : float
        Level, in (0, 1).
    method : {"newton", "bisection"}
        Root finder for the two endpoints.  Both stop at an absolute
        tolerance of ``1e-9 (b - a)``; "newton" is a safeguarded Newton
        iteration that keeps a bisection bracket.

    Returns
    -------
    ConfidenceInterval
        With ``n == 0`` this is the whole support with both clamp flags set.
    """
    alpha = check_alpha(alpha)
    if method not in METHODS:
        raise ValueError(f"method must be one of {sorted(METHODS)}, got {method!r}")
    lo, hi, clo, chi = interval_endpoints(state, alpha, method)
    if state.n == 0:
        mu = 0.5 * (lo + hi)
    else:
        mu = min(max(state.minimizer(), lo), hi)
    return ConfidenceInterval(lo, hi, alpha, state.n, mu, clo, chi)


@dataclass(frozen=True)
class LengthBound:
    w: float
    v: float
    n: int
    sigma_sq: float
    alpha: float
    feasible: bool
    bound: float | None


def length_bound_constant_weights(w, n, sigma_sq, alpha, bounds) -> LengthBound:
    """Upper bound on the interval length when every weight equals ``w``.

    Returns ``feasible=False`` (and ``bound=None``) when ``n`` is too small
    for the bound to apply.
    """
    bounds = as_bounds(bounds)
    alpha = check_alpha(alpha)
    w = float(w)
    if not 0.0 < w * bounds.width < 1.0:
        raise ValueError(f"need 0 < w (b - a) < 1, got w={w}, b-a={bounds.width}")
    v = w * w / (1.0 - w * bounds.width)
    log_term = math.log(2.0 / alpha)
    # n^2 w^2 - 2 n v (n v sigma^2 / 2 + log(2/alpha)); same sign as the feasibility condition
    disc = n * n * w * w - 2.0 * n * v * (n * v * sigma_sq / 2.0 + log_term)
    if disc < 0.0:
        return LengthBound(w, v, n, sigma_sq, alpha, False, None)
    bound = 2.0 * (n * w - math.sqrt(disc)) / (n * v)
    return LengthBound(w, v, n, sigma_sq, alpha, True, bound)


def lh_bound(n, alpha, c, bounds) -> float | None:
    """Worst-case length bound for the fixed-time Hoeffding-type weights.

    The empirical variance is replaced by its maximum ``(b - a)^2 / 4``.
    Returns None when the bound is not computable (``n`` too small).
    """
    bounds = as_bounds(bounds)
    w = fixed_hoeffding_weight(n, alpha, c, bounds)
    res = length_bound_constant_weights(w, n, bounds.width**2 / 4.0, alpha, bounds)
    return res.bound
