"""Compiled inner loops over the (x_t, w_t) history.

The level-set solvers work on one monotone branch at a time.  With
``y = s * x`` and ``u = s * z`` (``s = +1`` for the lower endpoint, ``-1`` for
the upper one) the branch is

    G(u) = sum_t log(1 + w_t (y_t - u)) - target,

which is strictly decreasing and concave in ``u``.  Newton iterates for a
concave decreasing function land at or to the right of the root, so a single
probe one tolerance to the left certifies the bracket.
"""

import math

import numpy as np
from numba import njit

BISECTION = 0
NEWTON = 1


@njit(cache=True)
def log_sums(x, w, z):
    lp = 0.0
    lm = 0.0
    for i in range(x.shape[0]):
        d = w[i] * (x[i] - z)
        lp += math.log1p(d)
        lm += math.log1p(-d)
    return lp, lm


@njit(cache=True)
def _branch(x, w, s, u, target):
    g = -target
    dg = 0.0
    for i in range(x.shape[0]):
        d = w[i] * (s * x[i] - u)
        g += math.log1p(d)
        dg -= w[i] / (1.0 + d)
    return g, dg


@njit(cache=True)
def _branch_value(x, w, s, u, target):
    g = -target
    for i in range(x.shape[0]):
        g += math.log1p(w[i] * (s * x[i] - u))
    return g


@njit(cache=True)
def branch_root(x, w, s, target, u_lo, u_hi, u0, tol, maxiter, method):
    """Root of the decreasing branch ``G`` on ``[u_lo, u_hi]``.

    Returns ``(u, clamped, evaluations)``.  ``clamped`` is True when
    ``G(u_lo) <= 0``, i.e. the whole left part of the support lies in the
    level set and the endpoint sits on the boundary.  ``G(u_hi) < 0`` holds by
    construction.
    """
    a = u_lo
    b = u_hi
    if method == BISECTION:
        if _branch_value(x, w, s, u_lo, target) <= 0.0:
            return u_lo, True, 1
        evals = 1
        for _ in range(maxiter):
            if b - a <= tol:
                break
            mid = 0.5 * (a + b)
            evals += 1
            if _branch_value(x, w, s, mid, target) > 0.0:
                a = mid
            else:
                b = mid
        return 0.5 * (a + b), False, evals

    # G(u_lo) is only evaluated when the iteration heads for the boundary;
    # any point with G > 0 already rules out clamping.
    evals = 0
    a_checked = False
    u = u0
    if not (a < u < b):
        u = b
    for _ in range(maxiter):
        g, dg = _branch(x, w, s, u, target)
        evals += 1
        if g > 0.0:
            a = u
            a_checked = True
        else:
            b = u
            if g == 0.0:
                return u, False, evals
        if a_checked and b - a <= tol:
            return 0.5 * (a + b), False, evals
        nxt = u - g / dg
        if nxt <= a and not a_checked:
            evals += 1
            if _branch_value(x, w, s, u_lo, target) <= 0.0:
                return u_lo, True, evals
            a_checked = True
        if abs(nxt - u) <= 0.25 * tol:
            probe = nxt - 0.5 * tol
            if probe <= a:
                if a_checked:
                    return nxt, False, evals
                probe = a
            evals += 1
            if _branch_value(x, w, s, probe, target) > 0.0:
                return nxt, False, evals
            if probe == u_lo:
                return u_lo, True, evals
            b = probe
            nxt = 0.5 * (a + b)
        elif not (a < nxt < b):
            nxt = 0.5 * (a + b)
        u = nxt
    return 0.5 * (a + b), False, evals


@njit(cache=True)
def _gap(x, w, z):
    # log_plus - log_minus and its derivative in z (strictly decreasing)
    h = 0.0
    dh = 0.0
    for i in range(x.shape[0]):
        d = w[i] * (x[i] - z)
        h += math.log1p(d) - math.log1p(-d)
        dh -= w[i] / (1.0 + d) + w[i] / (1.0 - d)
    return h, dh


@njit(cache=True)
def crossing(x, w, z_lo, z_hi, z0, tol, maxiter):
    """Point where the two one-sided log-products are equal."""
    a = z_lo
    b = z_hi
    h_a, _ = _gap(x, w, a)
    if h_a <= 0.0:
        return a
    h_b, _ = _gap(x, w, b)
    if h_b >= 0.0:
        return b
    z = z0
    if not (a < z < b):
        z = 0.5 * (a + b)
    for _ in range(maxiter):
        h, dh = _gap(x, w, z)
        if h > 0.0:
            a = z
        elif h < 0.0:
            b = z
        else:
            return z
        if b - a <= tol:
            break
        nxt = z - h / dh
        if abs(nxt - z) <= 0.25 * tol:
            lo_p = max(nxt - 0.5 * tol, a)
            hi_p = min(nxt + 0.5 * tol, b)
            h_lo, _ = _gap(x, w, lo_p)
            h_hi, _ = _gap(x, w, hi_p)
            if h_lo >= 0.0 and h_hi <= 0.0:
                return nxt
            if h_lo < 0.0:
                b = lo_p
            if h_hi > 0.0:
                a = hi_p
            nxt = 0.5 * (a + b)
        elif not (a < nxt < b) or abs(nxt - z) > 0.5 * (b - a):
            nxt = 0.5 * (a + b)
        z = nxt
    return 0.5 * (a + b)


@njit(cache=True)
def log_e_path(x, w, z):
    """Running ``log E_t(z)`` for ``t = 1..n`` at a fixed point ``z``."""
    n = x.shape[0]
    out = np.empty(n)
    lp = 0.0
    lm = 0.0
    for i in range(n):
        d = w[i] * (x[i] - z)
        lp += math.log1p(d)
        lm += math.log1p(-d)
        out[i] = max(lp, lm) - math.log(2.0)
    return out
