import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from evoverlap import _kernels
from evoverlap._validation import OutOfSupportError
from evoverlap.evalue import EProcessState, log_derivative_bounds, log_eprocess_at, minimizer, observe
from evoverlap.weights import Anytime, FixedHoeffding, make_schedule


class _Fixed:
    """Schedule replaying given weights (for hand-computed cases)."""

    name = "given"

    def __init__(self, weights, bounds=(0.0, 1.0)):
        from evoverlap._validation import as_bounds

        self.ws = list(weights)
        self.bounds = as_bounds(bounds)

    def weight(self, t, sigma_sq_prev):
        return self.ws[t - 1]


def _state(xs, ws, bounds=(0.0, 1.0)):
    return EProcessState(_Fixed(ws, bounds)).extend(xs)


def test_observe_single_point():
    st_ = observe(EProcessState(Anytime()), 0.5)
    assert st_.n == 1 and st_.running_mean == 0.5 and st_.variance == 0.0


def test_observe_two_points():
    st_ = EProcessState(Anytime()).extend([0.0, 1.0])
    assert st_.running_mean == 0.5 and st_.variance == 0.25


def test_observe_out_of_support_names_values():
    with pytest.raises(OutOfSupportError, match=r"x=1\.5.*a=0\.0.*b=1\.0"):
        EProcessState(Anytime()).observe(1.5)


def test_empty_product():
    v = log_eprocess_at(EProcessState(Anytime()), 0.3)
    assert v.log_plus == 0.0 and v.log_minus == 0.0 and v.log_e == -math.log(2)


def test_point_equal_to_observation():
    v = _state([0.5], [0.4]).log_evalue(0.5)
    assert v.log_e == pytest.approx(-math.log(2), abs=1e-15)


def test_hand_computed_value():
    v = _state([0.2, 0.8], [0.5, 0.5]).log_evalue(0.3)
    assert math.exp(v.log_e) == pytest.approx(0.59375, rel=1e-14)


def test_log_e_is_max_minus_log2():
    v = _state([0.1, 0.9, 0.4], [0.3, 0.2, 0.1]).log_evalue(0.6)
    assert v.log_e == max(v.log_plus, v.log_minus) - math.log(2)


def test_evaluation_outside_support_rejected():
    with pytest.raises(OutOfSupportError):
        _state([0.5], [0.4]).log_evalue(1.2)


def test_weight_computed_before_observation():
    # replay in two phases: weights must not depend on later data
    xs = np.random.default_rng(3).random(60)
    a = EProcessState(Anytime(t0=10)).extend(xs)
    b = EProcessState(Anytime(t0=10)).extend(xs[:30])
    w_next = b.next_weight()
    b.extend(xs[30:])
    assert np.array_equal(a.weights, b.weights)
    assert a.weights[30] == w_next


def test_running_moments_match_recomputation():
    xs = np.random.default_rng(4).random(500)
    s = EProcessState(Anytime()).extend(xs)
    assert s.running_mean == pytest.approx(xs.mean(), rel=1e-12)
    assert s.variance == pytest.approx(xs.var(), rel=1e-12)


def test_minimizer_single_observation():
    assert minimizer(_state([0.7], [0.6])) == pytest.approx(0.7, abs=1e-9)


def test_minimizer_symmetric_data():
    s = _state([0.1, 0.9, 0.3, 0.7], [0.2] * 4)
    assert s.minimizer() == pytest.approx(0.5, abs=1e-9)


def test_minimizer_matches_grid():
    rng = np.random.default_rng(5)
    s = EProcessState(Anytime(t0=5)).extend(rng.random(20))
    grid = np.linspace(0, 1, 10**6 + 1)
    best = grid[np.argmin(s.log_evalue_many(grid))]
    assert abs(s.minimizer() - best) <= 1e-6


def test_minimum_value_at_most_half():
    rng = np.random.default_rng(6)
    for _ in range(50):
        s = EProcessState(Anytime(t0=int(rng.integers(1, 20)))).extend(
            rng.random(int(rng.integers(1, 100)))
        )
        assert s.log_evalue(s.minimizer()).log_e <= -math.log(2) + 1e-9


def test_derivative_bounds_hand_case():
    lo, hi = log_derivative_bounds(_state([0.3], [0.5]))
    assert lo == pytest.approx(1 / 3) and hi == pytest.approx(1.0)


def test_derivative_bounds_vanish_with_weights():
    lo, hi = _state([0.3, 0.6], [1e-12, 1e-12]).log_derivative_bounds()
    assert lo < 1e-11 and hi < 1e-11


def test_grid_incremental_matches_exact():
    rng = np.random.default_rng(7)
    grid = np.linspace(0, 1, 101)
    s = EProcessState(Anytime(t0=20), grid=grid).extend(rng.random(400))
    assert np.allclose(s.log_evalue_grid(), s.log_evalue_many(grid), atol=1e-9, rtol=0)


def test_grid_outside_support_rejected():
    with pytest.raises(OutOfSupportError):
        EProcessState(Anytime(), grid=[0.5, 2.0])


def test_copy_is_independent():
    s = EProcessState(Anytime()).extend([0.2, 0.4])
    c = s.copy()
    c.observe(0.9)
    assert s.n == 2 and c.n == 3 and s.running_mean == pytest.approx(0.3)


def test_log_e_path_matches_pointwise():
    rng = np.random.default_rng(8)
    s = EProcessState(Anytime(t0=5)).extend(rng.random(40))
    path = _kernels.log_e_path(s.xs, s.weights, 0.4)
    prefix = EProcessState(Anytime(t0=5)).extend(s.xs[:25])
    assert path[24] == pytest.approx(prefix.log_evalue(0.4).log_e, abs=1e-12)


samples = arrays(np.float64, st.integers(1, 60), elements=st.floats(0.0, 1.0))


@settings(max_examples=60, deadline=None)
@given(xs=samples, t0=st.integers(1, 30))
def test_tails_monotone_and_evalue_convex(xs, t0):
    s = EProcessState(Anytime(t0=t0)).extend(xs)
    mu = s.minimizer()
    left = np.linspace(0, mu, 40)
    right = np.linspace(mu, 1, 40)
    assert np.all(np.diff(s.log_evalue_many(left)) <= 1e-9)
    assert np.all(np.diff(s.log_evalue_many(right)) >= -1e-9)
    # E itself (not log E) is convex: chord test on random triples
    z = np.sort(np.random.default_rng(len(xs)).random((30, 3)), axis=1)
    e = np.exp(s.log_evalue_many(z.ravel())).reshape(z.shape)
    chord = ((z[:, 2] - z[:, 1]) * e[:, 0] + (z[:, 1] - z[:, 0]) * e[:, 2]) / (z[:, 2] - z[:, 0])
    assert np.all(e[:, 1] <= chord * (1 + 1e-9) + 1e-12)


def test_log_evalue_is_not_convex():
    # one observation at 0.5 with weight 0.9: log E is concave on each side
    s = _state([0.5], [0.9])
    le = s.log_evalue_many([0.0, 0.25, 0.5])
    assert le[1] > 0.5 * (le[0] + le[2])


@settings(max_examples=40, deadline=None)
@given(xs=samples, width=st.floats(0.5, 5.0), shift=st.floats(-3, 3))
def test_affine_invariance(xs, width, shift):
    a = EProcessState(FixedHoeffding(alpha=0.1, n=len(xs), bounds=(0, 1))).extend(xs)
    b = EProcessState(
        FixedHoeffding(alpha=0.1, n=len(xs), bounds=(shift, shift + width))
    ).extend(shift + width * xs)
    for z in (0.0, 0.3, 0.8):
        assert a.log_evalue(z).log_e == pytest.approx(
            b.log_evalue(shift + width * z).log_e, abs=1e-9
        )


def test_make_schedule_state_repr():
    s = EProcessState(make_schedule("anytime", alpha=0.1, bounds=(0, 1)))
    assert "anytime" in repr(s)
