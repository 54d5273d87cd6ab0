import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from evoverlap._validation import EngineFrozenError, OutOfSupportError
from evoverlap.intervals import ConfidenceInterval
from evoverlap.overlap import (
    Outcome,
    OverlapEngine,
    TestConfig,
    anytime_step,
    decide,
    fixed_time_decision,
    union_length,
)


def _ci(lo, hi):
    return ConfidenceInterval(lo, hi, 0.1, 1, 0.5 * (lo + hi))


@pytest.mark.parametrize(
    "a, b, expected",
    [((0.1, 0.3), (0.1, 0.3), 0.2), ((0, 0.1), (0.5, 0.6), 0.6), ((0.2, 0.8), (0.4, 0.5), 0.6)],
)
def test_union_length(a, b, expected):
    assert union_length(_ci(*a), _ci(*b)) == pytest.approx(expected)


def test_decide_rules():
    assert decide(0.6, 0.7, 0.1, 0.2) is Outcome.H1_PLUS
    assert decide(0.1, 0.2, 0.6, 0.7) is Outcome.H1_MINUS
    assert decide(0.1, 0.5, 0.4, 0.7) is Outcome.H0
    assert decide(0.4, 0.44, 0.4, 0.44, delta=0.1) is Outcome.H0
    assert decide(0.1, 0.5, 0.4, 0.7, delta=0.1) is Outcome.CONTINUE


def test_outcome_labels():
    assert [o.label for o in Outcome] == ["lower", "equal", "larger", "undecided"]


def test_config_validation():
    with pytest.raises(ValueError):
        TestConfig(delta=0.0)
    with pytest.raises(ValueError):
        TestConfig(t0=0)
    with pytest.raises(ValueError):
        TestConfig(mode="weekly")
    assert TestConfig(mode="fixed").schedule == "fixed-hoeffding"
    assert TestConfig().schedule == "anytime"


def test_fixed_identical_points():
    d = fixed_time_decision([0.5], [0.5], TestConfig(mode="fixed"))
    assert d.outcome is Outcome.H0 and d.terminal


def test_fixed_degenerate_disjoint():
    d = fixed_time_decision(np.zeros(200), np.ones(200), TestConfig(mode="fixed"))
    assert d.outcome is Outcome.H1_MINUS
    assert d.ci_x.hi < d.ci_y.lo
    # grid check of disjointness
    assert d.ci_x.hi < 0.5 < d.ci_y.lo


def test_fixed_mirror():
    d = fixed_time_decision(np.ones(200), np.zeros(200), TestConfig(mode="fixed"))
    assert d.outcome is Outcome.H1_PLUS


def test_fixed_empty_rejected():
    with pytest.raises(ValueError):
        fixed_time_decision([], [0.5], TestConfig(mode="fixed"))


def test_fixed_out_of_support():
    with pytest.raises(OutOfSupportError):
        fixed_time_decision([0.5, 1.2], [0.5], TestConfig(mode="fixed"))


def test_fixed_uses_each_horizon():
    d = fixed_time_decision(np.full(50, 0.5), np.full(500, 0.5), TestConfig(mode="fixed"))
    assert d.ci_x.length > d.ci_y.length


def test_engine_burn_in_gate():
    eng = OverlapEngine(TestConfig(t0=10))
    for _ in range(9):
        assert anytime_step(eng, "P", 0.0).outcome is Outcome.CONTINUE
    for _ in range(100):
        assert eng.observe("Q", 1.0).outcome is Outcome.CONTINUE
    assert eng.checks == 0
    assert eng.observe("P", 0.0).terminal


def test_engine_degenerate_stops_at_twice_t0():
    eng = OverlapEngine(TestConfig(t0=338))
    for i in range(10_000):
        d = eng.observe("P" if i % 2 == 0 else "Q", 0.0 if i % 2 == 0 else 1.0)
        if d.terminal:
            break
    assert d.outcome is Outcome.H1_MINUS and (d.n, d.m) == (338, 338)


def test_engine_frozen():
    eng = OverlapEngine(TestConfig(t0=5))
    d = eng.observe_batch("P", np.zeros(40))
    d = eng.observe_batch("Q", np.ones(40))
    assert d.terminal
    with pytest.raises(EngineFrozenError):
        eng.observe("P", 0.0)
    assert "frozen" in repr(eng)


def test_engine_h0_by_union_length():
    eng = OverlapEngine(TestConfig(t0=1, delta=0.5))
    xs = np.tile([0.4, 0.6], 200)
    for x, y in zip(xs, xs):
        eng.observe("P", x)
        d = eng.observe("Q", y)
        if d.terminal:
            break
    assert d.outcome is Outcome.H0
    assert union_length(d.ci_x, d.ci_y) <= 0.5


def test_engine_stride_still_ingests():
    a = OverlapEngine(TestConfig(t0=5, stride=7))
    rng = np.random.default_rng(0)
    for _ in range(30):
        a.observe("P", rng.random())
        a.observe("Q", rng.random())
    assert a.n == 30 and a.m == 30
    assert a.checks < 60


def test_engine_arm_names():
    eng = OverlapEngine(TestConfig())
    eng.observe("x", 0.2)
    eng.observe(1, 0.3)
    assert eng.n == 1 and eng.m == 1
    with pytest.raises(ValueError):
        eng.observe("R", 0.1)


def test_decision_as_dict():
    d = fixed_time_decision([0.2, 0.4], [0.3], TestConfig(mode="fixed"))
    doc = d.as_dict()
    assert doc["decision"] == "H0" and doc["relation"] == "equal"


samples = arrays(np.float64, st.integers(1, 40), elements=st.floats(0.0, 1.0))


@settings(max_examples=40, deadline=None)
@given(xs=samples, ys=samples, shift=st.floats(-5, 5), scale=st.floats(0.2, 5))
def test_affine_invariance_of_decision(xs, ys, shift, scale):
    base = fixed_time_decision(xs, ys, TestConfig(mode="fixed"))
    moved = fixed_time_decision(
        shift + scale * xs, shift + scale * ys,
        TestConfig(mode="fixed", bounds_p=(shift, shift + scale), bounds_q=(shift, shift + scale)),
    )
    assert base.outcome is moved.outcome


def test_same_sequence_same_decision():
    rng = np.random.default_rng(1)
    seq = [("P" if rng.random() < 0.5 else "Q", rng.random()) for _ in range(3000)]
    outs = []
    for _ in range(2):
        eng = OverlapEngine(TestConfig(t0=20))
        for arm, v in seq:
            d = eng.observe(arm, v)
            if d.terminal:
                break
        outs.append((d.outcome, d.n, d.m))
    assert outs[0] == outs[1]
