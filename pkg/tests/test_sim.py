import numpy as np
import pytest

from evoverlap.overlap import Outcome, OverlapEngine, TestConfig
from evoverlap.sim import (
    SETTINGS,
    Bernoulli,
    Beta,
    MultiArmComparison,
    SettingSpec,
    Uniform,
    arm_generators,
    get_setting,
    largest_ci_allocator,
    monte_carlo_table,
    run_allocation,
    run_replication,
)
from evoverlap._validation import SupportBounds


def test_distribution_validation():
    with pytest.raises(ValueError):
        Bernoulli(1.2)
    with pytest.raises(ValueError):
        Beta(0.0, 1.0)
    with pytest.raises(ValueError):
        Uniform(1.0, 1.0)


def test_bernoulli_zero():
    assert np.all(Bernoulli(0.0).draw(np.random.default_rng(0), 1000) == 0.0)


def test_beta_moments():
    xs = Beta(10, 30).draw(np.random.default_rng(1), 10**5)
    assert abs(xs.mean() - 0.25) < 0.01
    assert xs.var() == pytest.approx(300 / (40**2 * 41), rel=0.2)


def test_uniform_mean():
    xs = Uniform(0.0, 1.2).draw(np.random.default_rng(2), 10**5)
    assert abs(xs.mean() - 0.6) < 0.01
    assert xs.min() >= 0.0 and xs.max() <= 1.2


def test_settings_table():
    assert list(SETTINGS) == [
        "ber-equal", "ber-lower", "unif-vs-ber-equal",
        "unif-vs-ber-lower", "beta-equal", "beta-lower",
    ]
    for s in SETTINGS.values():
        truth = "equal" if s.dist_p.mean == pytest.approx(s.dist_q.mean) else "lower"
        assert s.true_relation == truth
    assert SETTINGS["unif-vs-ber-lower"].bounds_q == SupportBounds(0.0, 1.4)


def test_setting_bounds_must_cover_support():
    with pytest.raises(ValueError):
        SettingSpec("bad", Uniform(0, 2), Bernoulli(0.5), SupportBounds(0, 1),
                    SupportBounds(0, 1), "equal")


def test_unknown_setting():
    with pytest.raises(ValueError, match="ber-equal"):
        get_setting("gauss")


def test_generators_independent_of_order():
    a = arm_generators(3, 7)[0].random(5)
    arm_generators(3, 6)
    b = arm_generators(3, 7)[0].random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, arm_generators(3, 8)[0].random(5))


def test_replication_degenerate_arms():
    spec = SettingSpec("points", Bernoulli(0.0), Bernoulli(1.0), SupportBounds(),
                       SupportBounds(), "lower")
    r = run_replication(spec, TestConfig(t0=338), seed=0, rep_index=0)
    assert r.outcome is Outcome.H1_MINUS and r.total == 2 * 338


def test_replication_fixed_needs_horizons():
    with pytest.raises(ValueError):
        run_replication("ber-equal", TestConfig(mode="fixed"), 0, 0)


def test_replication_cap():
    r = run_replication("ber-equal", TestConfig(t0=5), 0, 0, max_samples=50)
    assert r.outcome is Outcome.CONTINUE and r.total == 50


def test_batches_are_evaluated_after_full_batch():
    r = run_replication("beta-lower", TestConfig(t0=338), 1, 0, batch_size=16)
    assert r.outcome is Outcome.H1_MINUS
    assert r.n % 16 == 0 and r.m % 16 == 0


def test_fixed_ber_equal_mostly_h0():
    (rep,) = monte_carlo_table(["ber-equal"], TestConfig(mode="fixed", n=1000, m=1000), 100, 3)
    assert rep.frequencies["equal"] >= 0.99


def test_report_single_rep_and_sum():
    (rep,) = monte_carlo_table(["beta-lower"], TestConfig(t0=50), 1, seed=4)
    assert set(rep.frequencies.values()) <= {0.0, 1.0}
    assert sum(rep.frequencies.values()) == pytest.approx(1.0)
    doc = rep.as_dict()
    assert doc["bounds"]["type2"] == 0.2 and doc["stopping"]["mean_total"] > 0


def test_parallel_matches_serial():
    cfg = TestConfig(t0=40)
    a = monte_carlo_table(["beta-equal", "ber-lower"], cfg, 6, seed=5, n_jobs=1)
    b = monte_carlo_table(["beta-equal", "ber-lower"], cfg, 6, seed=5, n_jobs=2)
    assert [r.as_dict() for r in a] == [r.as_dict() for r in b]


def _engines_with_lengths(lengths):
    comp = MultiArmComparison(len(lengths), TestConfig(t0=1))
    rng = np.random.default_rng(0)
    for arm, n in enumerate(lengths):
        comp.observe(arm, rng.random(n))
    return comp


def test_allocator_picks_longest_interval():
    comp = _engines_with_lengths([5, 400])
    assert largest_ci_allocator(comp.engines) == ((0, 1), 0)


def test_allocator_ties_lowest_index():
    comp = MultiArmComparison(3, TestConfig(t0=1))
    assert largest_ci_allocator(comp.engines) == ((0, 1), 0)


def test_allocator_skips_decided_arms():
    comp = MultiArmComparison(3, TestConfig(t0=5))
    comp.observe(0, np.zeros(50))
    comp.observe(1, np.ones(50))
    assert comp.engines[(0, 1)].terminal is not None
    comp.observe(2, np.full(3, 0.5))
    # engine (0, 1) is decided but 0 and 1 still meet arm 2
    pick = largest_ci_allocator(comp.engines)
    assert pick is not None and pick[0] != (0, 1)


def test_allocator_completion_signal():
    comp = MultiArmComparison(2, TestConfig(t0=5))
    comp.observe(0, np.zeros(40))
    comp.observe(1, np.ones(40))
    assert comp.done and largest_ci_allocator(comp.engines) is None


def test_three_arm_bandit_no_wrong_direction():
    means = [0.6, 0.85, 0.9]
    dists = [Bernoulli(p) for p in means]
    wrong = 0
    for seed in range(50):
        comp = run_allocation(dists, TestConfig(alpha=0.1, delta=0.1, t0=30), seed)
        assert comp.done
        for (i, j), outcome in comp.decisions().items():
            truth = Outcome.H1_MINUS if means[i] < means[j] else Outcome.H1_PLUS
            wrong += outcome in (Outcome.H1_MINUS, Outcome.H1_PLUS) and outcome is not truth
    assert wrong == 0


def test_multi_arm_needs_two():
    with pytest.raises(ValueError):
        MultiArmComparison(1, TestConfig())
