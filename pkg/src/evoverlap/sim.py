"""Seeded simulation of the overlap tests.

Every replication draws from its own generator, derived from ``(seed,
rep_index)`` through :class:`numpy.random.SeedSequence`, with one child stream
per arm.  Results therefore do not depend on the order in which replications
run or on how many workers run them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from joblib import Parallel, delayed

from ._validation import SupportBounds, as_bounds, check_count
from .bounds import ErrorBounds, error_bounds
from .overlap import Decision, OverlapEngine, Outcome, TestConfig, fixed_time_decision

__all__ = [
    "Bernoulli",
    "Beta",
    "McReport",
    "MultiArmComparison",
    "ReplicationResult",
    "SETTINGS",
    "SettingSpec",
    "Uniform",
    "get_setting",
    "largest_ci_allocator",
    "monte_carlo_table",
    "run_allocation",
    "run_replication",
]

BLOCK = 512


@dataclass(frozen=True)
class Bernoulli:
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"Bernoulli p must lie in [0, 1], got {self.p}")

    @property
    def mean(self) -> float:
        return self.p

    @property
    def support(self) -> tuple[float, float]:
        return 0.0, 1.0

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return (rng.random(size) < self.p).astype(float)


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"Uniform needs lo < hi, got ({self.lo}, {self.hi})")

    @property
    def mean(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def support(self) -> tuple[float, float]:
        return self.lo, self.hi

    def draw(self, rng, size):
        return self.lo + (self.hi - self.lo) * rng.random(size)


@dataclass(frozen=True)
class Beta:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"Beta shape parameters must be > 0, got ({self.a}, {self.b})")

    @property
    def mean(self) -> float:
        return self.a / (self.a + self.b)

    @property
    def support(self) -> tuple[float, float]:
        return 0.0, 1.0

    def draw(self, rng, size):
        # ratio of gammas; numpy's standard_gamma is a Marsaglia-Tsang sampler
        g1 = rng.standard_gamma(self.a, size)
        g2 = rng.standard_gamma(self.b, size)
        return g1 / (g1 + g2)


@dataclass(frozen=True)
class SettingSpec:
    name: str
    dist_p: object
    dist_q: object
    bounds_p: SupportBounds
    bounds_q: SupportBounds
    true_relation: str  # "lower" or "equal", X against Y

    def __post_init__(self):
        for dist, bounds in ((self.dist_p, self.bounds_p), (self.dist_q, self.bounds_q)):
            lo, hi = dist.support
            if lo < bounds.a or hi > bounds.b:
                raise ValueError(
                    f"{self.name}: bounds [{bounds.a}, {bounds.b}] do not contain "
                    f"the support [{lo}, {hi}] of {dist}"
                )


def _unit():
    return SupportBounds(0.0, 1.0)


SETTINGS = {
    s.name: s
    for s in (
        SettingSpec("ber-equal", Bernoulli(0.5), Bernoulli(0.5), _unit(), _unit(), "equal"),
        SettingSpec("ber-lower", Bernoulli(0.5), Bernoulli(0.6), _unit(), _unit(), "lower"),
        SettingSpec(
            "unif-vs-ber-equal", Bernoulli(0.6), Uniform(0.0, 1.2),
            _unit(), SupportBounds(0.0, 1.2), "equal",
        ),
        SettingSpec(
            "unif-vs-ber-lower", Bernoulli(0.6), Uniform(0.0, 1.4),
            _unit(), SupportBounds(0.0, 1.4), "lower",
        ),
        SettingSpec("beta-equal", Beta(10, 30), Beta(1, 3), _unit(), _unit(), "equal"),
        SettingSpec("beta-lower", Beta(10, 30), Beta(10, 15), _unit(), _unit(), "lower"),
    )
}


def get_setting(name) -> SettingSpec:
    if isinstance(name, SettingSpec):
        return name
    try:
        return SETTINGS[name]
    except KeyError:
        raise ValueError(
            f"unknown setting {name!r}; choose from {', '.join(SETTINGS)}"
        ) from None


class _Stream:
    """Block-buffered draws from one arm's generator."""

    def __init__(self, dist, rng):
        self.dist = dist
        self.rng = rng
        self._buf = np.empty(0)
        self._pos = 0

    def take(self, k: int) -> np.ndarray:
        out = []
        while k > 0:
            if self._pos == self._buf.shape[0]:
                self._buf = self.dist.draw(self.rng, BLOCK)
                self._pos = 0
            j = min(k, self._buf.shape[0] - self._pos)
            out.append(self._buf[self._pos : self._pos + j])
            self._pos += j
            k -= j
        return np.concatenate(out) if len(out) != 1 else out[0]

    def next(self) -> float:
        return float(self.take(1)[0])


def arm_generators(seed: int, rep_index: int, n_arms: int = 2):
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(rep_index,))
    return [np.random.default_rng(child) for child in ss.spawn(n_arms)]


@dataclass(frozen=True)
class ReplicationResult:
    rep_index: int
    outcome: Outcome
    n: int
    m: int

    @property
    def total(self) -> int:
        return self.n + self.m


def run_replication(
    setting, config: TestConfig, seed: int, rep_index: int,
    batch_size: int = 1, max_samples: int = 200_000,
) -> ReplicationResult:
    """One simulated comparison.

    Anytime mode alternates the arms (``batch_size`` draws at a time) until a
    terminal decision or until ``max_samples`` draws in total, in which case
    the outcome is ``continue``.  Fixed mode draws ``config.n`` and
    ``config.m`` observations up front.
    """
    setting = get_setting(setting)
    config = replace(config, bounds_p=setting.bounds_p, bounds_q=setting.bounds_q)
    gen_p, gen_q = arm_generators(seed, rep_index)
    sp, sq = _Stream(setting.dist_p, gen_p), _Stream(setting.dist_q, gen_q)
    if config.mode == "fixed":
        if config.n is None or config.m is None:
            raise ValueError("fixed mode simulation needs the horizons n and m")
        d = fixed_time_decision(sp.take(config.n), sq.take(config.m), config)
        return ReplicationResult(rep_index, d.outcome, d.n, d.m)
    batch_size = check_count(batch_size, "batch_size")
    engine = OverlapEngine(config)
    d = Decision(Outcome.CONTINUE, 0, 0)
    turn = 0
    while engine.n + engine.m < max_samples:
        arm, stream = ("P", sp) if turn % 2 == 0 else ("Q", sq)
        turn += 1
        if batch_size == 1:
            d = engine.observe(arm, stream.next())
        else:
            d = engine.observe_batch(arm, stream.take(batch_size))
        if d.terminal:
            break
    return ReplicationResult(rep_index, d.outcome, engine.n, engine.m)


@dataclass(frozen=True)
class McReport:
    setting: str
    mode: str
    reps: int
    seed: int
    counts: dict
    frequencies: dict
    stop_mean: float | None
    stop_std: float | None
    stop_mean_per_arm: tuple | None
    bounds: ErrorBounds
    config: dict = field(default_factory=dict)

    @property
    def error_frequency(self) -> float:
        """Frequency of decisions other than the true relation."""
        truth = SETTINGS[self.setting].true_relation if self.setting in SETTINGS else None
        return 1.0 - self.frequencies.get(truth, 0.0)

    def as_dict(self) -> dict:
        return {
            "setting": self.setting,
            "mode": self.mode,
            "reps": self.reps,
            "seed": self.seed,
            "config": dict(self.config),
            "counts": dict(self.counts),
            "frequencies": dict(self.frequencies),
            "stopping": {
                "mean_total": self.stop_mean,
                "std_total": self.stop_std,
                "mean_per_arm": None
                if self.stop_mean_per_arm is None
                else list(self.stop_mean_per_arm),
            },
            "bounds": self.bounds.as_dict(),
        }


_RELATIONS = ("lower", "equal", "larger", "undecided")


def _summarise(setting, config, reps, seed, results) -> McReport:
    counts = dict.fromkeys(_RELATIONS, 0)
    for r in results:
        counts[r.outcome.label] += 1
    freqs = {k: v / reps for k, v in counts.items()}
    if config.mode == "anytime":
        totals = np.array([r.total for r in results], dtype=float)
        stop_mean = float(totals.mean())
        stop_std = float(totals.std(ddof=1)) if reps > 1 else 0.0
        per_arm = (
            float(np.mean([r.n for r in results])),
            float(np.mean([r.m for r in results])),
        )
    else:
        stop_mean = stop_std = per_arm = None
    cfg = replace(config, bounds_p=setting.bounds_p, bounds_q=setting.bounds_q)
    return McReport(
        setting=setting.name,
        mode=config.mode,
        reps=reps,
        seed=seed,
        counts=counts,
        frequencies=freqs,
        stop_mean=stop_mean,
        stop_std=stop_std,
        stop_mean_per_arm=per_arm,
        bounds=error_bounds(cfg),
        config=cfg.as_dict(),
    )


def _chunk(setting, config, seed, indices, batch_size, max_samples):
    return [
        run_replication(setting, config, seed, i, batch_size, max_samples)
        for i in indices
    ]


def monte_carlo_table(
    settings, config: TestConfig, reps: int, seed: int = 0, n_jobs: int = 1,
    batch_size: int = 1, max_samples: int = 200_000,
) -> list[McReport]:
    """Decision frequencies of ``reps`` replications per setting.

    Parameters
    ----------
    settings : iterable of str or SettingSpec
    config : TestConfig
        Shared test parameters; each setting supplies its own support bounds.
    reps : int
    seed : int
    n_jobs : int
        Worker processes.  The report is identical for every value.
    """
    reps = check_count(reps, "reps")
    n_jobs = check_count(n_jobs, "n_jobs")
    reports = []
    for s in settings:
        s = get_setting(s)
        if n_jobs == 1:
            results = _chunk(s, config, seed, range(reps), batch_size, max_samples)
        else:
            splits = np.array_split(np.arange(reps), min(reps, 4 * n_jobs))
            parts = Parallel(n_jobs=n_jobs)(
                delayed(_chunk)(s, config, seed, idx.tolist(), batch_size, max_samples)
                for idx in splits
            )
            results = [r for part in parts for r in part]
        results.sort(key=lambda r: r.rep_index)
        reports.append(_summarise(s, config, reps, seed, results))
    return reports


# -- several arms ------------------------------------------------------------


class MultiArmComparison:
    """All pairwise overlap engines between ``n_arms`` streams.

    A new observation of arm ``i`` goes to every undecided engine that
    involves ``i``; decided engines are frozen and keep their verdict.

    Parameters
    ----------
    n_arms : int
    config : TestConfig
        Shared parameters.  ``bounds_p`` is used for every arm unless
        ``bounds`` is given.
    bounds : sequence of SupportBounds, optional
    """

    def __init__(self, n_arms: int, config: TestConfig, bounds=None):
        n_arms = check_count(n_arms, "n_arms", minimum=2)
        if bounds is None:
            bounds = [config.bounds_p] * n_arms
        bounds = [as_bounds(b) for b in bounds]
        if len(bounds) != n_arms:
            raise ValueError("need one support per arm")
        self.n_arms = n_arms
        self.engines = {
            (i, j): OverlapEngine(replace(config, bounds_p=bounds[i], bounds_q=bounds[j]))
            for i in range(n_arms)
            for j in range(i + 1, n_arms)
        }
        self.counts = [0] * n_arms

    @property
    def done(self) -> bool:
        return all(e.terminal is not None for e in self.engines.values())

    def observe(self, arm: int, values) -> None:
        values = np.atleast_1d(np.asarray(values, dtype=float))
        for (i, j), eng in self.engines.items():
            if eng.terminal is not None or arm not in (i, j):
                continue
            side = "P" if arm == i else "Q"
            if values.shape[0] == 1:
                eng.observe(side, values[0])
            else:
                eng.observe_batch(side, values)
        self.counts[arm] += values.shape[0]

    def decisions(self) -> dict:
        return {
            pair: (None if e.terminal is None else e.terminal.outcome)
            for pair, e in self.engines.items()
        }


def largest_ci_allocator(engines):
    """Pick the arm with the longest interval among undecided comparisons.

    Parameters
    ----------
    engines : dict
        ``{(i, j): OverlapEngine}`` with arm ``i`` on side P and ``j`` on Q.

    Returns
    -------
    ((i, j), arm) or None
        An undecided engine containing the chosen arm, or None once every
        engine is terminal.  Ties go to the lowest arm index.
    """
    lengths = {}
    home = {}
    for pair in sorted(engines):
        eng = engines[pair]
        if eng.terminal is not None:
            continue
        for arm, side in zip(pair, ("P", "Q")):
            lo, hi, _, _ = eng.endpoints(side)
            if hi - lo > lengths.get(arm, -math.inf):
                lengths[arm] = hi - lo
            home.setdefault(arm, pair)
    if not lengths:
        return None
    best = min(lengths, key=lambda k: (-lengths[k], k))
    return home[best], best


def run_allocation(
    dists, config: TestConfig, seed: int, rep_index: int = 0,
    batch_size: int = 1, max_samples: int = 1_000_000, bounds=None,
) -> MultiArmComparison:
    """Drive a :class:`MultiArmComparison` with :func:`largest_ci_allocator`."""
    comp = MultiArmComparison(len(dists), config, bounds)
    streams = [
        _Stream(d, g) for d, g in zip(dists, arm_generators(seed, rep_index, len(dists)))
    ]
    while sum(comp.counts) < max_samples:
        pick = largest_ci_allocator(comp.engines)
        if pick is None:
            break
        _, arm = pick
        comp.observe(arm, streams[arm].take(batch_size))
    return comp
