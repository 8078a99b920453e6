"""Monte Carlo checks of the single-release and linked-release guarantees.

Seeds: trial ``i`` uses ``base_seed + i``; inside a trial owner ``j`` of
``t`` draws from ``trial_seed * t + j`` (so ``t = 1`` reproduces the
single-release stream exactly). Trials are independent, so they can be
spread over workers and folded back by summation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from joblib import Parallel, delayed

from .distribution import JointDistribution, cell_cdf, draw_cells, make_rng
from .exceptions import ValidationError
from .mechanism import MechanismPlan

DEFAULT_TRIALS = 10_000


@dataclass(frozen=True, eq=False)
class TrialReport:
    trials: int
    failures: int
    bound: float
    seed: int
    t: int = 1
    ell: int = 0
    sample_size: int = 0
    diversity_histogram: Optional[tuple] = None
    per_trial: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def empirical_rate(self) -> float:
        return self.failures / self.trials

    def slack(self, sigmas: float = 3.0) -> float:
        """``sigmas * sqrt(bound / trials)``; the statistical allowance used in tests."""
        return sigmas * math.sqrt(self.bound / self.trials)

    def within_bound(self, sigmas: float = 3.0) -> bool:
        return self.empirical_rate <= self.bound + self.slack(sigmas)

    def to_dict(self) -> dict:
        return {
            "format_version": 1,
            "trials": self.trials,
            "failures": self.failures,
            "empirical_rate": self.empirical_rate,
            "bound": self.bound,
            "seed": self.seed,
            "t": self.t,
            "ell": self.ell,
            "sample_size": self.sample_size,
            "diversity_histogram": list(self.diversity_histogram) if self.diversity_histogram else None,
        }


def _cell_map(plan: MechanismPlan, dist: JointDistribution) -> np.ndarray:
    """Flattened cell ``q * |S| + s`` -> flattened ``class * |S| + s``."""
    index = plan.partition.class_index(dist.q_size)
    s = dist.s_size
    cells = np.arange(dist.q_size * s)
    return index[cells // s] * s + cells % s


def _min_distinct(cdf, cell_map, n_classes, s_size, n, t, trial_seed) -> int:
    """Fewest distinct surviving values over all classes for one trial."""
    linked = None
    for j in range(t):
        rng = make_rng(trial_seed * t + j)
        counts = np.bincount(cell_map[draw_cells(cdf, n, rng)], minlength=n_classes * s_size)
        linked = counts if linked is None else np.minimum(linked, counts)
    return int((linked.reshape(n_classes, s_size) > 0).sum(axis=1).min())


def _run_chunk(cdf, cell_map, n_classes, s_size, n, t, seeds) -> list[int]:
    return [_min_distinct(cdf, cell_map, n_classes, s_size, n, t, sd) for sd in seeds]


def _simulate(plan: MechanismPlan, dist: JointDistribution, t: int, trials: int, seed: int,
              n_jobs: int, keep_per_trial: bool) -> TrialReport:
    if trials < 1:
        raise ValidationError("trials must be at least 1")
    if t < 1:
        raise ValidationError("t must be at least 1")
    if seed < 0:
        raise ValidationError("seed must be non-negative")
    if plan.sample_size < 1:
        raise ValidationError("plan sample size must be at least 1")
    cdf = cell_cdf(dist)
    cmap = _cell_map(plan, dist)
    args = (cdf, cmap, plan.n_classes, dist.s_size, plan.sample_size, t)
    seeds = [seed + i for i in range(trials)]
    if n_jobs == 1:
        values = _run_chunk(*args, seeds)
    else:
        chunks = np.array_split(np.asarray(seeds, dtype=np.int64), max(1, min(trials, 64)))
        parts = Parallel(n_jobs=n_jobs)(
            delayed(_run_chunk)(*args, [int(s) for s in c]) for c in chunks if len(c))
        values = [v for part in parts for v in part]
    per_trial = np.asarray(values, dtype=np.int64)
    hist = np.bincount(per_trial, minlength=dist.s_size + 1)
    return TrialReport(
        trials=trials,
        failures=int(np.count_nonzero(per_trial < plan.ell)),
        bound=min(1.0, t * plan.delta),
        seed=seed,
        t=t,
        ell=plan.ell,
        sample_size=plan.sample_size,
        diversity_histogram=tuple(int(h) for h in hist),
        per_trial=per_trial if keep_per_trial else None,
    )


def simulate_single(plan: MechanismPlan, dist: JointDistribution, trials: int = DEFAULT_TRIALS,
                    seed: int = 0, n_jobs: int = 1, keep_per_trial: bool = False) -> TrialReport:
    """Fraction of sampled releases in which some class has fewer than ``ell`` values.

    A class that receives no records counts as a failure.
    """
    return _simulate(plan, dist, 1, trials, seed, n_jobs, keep_per_trial)


def simulate_linkage(plan: MechanismPlan, dist: JointDistribution, t: int = 2,
                     trials: int = DEFAULT_TRIALS, seed: int = 0, n_jobs: int = 1,
                     keep_per_trial: bool = False) -> TrialReport:
    """Same as :func:`simulate_single`, on the linkage of ``t`` independent releases.

    All owners share the plan's partition, so the post-linkage classes are
    the plan's classes with per-value minimum counts. The bound is ``t * delta``.
    """
    return _simulate(plan, dist, t, trials, seed, n_jobs, keep_per_trial)
