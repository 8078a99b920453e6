"""Contiguous generalization of quasi-identifiers.

A class is *admissible* at level ``(ell, p)`` when at least ``ell``
sensitive values carry class mass ``>= p``. Adding qids to a class never
lowers any mass, so admissibility is monotone under enlargement; the
greedy strategy exploits this and is optimal among contiguous strategies.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Partition
from .distribution import TIE_TOL, DistributionSummary, JointDistribution, p_ell
from .exceptions import InfeasibleError, SizeGuardError, UnsupportedParametersError, ValidationError

MAX_CONTIGUOUS_Q = 16
MAX_UNRESTRICTED_Q = 8
# snap ratios such as p_l / (p_l / k) back onto the integer k before flooring
FLOOR_TOL = 1e-9


def snapped_floor(x: float) -> int:
    r = round(x)
    if abs(x - r) <= FLOOR_TOL * max(1.0, abs(x)):
        return int(r)
    return math.floor(x)


@dataclass(frozen=True)
class ContiguousPartition:
    """Classes ``[b_k, b_{k+1})`` of consecutive qids.

    ``boundaries`` holds the start of every class plus the alphabet size,
    e.g. ``(0, 4, 8)`` for two halves of eight qids.
    """

    boundaries: tuple

    def __post_init__(self):
        b = tuple(int(x) for x in self.boundaries)
        if len(b) < 2 or b[0] != 0 or any(x >= y for x, y in zip(b, b[1:])):
            raise ValidationError(f"boundaries must start at 0 and strictly increase: {b}")
        object.__setattr__(self, "boundaries", b)

    @property
    def q_size(self) -> int:
        return self.boundaries[-1]

    @property
    def n_classes(self) -> int:
        return len(self.boundaries) - 1

    def __len__(self) -> int:
        return self.n_classes

    def intervals(self) -> list[tuple[int, int]]:
        return list(zip(self.boundaries, self.boundaries[1:]))

    def to_partition(self) -> Partition:
        return Partition(tuple(range(a, b) for a, b in self.intervals()))


def _check_p(dist: JointDistribution, ell: int, p: float) -> float:
    pl = p_ell(dist.summary(), ell)
    if not 0 < p <= pl * (1 + 1e-12):
        raise ValidationError(f"p must lie in (0, p_ell] = (0, {pl!r}], got {p!r}")
    return pl


def is_admissible(mass: np.ndarray, ell: int, p: float) -> bool:
    return int(np.count_nonzero(mass >= p - TIE_TOL)) >= ell


def greedy_generalize(dist: JointDistribution, ell: int, p: float,
                      counter: Optional[Counter] = None) -> ContiguousPartition:
    """Single left-to-right pass closing a class as soon as it is admissible.

    A trailing class that never becomes admissible is merged into its
    predecessor. ``counter["updates"]`` (if given) receives the number of
    per-value mass updates, which is at most ``|Q| * |S|``.
    """
    _check_p(dist, ell, p)
    probs = dist.probs
    q_size, s_size = probs.shape
    cuts = [0]
    mass = np.zeros(s_size)
    updates = 0
    open_class = False
    for q in range(q_size):
        mass += probs[q]
        updates += s_size
        open_class = True
        if is_admissible(mass, ell, p):
            cuts.append(q + 1)
            mass = np.zeros(s_size)
            open_class = False
    if counter is not None:
        counter["updates"] += updates
    if open_class:
        if len(cuts) == 1:
            raise InfeasibleError(f"no admissible class exists at ell={ell}, p={p!r}")
        cuts[-1] = q_size
    return ContiguousPartition(tuple(cuts))


def generalize_ind(dist: JointDistribution, ell: int, p: float) -> ContiguousPartition:
    """Equal-width classes for product-form distributions.

    Aims for ``K = floor(theta * p_ell / p)`` classes. Every class must hold
    at least ``|Q| * p / (theta * p_ell)`` qids to be guaranteed admissible,
    so the width is that bound rounded up and leftover qids join the last
    class; when ``K`` divides ``|Q|`` this is exactly ``K`` classes of
    ``|Q| / K`` qids.
    """
    summary = dist.summary()
    if not summary.product_form:
        raise UnsupportedParametersError("generalize_ind needs a product-form distribution")
    pl = _check_p(dist, ell, p)
    q_size = dist.q_size
    target = snapped_floor(summary.theta * pl / p)
    if target < 1:
        raise InfeasibleError("floor(theta * p_ell / p) < 1")
    width = max(1, math.ceil(q_size / (summary.theta * pl / p) - FLOOR_TOL))
    k = max(1, min(target, q_size // width))
    cuts = [j * width for j in range(k)] + [q_size]
    return ContiguousPartition(tuple(cuts))


def trivial_partition(dist: JointDistribution, ell: int, p: float) -> ContiguousPartition:
    _check_p(dist, ell, p)
    return ContiguousPartition((0, dist.q_size))


STRATEGIES = {
    "greedy": greedy_generalize,
    "ind": generalize_ind,
    "trivial": trivial_partition,
}


def _interval_admissible(dist: JointDistribution, ell: int, p: float) -> np.ndarray:
    """``ok[a, b]`` is True when qids ``a .. b-1`` form an admissible class."""
    q_size = dist.q_size
    ok = np.zeros((q_size + 1, q_size + 1), dtype=bool)
    for a in range(q_size):
        # direct sums instead of prefix differences keep tie behaviour identical to greedy
        running = np.zeros(dist.s_size)
        for b in range(a + 1, q_size + 1):
            running = running + dist.probs[b - 1]
            ok[a, b] = is_admissible(running, ell, p)
    return ok


def brute_force_optimal_contiguous(dist: JointDistribution, ell: int, p: float) -> int:
    """Largest class count over every admissible contiguous partition.

    Exhaustive depth-first enumeration of cut patterns; a branch is dropped
    only once its latest class is inadmissible, which no later cut can fix.
    Returns 0 when no admissible partition exists.
    """
    if dist.q_size > MAX_CONTIGUOUS_Q:
        raise SizeGuardError(f"contiguous enumeration limited to |Q| <= {MAX_CONTIGUOUS_Q}")
    ok = _interval_admissible(dist, ell, p)
    q_size = dist.q_size
    best = 0

    def walk(start: int, count: int) -> None:
        nonlocal best
        if start == q_size:
            best = max(best, count)
            return
        for end in range(start + 1, q_size + 1):
            if ok[start, end]:
                walk(end, count + 1)

    walk(0, 0)
    return best


def _set_partitions(items: list):
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[head]] + part
        for i in range(len(part)):
            yield part[:i] + [[head] + part[i]] + part[i + 1:]


def brute_force_optimal_unrestricted(dist: JointDistribution, ell: int, p: float) -> int:
    """Largest class count over every admissible partition, contiguous or not."""
    if dist.q_size > MAX_UNRESTRICTED_Q:
        raise SizeGuardError(f"set-partition enumeration limited to |Q| <= {MAX_UNRESTRICTED_Q}")
    cache: dict = {}

    def admissible(block) -> bool:
        key = frozenset(block)
        if key not in cache:
            mass = np.zeros(dist.s_size)
            for q in sorted(key):
                mass = mass + dist.probs[q]
            cache[key] = is_admissible(mass, ell, p)
        return cache[key]

    best = 0
    for part in _set_partitions(list(range(dist.q_size))):
        if len(part) > best and all(admissible(b) for b in part):
            best = len(part)
    return best


@dataclass(frozen=True)
class ClassCountBounds:
    lower: int
    lower_applies: bool
    upper: Optional[float]
    upper_applies: bool
    lower_integral: int


def class_count_bounds(summary: DistributionSummary, ell: int, p: float) -> ClassCountBounds:
    """Class-count guarantees for product-form distributions.

    ``lower`` is ``floor(theta * p_ell / p)``; ``upper`` is ``p_ell / p``,
    which caps every admissible partition when quasi-identifiers are
    uniform. ``lower_integral`` is the count equal-width classes actually
    reach once widths are whole numbers of qids; it equals ``lower``
    whenever ``lower`` divides ``|Q|``.
    """
    pl = p_ell(summary, ell)
    ratio = summary.theta * pl / p
    lower = snapped_floor(ratio)
    width = max(1, math.ceil(summary.q_size / ratio - FLOOR_TOL)) if ratio > 0 else summary.q_size
    integral = max(0, min(lower, summary.q_size // width))
    uniform = summary.product_form and summary.uniform_q
    return ClassCountBounds(
        lower=lower,
        lower_applies=summary.product_form,
        upper=pl / p if uniform else None,
        upper_applies=uniform,
        lower_integral=integral,
    )


def candidate_thresholds(dist: JointDistribution, ell: int) -> np.ndarray:
    """Distinct interval masses ``P([a, b), s)`` in ``(0, p_ell]``.

    Class counts only change when ``p`` crosses one of these values, so a
    sweep over ``p`` need not look anywhere else. Costs ``O(|Q|^2 |S|)``.
    """
    pl = p_ell(dist.summary(), ell)
    prefix = np.vstack([np.zeros(dist.s_size), np.cumsum(dist.probs, axis=0)])
    vals = []
    for a in range(dist.q_size):
        masses = prefix[a + 1:] - prefix[a]
        vals.append(masses.ravel())
    allv = np.concatenate(vals)
    allv = allv[(allv > 0) & (allv <= pl * (1 + 1e-12))]
    return np.unique(allv)
