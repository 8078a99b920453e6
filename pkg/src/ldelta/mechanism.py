"""Planning for the central anonymizer.

Given the joint distribution, a diversity target ``ell`` and a failure
budget ``delta``, the anonymizer picks a mass threshold ``p``, builds
admissible equivalence classes and broadcasts the number of records every
owner must collect before releasing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Partition
from .distribution import TIE_TOL, DistributionSummary, JointDistribution, class_mass, p_ell
from .exceptions import InfeasibleError, ValidationError
from .generalization import STRATEGIES, ContiguousPartition

# sample sizes within this relative distance of an integer are not bumped up by ceil
CEIL_TOL = 1e-9


@dataclass(frozen=True)
class MechanismPlan:
    ell: int
    delta: float
    p: float
    m_bound: float
    sample_size: int
    partition: Partition
    strategy: str = "greedy"
    boundaries: Optional[tuple] = None

    @property
    def n_classes(self) -> int:
        return len(self.partition)


def m_bound(summary: DistributionSummary, ell: int, p: float, q_size: Optional[int] = None) -> float:
    """Upper bound on the number of admissible classes.

    ``min(|Q|, 1 / (ell p), (p_ell + ... + p_|S|) / p)``, kept real-valued.
    A value a few ulps below an integer is lifted onto it: with exact
    arithmetic it would be that integer, and greedy counts ties as admissible.
    """
    pl = p_ell(summary, ell)
    if not 0 < p <= pl * (1 + 1e-12):
        raise ValidationError(f"p must lie in (0, p_ell] = (0, {pl!r}], got {p!r}")
    q_size = summary.q_size if q_size is None else q_size
    tail = float(np.sum(summary.ordered_marginals[ell - 1:]))
    m = min(float(q_size), 1.0 / (ell * p), tail / p)
    up = math.ceil(m)
    if up - m <= CEIL_TOL * m:
        return float(up)
    return m


def sample_size(m: float, ell: int, p: float, delta: float) -> int:
    """Records per owner: ``ceil(ln(m ell / delta) / ln(1 / (1 - p)))``.

    The denominator is evaluated as ``-log1p(-p)`` so that tiny ``p`` keeps
    full precision.
    """
    if not 0 < p < 1:
        raise ValidationError(f"p must lie in (0, 1), got {p!r}")
    if not 0 < delta < 1:
        raise ValidationError(f"delta must lie in (0, 1), got {delta!r}")
    if m <= 0 or ell < 1:
        raise ValidationError("m and ell must be positive")
    ratio = m * ell / delta
    if ratio <= 1:
        raise ValidationError(f"m * ell / delta = {ratio!r} must exceed 1")
    n = math.log(ratio) / -math.log1p(-p)
    r = round(n)
    if abs(n - r) <= CEIL_TOL * max(1.0, n):
        return max(1, int(r))
    return math.ceil(n)


def resolve_p(summary: DistributionSummary, ell: int, p: Optional[float] = None,
              beta: Optional[float] = None) -> float:
    """Exactly one of ``p`` or ``beta`` (with ``p = beta * p_ell``)."""
    if (p is None) == (beta is None):
        raise ValidationError("give exactly one of p or beta")
    if beta is not None:
        if not 0 < beta <= 1:
            raise ValidationError(f"beta must lie in (0, 1], got {beta!r}")
        return beta * p_ell(summary, ell)
    return float(p)


def check_admissible(dist: JointDistribution, partition: Partition, ell: int, p: float) -> None:
    for k, c in enumerate(partition.classes):
        n = int(np.count_nonzero(class_mass(dist, c) >= p - TIE_TOL))
        if n < ell:
            raise InfeasibleError(f"class {k} supports only {n} < {ell} values at p={p!r}")


def plan(dist: JointDistribution, ell: int, delta: float, p: Optional[float] = None,
         strategy: str = "greedy", beta: Optional[float] = None) -> MechanismPlan:
    if strategy not in STRATEGIES:
        raise ValidationError(f"unknown strategy {strategy!r}; choose from {sorted(STRATEGIES)}")
    if not isinstance(ell, (int, np.integer)):
        raise ValidationError("ell must be an integer")
    summary = dist.summary()
    p = resolve_p(summary, ell, p, beta)
    contiguous: ContiguousPartition = STRATEGIES[strategy](dist, ell, p)
    partition = contiguous.to_partition()
    check_admissible(dist, partition, ell, p)
    m = m_bound(summary, ell, p, dist.q_size)
    return MechanismPlan(
        ell=int(ell),
        delta=float(delta),
        p=float(p),
        m_bound=m,
        sample_size=sample_size(m, ell, p, delta),
        partition=partition,
        strategy=strategy,
        boundaries=contiguous.boundaries,
    )
