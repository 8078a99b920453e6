"""Joint distribution over quasi-identifiers x sensitive values, and i.i.d. sampling.

Sampling uses numpy's PCG64 bit generator seeded through ``SeedSequence(seed)``
and inverse-CDF lookup over the row-major flattened ``|Q| * |S|`` cells, so a
seed fully determines a dataset.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Dataset
from .exceptions import ValidationError

SUM_TOL = 1e-9
TIE_TOL = 1e-12
PRODUCT_TOL = 1e-9


def make_rng(seed: int) -> np.random.Generator:
    """The one generator used everywhere: PCG64 over ``SeedSequence(seed)``."""
    return np.random.Generator(np.random.PCG64(int(seed)))


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """``probs[q, s] = P(q, s)`` with strictly positive marginals."""

    probs: np.ndarray
    q_labels: Optional[tuple] = None
    s_labels: Optional[tuple] = None

    def __post_init__(self):
        probs = np.array(self.probs, dtype=np.float64)
        if probs.ndim != 2 or 0 in probs.shape:
            raise ValidationError("probability table must be a non-empty 2-d array")
        if not np.all(np.isfinite(probs)) or probs.min() < 0:
            raise ValidationError("probabilities must be finite and non-negative")
        total = probs.sum()
        if abs(total - 1.0) > SUM_TOL:
            raise ValidationError(f"probabilities sum to {total!r}, not 1")
        probs /= total
        if probs.sum(axis=1).min() <= 0:
            raise ValidationError("every quasi-identifier needs positive probability")
        if probs.sum(axis=0).min() <= 0:
            raise ValidationError("every sensitive value needs positive probability")
        for name, labels, n in (("q_labels", self.q_labels, probs.shape[0]),
                                ("s_labels", self.s_labels, probs.shape[1])):
            if labels is not None:
                if len(labels) != n:
                    raise ValidationError(f"{name} has {len(labels)} entries, expected {n}")
                object.__setattr__(self, name, tuple(labels))
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def product(cls, q_marginal, s_marginal, **labels) -> "JointDistribution":
        q = np.asarray(q_marginal, dtype=np.float64)
        s = np.asarray(s_marginal, dtype=np.float64)
        return cls(np.outer(q, s), **labels)

    @classmethod
    def uniform(cls, q_size: int, s_size: int, **labels) -> "JointDistribution":
        return cls.product(np.full(q_size, 1.0 / q_size), np.full(s_size, 1.0 / s_size), **labels)

    @classmethod
    def geometric(cls, q_size: int, s_size: int, rho: float, **labels) -> "JointDistribution":
        """Uniform quasi-identifiers, ``P_S(s) = p_1 * rho**s`` (0-based s)."""
        return cls.product(np.full(q_size, 1.0 / q_size), geometric_marginal(s_size, rho), **labels)

    @property
    def q_size(self) -> int:
        return int(self.probs.shape[0])

    @property
    def s_size(self) -> int:
        return int(self.probs.shape[1])

    @property
    def q_marginal(self) -> np.ndarray:
        return self.probs.sum(axis=1)

    @property
    def s_marginal(self) -> np.ndarray:
        return self.probs.sum(axis=0)

    def summary(self) -> "DistributionSummary":
        return DistributionSummary.from_distribution(self)


def geometric_marginal(s_size: int, rho: float) -> np.ndarray:
    if not 0 < rho < 1:
        raise ValidationError("rho must lie in (0, 1)")
    p1 = (1.0 - rho) / (1.0 - rho ** s_size)
    return p1 * rho ** np.arange(s_size, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class DistributionSummary:
    ordered_marginals: np.ndarray
    theta: float
    product_form: bool
    q_size: int

    @classmethod
    def from_distribution(cls, dist: JointDistribution) -> "DistributionSummary":
        s_marg = dist.s_marginal
        # stable sort: equal marginals keep index order
        order = np.argsort(-s_marg, kind="stable")
        ordered = s_marg[order]
        ordered.setflags(write=False)
        q_marg = dist.q_marginal
        theta = float(dist.q_size * q_marg.min())
        theta = min(theta, 1.0)
        product = bool(np.max(np.abs(dist.probs - np.outer(q_marg, s_marg))) <= PRODUCT_TOL)
        return cls(ordered, theta, product, dist.q_size)

    @property
    def s_size(self) -> int:
        return int(self.ordered_marginals.size)

    @property
    def uniform_q(self) -> bool:
        return self.theta >= 1.0 - 1e-12


def p_ell(summary: DistributionSummary, ell: int) -> float:
    """The ``ell``-th largest sensitive-value marginal (1-based ``ell``)."""
    if not 1 <= ell <= summary.s_size:
        raise ValidationError(f"ell must lie in [1, {summary.s_size}], got {ell}")
    return float(summary.ordered_marginals[ell - 1])


def class_mass(dist: JointDistribution, members) -> np.ndarray:
    """Vector ``P(class, s) = sum_{q in class} P(q, s)``."""
    idx = np.fromiter(sorted(int(q) for q in members), dtype=np.int64)
    if idx.size and (idx[0] < 0 or idx[-1] >= dist.q_size):
        raise ValidationError("class member outside the quasi-identifier alphabet")
    return dist.probs[idx].sum(axis=0)


def support_size(mass: np.ndarray, p: float) -> int:
    return int(np.count_nonzero(mass >= p - TIE_TOL))


def support_set(dist: JointDistribution, members, p: float) -> frozenset:
    """``{s : P(class, s) >= p}`` up to a ``1e-12`` tie tolerance."""
    if not 0 < p <= 1:
        raise ValidationError("p must lie in (0, 1]")
    mass = class_mass(dist, members)
    return frozenset(int(s) for s in np.flatnonzero(mass >= p - TIE_TOL))


def top_support(dist: JointDistribution, members, p: float, ell: int) -> list[int]:
    """Diagnostic: the ``ell`` supported values with the largest class mass."""
    mass = class_mass(dist, members)
    supported = [s for s in np.argsort(-mass, kind="stable") if mass[s] >= p - TIE_TOL]
    return [int(s) for s in supported[:ell]]


def cell_cdf(dist: JointDistribution) -> np.ndarray:
    cdf = np.cumsum(dist.probs.ravel())
    cdf[-1] = 1.0
    return cdf


def draw_cells(cdf: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF draw of ``n`` flattened cell indices."""
    return np.searchsorted(cdf, rng.random(n), side="right")


def sample_dataset(dist: JointDistribution, n: int, seed: int) -> Dataset:
    """``n`` i.i.d. records from ``dist``; identical seeds give identical datasets."""
    if n < 0:
        raise ValidationError("n must be non-negative")
    cells = draw_cells(cell_cdf(dist), n, make_rng(seed))
    qids, sens = np.divmod(cells, dist.s_size)
    return Dataset(qids, sens, dist.q_size, dist.s_size,
                   q_labels=dist.q_labels, s_labels=dist.s_labels)
