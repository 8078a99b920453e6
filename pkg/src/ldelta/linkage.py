"""Adversarial linkage of anonymized datasets and worst-case diversity loss.

An adversary who knows a target's quasi-identifier ``q`` looks up the class
containing ``q`` in each of ``t`` releases and keeps, for every sensitive
value, the minimum count across releases. Values with a positive minimum
survive.

The worst case over all l-diverse releases reduces to a question about
binary characteristic vectors of weight ``l`` that share coordinate 0: how
small can the intersection of their supports be?
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .core import AnonymizedDataset, Partition
from .exceptions import CoverageError, SizeGuardError, UnsupportedParametersError, ValidationError

MAX_BRUTE_S = 12


@dataclass(frozen=True)
class CharacteristicVector:
    bits: tuple

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise ValidationError("characteristic vectors are binary")
        object.__setattr__(self, "bits", bits)

    @property
    def weight(self) -> int:
        return sum(self.bits)

    @property
    def support(self) -> frozenset:
        return frozenset(i for i, b in enumerate(self.bits) if b)

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


@dataclass(frozen=True, eq=False)
class LinkageResult:
    qid: int
    per_attr_count: np.ndarray
    class_intersection: frozenset

    @property
    def linkage(self) -> dict:
        """``{s: count}`` for the values that survive (positive minimum)."""
        return {int(s): int(c) for s, c in enumerate(self.per_attr_count) if c > 0}

    @property
    def diversity(self) -> int:
        return int(np.count_nonzero(self.per_attr_count))


def _check_compatible(anons: Sequence[AnonymizedDataset]) -> None:
    if len(anons) < 1:
        raise ValidationError("need at least one anonymized dataset")
    sizes = {a.s_size for a in anons}
    if len(sizes) != 1:
        raise ValidationError("anonymized datasets must share the sensitive alphabet")


def _class_containing(anon: AnonymizedDataset, qid: int) -> int:
    try:
        return anon.partition.class_of(qid)
    except CoverageError:
        raise CoverageError(qid, f"qid {qid} is not covered by every release") from None


def link(anons: Sequence[AnonymizedDataset], qid: int) -> LinkageResult:
    """Per-value minimum counts across the classes containing ``qid``."""
    _check_compatible(anons)
    idx = [_class_containing(a, qid) for a in anons]
    rows = np.stack([a.counts[k] for a, k in zip(anons, idx)])
    inter = frozenset.intersection(*(a.partition.classes[k] for a, k in zip(anons, idx)))
    return LinkageResult(int(qid), rows.min(axis=0), inter)


def link_all(anons: Sequence[AnonymizedDataset], q_size: int,
             keep_empty: bool = False) -> AnonymizedDataset:
    """Post-linkage dataset: one class per distinct intersection of matched classes.

    Intersections whose minimum counts are all zero hold no linked record
    and are dropped, unless ``keep_empty`` is set (then the result still
    partitions the whole alphabet). If every intersection is empty they are
    all kept, since a release needs at least one class.
    """
    _check_compatible(anons)
    indices = np.stack([a.partition.class_index(q_size) for a in anons], axis=1)
    keys, first, inverse = np.unique(indices, axis=0, return_index=True, return_inverse=True)
    # order classes by their smallest qid
    order = np.argsort(first, kind="stable")
    classes, rows = [], []
    inverse = np.asarray(inverse).reshape(-1)
    for k in order:
        members = np.flatnonzero(inverse == k)
        classes.append(members.tolist())
        rows.append(np.min([a.counts[j] for a, j in zip(anons, keys[k])], axis=0))
    if not keep_empty and any(r.any() for r in rows):
        kept = [i for i, r in enumerate(rows) if r.any()]
        classes = [classes[i] for i in kept]
        rows = [rows[i] for i in kept]
    return AnonymizedDataset(Partition(tuple(classes)), np.array(rows), s_labels=anons[0].s_labels)


def _check_worst_case_args(ell: int, s_size: int, t: int) -> int:
    if s_size < 3:
        raise ValidationError("worst-case analysis needs |S| >= 3")
    if not 1 <= ell <= s_size:
        raise ValidationError(f"ell must lie in [1, {s_size}]")
    L = s_size - 1
    if not 2 <= t <= L:
        raise ValidationError(f"t must lie in [2, |S|-1] = [2, {L}]")
    return L


def worst_case_post_linkage_diversity(ell: int, s_size: int, t: int) -> int:
    """Smallest diversity a linkage of ``t`` l-diverse releases can retain.

    Only defined when ``t`` divides ``|S| - 1``; other parameters raise
    :class:`UnsupportedParametersError` (use :func:`brute_force_worst_case`).
    """
    L = _check_worst_case_args(ell, s_size, t)
    if L % t:
        raise UnsupportedParametersError(
            f"closed form needs t | |S|-1 (t={t}, |S|-1={L}); use the brute-force search")
    # ell <= L(t-1)/t + 1  <=>  t*(ell-1) <= L*(t-1), kept in integers
    if t * (ell - 1) <= L * (t - 1):
        return 1
    return L + 1 - (L - ell + 1) * t


def adversarial_construction(ell: int, s_size: int, t: int) -> list[CharacteristicVector]:
    """Characteristic vectors that attain the worst case.

    Each vector has a 1 at coordinate 0; row ``j`` then places ``ell - 1``
    ones on a window of the remaining ``L`` coordinates starting at offset
    ``j * L / t``, wrapping around circularly.
    """
    worst_case_post_linkage_diversity(ell, s_size, t)
    L = s_size - 1
    step = L // t
    out = []
    for j in range(t):
        x = [0] * L
        for r in range(j * step, j * step + ell - 1):
            x[r % L] = 1
        out.append(CharacteristicVector((1, *x)))
    return out


def intersection_weight(vectors: Sequence[CharacteristicVector]) -> int:
    return len(frozenset.intersection(*(v.support for v in vectors)))


def brute_force_worst_case(ell: int, s_size: int, t: int) -> int:
    """Exhaustive minimum intersection weight over weight-``ell`` vectors.

    Enumerates every tuple of ``t`` vectors of weight ``ell`` with a common
    1 at coordinate 0, tracking the set of reachable intersections one
    vector at a time (at most ``2**(|S|-1)`` distinct masks), so the result
    is the exact minimum without materializing all tuples. No divisibility
    condition is needed.
    """
    _check_worst_case_args(ell, s_size, t)
    if s_size > MAX_BRUTE_S:
        raise SizeGuardError(f"brute force limited to |S| <= {MAX_BRUTE_S}")
    L = s_size - 1
    masks = [sum(1 << i for i in c) for c in combinations(range(L), ell - 1)]
    reachable = set(masks)
    for _ in range(t - 1):
        reachable = {r & m for r in reachable for m in masks}
    return 1 + min(bin(r).count("1") for r in reachable)


def realize_vectors(vectors: Sequence[CharacteristicVector], q_size: int = 1) -> list[AnonymizedDataset]:
    """Minimal concrete releases whose single class has the given support.

    Every release uses one class covering all ``q_size`` qids and a count of 1
    per supported value.
    """
    return [
        AnonymizedDataset(Partition.single(q_size), np.array([v.bits], dtype=np.int64))
        for v in vectors
    ]
