"""Datasets, partitions, anonymized count tables and the exact diversity check.

Quasi-identifiers and sensitive attributes are plain integer indices
``0 .. |Q|-1`` and ``0 .. |S|-1``; labels, when present, ride along as
tuples of strings and never affect the arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .exceptions import CoverageError, OverlapError, ValidationError


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """Multiset of ``(qid, sens)`` records over fixed alphabets."""

    qids: np.ndarray
    sens: np.ndarray
    q_size: int
    s_size: int
    q_labels: Optional[tuple] = None
    s_labels: Optional[tuple] = None

    def __post_init__(self):
        qids = np.asarray(self.qids, dtype=np.int64).reshape(-1)
        sens = np.asarray(self.sens, dtype=np.int64).reshape(-1)
        if qids.shape != sens.shape:
            raise ValidationError("qids and sens must have the same length")
        if self.q_size < 1 or self.s_size < 1:
            raise ValidationError("alphabet sizes must be positive")
        if qids.size:
            if qids.min() < 0 or qids.max() >= self.q_size:
                raise ValidationError(f"qid outside [0, {self.q_size})")
            if sens.min() < 0 or sens.max() >= self.s_size:
                raise ValidationError(f"sensitive value outside [0, {self.s_size})")
        object.__setattr__(self, "qids", _frozen(qids.copy()))
        object.__setattr__(self, "sens", _frozen(sens.copy()))

    @classmethod
    def from_records(cls, records: Iterable[tuple[int, int]], q_size: int, s_size: int, **labels):
        rows = np.asarray(list(records), dtype=np.int64).reshape(-1, 2)
        return cls(rows[:, 0], rows[:, 1], q_size, s_size, **labels)

    def __len__(self) -> int:
        return int(self.qids.size)

    @property
    def records(self) -> np.ndarray:
        """``(n, 2)`` array of ``(qid, sens)`` rows."""
        return np.column_stack([self.qids, self.sens])


@dataclass(frozen=True)
class Partition:
    """Ordered collection of equivalence classes (sets of qids).

    Construction only checks that classes are non-empty; disjointness and
    coverage are checked against an alphabet by :func:`validate_partition`.
    """

    classes: tuple

    def __post_init__(self):
        classes = tuple(frozenset(int(q) for q in c) for c in self.classes)
        for k, c in enumerate(classes):
            if not c:
                raise ValidationError(f"equivalence class {k} is empty")
        object.__setattr__(self, "classes", classes)

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    @classmethod
    def single(cls, q_size: int) -> "Partition":
        return cls((range(q_size),))

    @classmethod
    def singletons(cls, q_size: int) -> "Partition":
        return cls(tuple((q,) for q in range(q_size)))

    def class_index(self, q_size: int) -> np.ndarray:
        """Map qid -> class position; raises if the partition is invalid."""
        validate_partition(self, q_size)
        out = np.empty(q_size, dtype=np.int64)
        for k, c in enumerate(self.classes):
            out[list(c)] = k
        return out

    def class_of(self, qid: int) -> int:
        for k, c in enumerate(self.classes):
            if qid in c:
                return k
        raise CoverageError(qid, f"qid {qid} is not covered by the partition")

    def to_lists(self) -> list[list[int]]:
        return [sorted(c) for c in self.classes]


def validate_partition(partition: Partition, q_size: int) -> None:
    """Check that ``partition`` is a disjoint cover of ``range(q_size)``.

    Raises :class:`OverlapError` at the first qid seen twice (scanning
    classes in order) and :class:`CoverageError` at the smallest uncovered
    or out-of-range qid.
    """
    owner: dict[int, int] = {}
    for k, c in enumerate(partition.classes):
        for q in sorted(c):
            if q < 0 or q >= q_size:
                raise CoverageError(q, f"qid {q} outside alphabet [0, {q_size})")
            if q in owner:
                raise OverlapError(q, owner[q], k)
            owner[q] = k
    if len(owner) != q_size:
        missing = next(q for q in range(q_size) if q not in owner)
        raise CoverageError(missing)


@dataclass(frozen=True, eq=False)
class AnonymizedDataset:
    """Per-class, per-sensitive-value record counts ``counts[c, s]``."""

    partition: Partition
    counts: np.ndarray
    s_labels: Optional[tuple] = field(default=None)

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 2 or counts.shape[0] != len(self.partition):
            raise ValidationError("counts must be a (n_classes, |S|) matrix")
        if counts.size and counts.min() < 0:
            raise ValidationError("counts must be non-negative")
        object.__setattr__(self, "counts", _frozen(counts.astype(np.int64, copy=True)))

    @property
    def s_size(self) -> int:
        return int(self.counts.shape[1])

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def distinct_per_class(self) -> np.ndarray:
        return (self.counts > 0).sum(axis=1)


def anonymize(dataset: Dataset, partition: Partition) -> AnonymizedDataset:
    """Generalize every record to its class and tally ``(class, sens)``."""
    index = partition.class_index(dataset.q_size)
    cells = index[dataset.qids] * dataset.s_size + dataset.sens
    counts = np.bincount(cells, minlength=len(partition) * dataset.s_size)
    return AnonymizedDataset(
        partition, counts.reshape(len(partition), dataset.s_size), s_labels=dataset.s_labels
    )


def diversity(anon: AnonymizedDataset) -> int:
    """Exact l of an anonymized dataset.

    Minimum number of distinct sensitive values over classes holding at
    least one record. With no records at all the minimum is vacuous and
    ``|S|`` is returned.
    """
    totals = anon.counts.sum(axis=1)
    nonempty = totals > 0
    if not nonempty.any():
        return anon.s_size
    return int(anon.distinct_per_class()[nonempty].min())

