"""Readers and writers for the on-disk formats.

Every JSON document carries ``format_version``. Dataset CSVs have a header
row; all columns but the last are quasi-identifier columns and the last is
the sensitive column. Multi-column quasi-identifiers are flattened to a
single index by sorting the distinct tuples lexicographically.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .core import AnonymizedDataset, Dataset, Partition, validate_partition
from .distribution import JointDistribution, geometric_marginal
from .exceptions import ValidationError
from .mechanism import MechanismPlan

FORMAT_VERSION = 1


class FileFormatError(ValidationError):
    def __init__(self, path, message, line: Optional[int] = None):
        self.path = str(path)
        self.line = line
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {message}")


def _load_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FileFormatError(path, f"invalid JSON ({exc.msg})", exc.lineno) from None
    except OSError as exc:
        raise FileFormatError(path, exc.strerror or str(exc)) from None
    if not isinstance(doc, dict):
        raise FileFormatError(path, "expected a JSON object")
    version = doc.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise FileFormatError(path, f"unsupported format_version {version!r}")
    return doc


def dump_json(doc: dict, path=None) -> str:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


# -- datasets -----------------------------------------------------------------

@dataclass(frozen=True)
class QidMapping:
    """Quasi-identifier tuple <-> index, plus the sensitive value order."""

    columns: tuple
    sensitive_column: str
    q_labels: tuple
    s_labels: tuple

    def qid(self, label) -> int:
        key = tuple(label) if isinstance(label, (list, tuple)) else (label,)
        try:
            return self._index[key]
        except KeyError:
            raise ValidationError(f"unknown quasi-identifier {list(key)}") from None

    @property
    def _index(self) -> dict:
        return {lab: i for i, lab in enumerate(self.q_labels)}

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "columns": list(self.columns),
            "sensitive_column": self.sensitive_column,
            "q_labels": [list(l) for l in self.q_labels],
            "s_labels": list(self.s_labels),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "QidMapping":
        return cls(tuple(doc["columns"]), doc["sensitive_column"],
                   tuple(tuple(l) for l in doc["q_labels"]), tuple(doc["s_labels"]))


def read_dataset_csv(path, mapping: Optional[QidMapping] = None) -> tuple[Dataset, QidMapping]:
    """Parse a dataset CSV.

    Without ``mapping`` the alphabets are the distinct values observed,
    sorted lexicographically. With one, values must belong to it.
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise FileFormatError(path, exc.strerror or str(exc)) from None
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or len(header) < 2:
            raise FileFormatError(path, "header needs at least one quasi-identifier and a sensitive column", 1)
        width = len(header)
        rows = []
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != width:
                raise FileFormatError(path, f"expected {width} fields, found {len(row)}", reader.line_num)
            rows.append((tuple(c.strip() for c in row[:-1]), row[-1].strip(), reader.line_num))
    if mapping is None:
        mapping = QidMapping(
            columns=tuple(h.strip() for h in header[:-1]),
            sensitive_column=header[-1].strip(),
            q_labels=tuple(sorted({r[0] for r in rows})),
            s_labels=tuple(sorted({r[1] for r in rows})),
        )
    qindex = mapping._index
    sindex = {s: i for i, s in enumerate(mapping.s_labels)}
    qids, sens = [], []
    for qt, sv, line in rows:
        if qt not in qindex:
            raise FileFormatError(path, f"quasi-identifier {list(qt)} not in mapping", line)
        if sv not in sindex:
            raise FileFormatError(path, f"sensitive value {sv!r} not in mapping", line)
        qids.append(qindex[qt])
        sens.append(sindex[sv])
    if not mapping.q_labels or not mapping.s_labels:
        raise FileFormatError(path, "dataset defines an empty alphabet")
    ds = Dataset(np.array(qids, dtype=np.int64), np.array(sens, dtype=np.int64),
                 len(mapping.q_labels), len(mapping.s_labels),
                 q_labels=mapping.q_labels, s_labels=mapping.s_labels)
    return ds, mapping


def write_dataset_csv(dataset: Dataset, mapping: QidMapping, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*mapping.columns, mapping.sensitive_column])
        for q, s in dataset.records:
            w.writerow([*mapping.q_labels[q], mapping.s_labels[s]])


# -- partitions ---------------------------------------------------------------

def read_partition_json(path, mapping: Optional[QidMapping] = None,
                        q_size: Optional[int] = None) -> Partition:
    """Classes are lists of qid indices, or of label tuples when a mapping is given.

    A document may also give ``boundaries`` (contiguous classes).
    """
    doc = _load_json(path)
    if "boundaries" in doc and "classes" not in doc:
        b = doc["boundaries"]
        classes = [list(range(a, c)) for a, c in zip(b, b[1:])]
    elif "classes" in doc:
        classes = []
        for k, raw in enumerate(doc["classes"]):
            if not isinstance(raw, list):
                raise FileFormatError(path, f"class {k} must be a list")
            members = []
            for m in raw:
                if isinstance(m, int) and not isinstance(m, bool):
                    members.append(m)
                elif mapping is not None:
                    members.append(mapping.qid(m))
                else:
                    raise FileFormatError(path, f"class {k}: label {m!r} needs a dataset mapping")
            classes.append(members)
    else:
        raise FileFormatError(path, "expected 'classes' or 'boundaries'")
    partition = Partition(tuple(classes))
    if q_size is None and mapping is not None:
        q_size = len(mapping.q_labels)
    if q_size is not None:
        validate_partition(partition, q_size)
    return partition


def partition_to_dict(partition: Partition) -> dict:
    return {"format_version": FORMAT_VERSION, "classes": partition.to_lists()}


# -- anonymized datasets ------------------------------------------------------

def anonymized_to_dict(anon: AnonymizedDataset) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "classes": anon.partition.to_lists(),
        "s_labels": list(anon.s_labels) if anon.s_labels else None,
        "counts": anon.counts.tolist(),
    }


def anonymized_from_dict(doc: dict) -> AnonymizedDataset:
    labels = doc.get("s_labels")
    return AnonymizedDataset(Partition(tuple(doc["classes"])), np.array(doc["counts"], dtype=np.int64),
                             s_labels=tuple(labels) if labels else None)


def read_anonymized_json(path) -> AnonymizedDataset:
    doc = _load_json(path)
    try:
        return anonymized_from_dict(doc)
    except (KeyError, TypeError) as exc:
        raise FileFormatError(path, f"malformed anonymized dataset ({exc})") from None


# -- distributions ------------------------------------------------------------

def distribution_from_dict(doc: dict) -> JointDistribution:
    q_labels = doc.get("q_labels")
    s_labels = doc.get("s_labels")
    labels = {"q_labels": tuple(q_labels) if q_labels else None,
              "s_labels": tuple(s_labels) if s_labels else None}
    kinds = [k for k in ("probs", "product", "uniform", "geometric") if k in doc]
    if len(kinds) != 1:
        raise ValidationError("distribution needs exactly one of probs/product/uniform/geometric")
    kind = kinds[0]
    if kind == "probs":
        probs = np.array(doc["probs"], dtype=np.float64)
        if probs.ndim == 1 and q_labels and s_labels:
            probs = probs.reshape(len(q_labels), len(s_labels))
        return JointDistribution(probs, **labels)
    if kind == "product":
        spec = doc["product"]
        return JointDistribution.product(spec["q_marginal"], spec["s_marginal"], **labels)
    q_size = len(q_labels) if q_labels else doc.get("q_size")
    s_size = len(s_labels) if s_labels else doc.get("s_size")
    if not q_size or not s_size:
        raise ValidationError(f"{kind} distribution needs q_labels/s_labels or q_size/s_size")
    if kind == "uniform":
        return JointDistribution.uniform(int(q_size), int(s_size), **labels)
    rho = doc["geometric"]["rho"] if isinstance(doc["geometric"], dict) else doc["geometric"]
    return JointDistribution.product(np.full(int(q_size), 1.0 / int(q_size)),
                                     geometric_marginal(int(s_size), float(rho)), **labels)


def read_distribution_json(path) -> JointDistribution:
    doc = _load_json(path)
    try:
        return distribution_from_dict(doc)
    except (KeyError, TypeError) as exc:
        raise FileFormatError(path, f"malformed distribution ({exc})") from None
    except ValidationError as exc:
        raise FileFormatError(path, str(exc)) from None


def distribution_to_dict(dist: JointDistribution) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "q_labels": list(dist.q_labels) if dist.q_labels else [str(i) for i in range(dist.q_size)],
        "s_labels": list(dist.s_labels) if dist.s_labels else [str(i) for i in range(dist.s_size)],
        "probs": dist.probs.tolist(),
    }


# -- plans --------------------------------------------------------------------

def plan_to_dict(plan: MechanismPlan) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "ell": plan.ell,
        "delta": plan.delta,
        "p": plan.p,
        "m_bound": plan.m_bound,
        "sample_size": plan.sample_size,
        "strategy": plan.strategy,
        "boundaries": list(plan.boundaries) if plan.boundaries is not None else None,
        "classes": plan.partition.to_lists(),
    }


def plan_from_dict(doc: dict) -> MechanismPlan:
    return MechanismPlan(
        ell=int(doc["ell"]),
        delta=float(doc["delta"]),
        p=float(doc["p"]),
        m_bound=float(doc["m_bound"]),
        sample_size=int(doc["sample_size"]),
        partition=Partition(tuple(doc["classes"])),
        strategy=doc.get("strategy", "greedy"),
        boundaries=tuple(doc["boundaries"]) if doc.get("boundaries") else None,
    )


def read_plan_json(path) -> MechanismPlan:
    doc = _load_json(path)
    try:
        return plan_from_dict(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise FileFormatError(path, f"malformed plan ({exc})") from None
