"""Sample-size curves for the uniform and geometric sensitive-value families.

Quasi-identifiers are uniform in both families. ``p`` is either swept
directly or set to ``beta * p_ell``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .distribution import DistributionSummary, JointDistribution, geometric_marginal, p_ell
from .exceptions import ValidationError
from .mechanism import m_bound, sample_size

FAMILIES = ("uniform", "geometric")
SWEEPS = ("delta", "p", "ell")
COLUMNS = ("family", "sweep", "beta", "ell", "delta", "p", "m_bound", "sample_size")


def _grid(value, name: str, integer: bool = False) -> tuple:
    """A list, a scalar, or ``{"start", "stop", "num"[, "scale"]}`` / ``{"start", "stop", "step"}``."""
    if isinstance(value, dict):
        try:
            start, stop = value["start"], value["stop"]
        except KeyError:
            raise ValidationError(f"{name} range needs start and stop") from None
        if integer:
            step = int(value.get("step", 1))
            out = tuple(range(int(start), int(stop) + 1, step))
        else:
            num = int(value.get("num", 50))
            if value.get("scale", "linear") == "log":
                out = tuple(float(x) for x in np.geomspace(start, stop, num))
            else:
                out = tuple(float(x) for x in np.linspace(start, stop, num))
    elif isinstance(value, (list, tuple)):
        out = tuple(int(v) if integer else float(v) for v in value)
    elif value is None:
        out = ()
    else:
        out = (int(value) if integer else float(value),)
    return out


@dataclass(frozen=True)
class ExperimentSpec:
    families: tuple
    sweeps: tuple
    s_alphabet: int = 50
    q_alphabet: int = 3000
    rho: float = 0.95
    beta: tuple = (0.01, 0.02)
    delta: tuple = ()
    ell: tuple = (10, 30)
    p: tuple = ()

    def __post_init__(self):
        for f in self.families:
            if f not in FAMILIES:
                raise ValidationError(f"unknown family {f!r}")
        for s in self.sweeps:
            if s not in SWEEPS:
                raise ValidationError(f"unknown sweep {s!r}")
        if self.s_alphabet < 1 or self.q_alphabet < 1:
            raise ValidationError("alphabet sizes must be positive")
        if not 0 < self.rho < 1:
            raise ValidationError("rho must lie in (0, 1)")
        if any(not 0 < b <= 1 for b in self.beta):
            raise ValidationError("beta values must lie in (0, 1]")
        if any(not 0 < d < 1 for d in self.delta):
            raise ValidationError("delta values must lie in (0, 1)")
        if any(not 1 <= l <= self.s_alphabet for l in self.ell):
            raise ValidationError(f"ell values must lie in [1, {self.s_alphabet}]")
        if any(not 0 < x < 1 for x in self.p):
            raise ValidationError("p values must lie in (0, 1)")
        if not self.delta:
            raise ValidationError("delta grid is empty")
        if "p" in self.sweeps and not self.p:
            raise ValidationError("sweep 'p' needs a p grid")
        if not self.ell:
            raise ValidationError("ell grid is empty")
        if set(self.sweeps) & {"delta", "ell"} and not self.beta:
            raise ValidationError("beta grid is empty")

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentSpec":
        fam = doc.get("family", doc.get("families"))
        sweep = doc.get("sweep", doc.get("sweeps"))
        if fam is None or sweep is None:
            raise ValidationError("experiment spec needs 'family' and 'sweep'")
        return cls(
            families=tuple([fam] if isinstance(fam, str) else fam),
            sweeps=tuple([sweep] if isinstance(sweep, str) else sweep),
            s_alphabet=int(doc.get("s_alphabet", 50)),
            q_alphabet=int(doc.get("q_alphabet", 3000)),
            rho=float(doc.get("rho", 0.95)),
            beta=_grid(doc.get("beta", [0.01, 0.02]), "beta"),
            delta=_grid(doc.get("delta"), "delta"),
            ell=_grid(doc.get("ell", [10, 30]), "ell", integer=True),
            p=_grid(doc.get("p"), "p"),
        )


def family_summary(family: str, s_alphabet: int, q_alphabet: int, rho: float = 0.95) -> DistributionSummary:
    if family == "uniform":
        s_marg = np.full(s_alphabet, 1.0 / s_alphabet)
    elif family == "geometric":
        s_marg = geometric_marginal(s_alphabet, rho)
    else:
        raise ValidationError(f"unknown family {family!r}")
    return JointDistribution.product(np.full(q_alphabet, 1.0 / q_alphabet), s_marg).summary()


def curve(spec: ExperimentSpec, family: str, sweep: str) -> list[dict]:
    summary = family_summary(family, spec.s_alphabet, spec.q_alphabet, spec.rho)

    def row(beta, ell, delta, p):
        m = m_bound(summary, ell, p, spec.q_alphabet)
        return {"family": family, "sweep": sweep, "beta": beta, "ell": ell, "delta": delta,
                "p": p, "m_bound": m, "sample_size": sample_size(m, ell, p, delta)}

    rows = []
    if sweep == "delta":
        for beta in spec.beta:
            for ell in spec.ell:
                p = beta * p_ell(summary, ell)
                rows.extend(row(beta, ell, d, p) for d in spec.delta)
    elif sweep == "p":
        for delta in spec.delta:
            for ell in spec.ell:
                rows.extend(row(None, ell, delta, p) for p in spec.p)
    else:
        for beta in spec.beta:
            for delta in spec.delta:
                rows.extend(row(beta, ell, delta, beta * p_ell(summary, ell)) for ell in spec.ell)
    return rows


def write_curve(rows: Sequence[dict], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: ("" if r[k] is None else (repr(r[k]) if isinstance(r[k], float) else r[k]))
                        for k in COLUMNS})


def run_experiment(spec: ExperimentSpec, out_dir) -> list[Path]:
    """One CSV per (family, sweep), named ``<family>_<sweep>.csv``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for family in spec.families:
        for sweep in spec.sweeps:
            path = out / f"{family}_{sweep}.csv"
            write_curve(curve(spec, family, sweep), path)
            written.append(path)
    return written
