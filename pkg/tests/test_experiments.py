import numpy as np
import pytest

from ldelta import ValidationError
from ldelta.experiments import ExperimentSpec, curve, family_summary, run_experiment
from ldelta.distribution import p_ell


def spec(**kw):
    base = dict(families=("uniform",), sweeps=("delta",), delta=tuple(np.geomspace(1e-4, 0.5, 12)))
    base.update(kw)
    return ExperimentSpec(**base)


def test_uniform_curves_do_not_depend_on_ell():
    rows = curve(spec(ell=(10, 30)), "uniform", "delta")
    for beta in (0.01, 0.02):
        n10 = [r["sample_size"] for r in rows if r["beta"] == beta and r["ell"] == 10]
        n30 = [r["sample_size"] for r in rows if r["beta"] == beta and r["ell"] == 30]
        assert n10 == n30


def test_delta_sweep_decreasing():
    for family in ("uniform", "geometric"):
        rows = curve(spec(families=(family,), ell=(10,)), family, "delta")
        for beta in (0.01, 0.02):
            ns = [r["sample_size"] for r in rows if r["beta"] == beta]
            assert all(a >= b for a, b in zip(ns, ns[1:]))
            assert ns[0] > ns[-1]


def test_p_sweep_strictly_decreasing():
    s = spec(sweeps=("p",), delta=(0.01, 0.001), ell=(10,), p=tuple(np.linspace(1e-3, 1 / 50, 20)))
    rows = curve(s, "uniform", "p")
    for d in (0.01, 0.001):
        ns = [r["sample_size"] for r in rows if r["delta"] == d]
        assert all(a > b for a, b in zip(ns, ns[1:]))


def test_geometric_ell_sweep_increasing():
    s = spec(families=("geometric",), sweeps=("ell",), delta=(0.01,), ell=tuple(range(5, 41)))
    rows = curve(s, "geometric", "ell")
    for beta in (0.01, 0.02):
        ns = [r["sample_size"] for r in rows if r["beta"] == beta]
        assert all(a < b for a, b in zip(ns, ns[1:]))


def test_geometric_p_follows_ratio():
    summary = family_summary("geometric", 50, 3000, 0.95)
    p1 = (1 - 0.95) / (1 - 0.95 ** 50)
    for ell in (1, 5, 40):
        assert p_ell(summary, ell) == pytest.approx(p1 * 0.95 ** (ell - 1), rel=1e-12)


def test_uniform_reference_point():
    s = spec(beta=(0.01,), ell=(10,), delta=(0.01,))
    (row,) = curve(s, "uniform", "delta")
    assert row["p"] == pytest.approx(2e-4)
    assert row["sample_size"] == 65606


def test_run_experiment_files(tmp_path):
    s = spec(families=("uniform", "geometric"), sweeps=("delta", "ell"), ell=(5, 10))
    paths = run_experiment(s, tmp_path)
    assert sorted(p.name for p in paths) == ["geometric_delta.csv", "geometric_ell.csv",
                                             "uniform_delta.csv", "uniform_ell.csv"]


def test_from_dict_ranges():
    s = ExperimentSpec.from_dict({"family": ["uniform"], "sweep": "ell",
                                  "delta": 0.01, "ell": {"start": 5, "stop": 40, "step": 5}})
    assert s.ell == (5, 10, 15, 20, 25, 30, 35, 40)
    assert s.delta == (0.01,)


@pytest.mark.parametrize("bad", [
    {"families": ("zipf",)},
    {"sweeps": ("N",)},
    {"beta": (0.0,)},
    {"delta": (1.0,)},
    {"ell": (51,)},
    {"delta": ()},
    {"sweeps": ("p",)},
    {"rho": 1.0},
])
def test_spec_validation(bad):
    with pytest.raises(ValidationError):
        spec(**bad)


def test_from_dict_requires_family_and_sweep():
    with pytest.raises(ValidationError):
        ExperimentSpec.from_dict({"sweep": "delta", "delta": [0.1]})
