import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from ldelta import (
    CoverageError,
    Dataset,
    JointDistribution,
    Partition,
    anonymize,
    diversity,
    plan,
    sample_dataset,
)
from ldelta.cli import main
from ldelta.io import (
    FileFormatError,
    QidMapping,
    anonymized_from_dict,
    anonymized_to_dict,
    distribution_from_dict,
    distribution_to_dict,
    dump_json,
    plan_from_dict,
    plan_to_dict,
    read_dataset_csv,
    read_distribution_json,
    read_partition_json,
    write_dataset_csv,
)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_check_diversity_clinic(capsys, fixtures):
    code, out, _ = run(capsys, "check-diversity", fixtures / "clinic.csv", fixtures / "clinic_partition.json")
    assert code == 0 and out == "2\n"


def test_check_diversity_single(capsys, fixtures):
    code, out, _ = run(capsys, "check-diversity", fixtures / "single.csv", fixtures / "single_partition.json")
    assert code == 0 and out == "1\n"


def test_check_diversity_matches_library(capsys, tmp_path):
    rng = np.random.default_rng(31)
    ds = Dataset(rng.integers(0, 6, 40), rng.integers(0, 4, 40), 6, 4)
    mapping = QidMapping(("zone",), "label", tuple((f"z{i}",) for i in range(6)),
                         tuple(f"v{i}" for i in range(4)))
    write_dataset_csv(ds, mapping, tmp_path / "d.csv")
    part = Partition(((0, 1, 2), (3, 4, 5)))
    (tmp_path / "p.json").write_text(json.dumps({"format_version": 1, "classes": part.to_lists()}))
    code, out, _ = run(capsys, "check-diversity", tmp_path / "d.csv", tmp_path / "p.json")
    assert code == 0
    reread, _ = read_dataset_csv(tmp_path / "d.csv", mapping)
    assert int(out) == diversity(anonymize(reread, part)) == diversity(anonymize(ds, part))


def test_worst_case_cli(capsys):
    assert run(capsys, "worst-case", "--ell", 4, "--s-alphabet", 5, "--t", 2)[1] == "3\n"
    assert run(capsys, "worst-case", "--ell", 1, "--s-alphabet", 7, "--t", 3)[1] == "1\n"


def test_worst_case_brute_force_cli(capsys):
    code, out, _ = run(capsys, "worst-case", "--ell", 6, "--s-alphabet", 7, "--t", 3, "--brute-force")
    assert code == 0
    assert "closed_form: 4" in out and "brute_force: 4" in out and "agree: yes" in out


def test_worst_case_vectors_cli(capsys):
    _, out, _ = run(capsys, "worst-case", "--ell", 3, "--s-alphabet", 5, "--t", 2, "--vectors")
    assert out.split() == ["1", "11100", "10011"]


def test_worst_case_exit_codes(capsys):
    assert run(capsys, "worst-case", "--ell", 4, "--s-alphabet", 6, "--t", 2)[0] == 2
    code, out, _ = run(capsys, "worst-case", "--ell", 4, "--s-alphabet", 6, "--t", 2, "--brute-force")
    assert code == 0 and "brute_force: 2" in out
    assert run(capsys, "worst-case", "--ell", 3, "--s-alphabet", 13, "--t", 2, "--brute-force")[0] == 4


def test_plan_and_simulate_cli(capsys, tmp_path, fixtures):
    plan_path = tmp_path / "plan.json"
    code, _, _ = run(capsys, "plan", "--dist", fixtures / "uniform_10x5.json", "--ell", 3,
                     "--delta", 0.05, "--beta", 0.5, "--out", plan_path)
    assert code == 0
    doc = json.loads(plan_path.read_text())
    assert doc["format_version"] == 1
    assert {"ell", "delta", "p", "m_bound", "sample_size", "classes"} <= set(doc)
    dist = read_distribution_json(fixtures / "uniform_10x5.json")
    assert doc["sample_size"] == plan(dist, 3, 0.05, beta=0.5).sample_size

    outs = []
    for _ in range(2):
        code, out, _ = run(capsys, "simulate", "--plan", plan_path, "--dist", fixtures / "uniform_10x5.json",
                           "--t", 2, "--trials", 300, "--seed", 4)
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]
    rep = json.loads(outs[0])
    assert rep["trials"] == 300 and rep["t"] == 2 and rep["bound"] == pytest.approx(0.1)


def test_simulate_per_trial_csv(capsys, tmp_path, fixtures):
    dist = read_distribution_json(fixtures / "uniform_10x5.json")
    dump_json(plan_to_dict(plan(dist, 2, 0.1, beta=1.0)), tmp_path / "plan.json")
    code, _, _ = run(capsys, "simulate", "--plan", tmp_path / "plan.json", "--dist",
                     fixtures / "uniform_10x5.json", "--trials", 20, "--seed", 0,
                     "--out", tmp_path / "r.json", "--per-trial-csv", tmp_path / "t.csv")
    assert code == 0
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "trial,seed,min_distinct" and len(lines) == 21


def test_plan_infeasible_exit_code(capsys, tmp_path):
    (tmp_path / "d.json").write_text(json.dumps({
        "format_version": 1, "probs": [[0.1, 0.4], [0.3, 0.2]]}))
    code, _, err = run(capsys, "plan", "--dist", tmp_path / "d.json", "--ell", 1, "--delta", 0.05,
                       "--beta", 0.5, "--strategy", "ind")
    assert code == 2 and "product" in err


def test_plan_validation_exit_code(capsys, fixtures):
    code, _, err = run(capsys, "plan", "--dist", fixtures / "uniform_10x5.json", "--ell", 3,
                       "--delta", 0.05, "--p", 0.9)
    assert code == 2 and err.startswith("error:")


def test_link_cli(capsys, fixtures):
    code, out, _ = run(capsys, "link", fixtures / "release_a.json", fixtures / "release_b.json", "--qid", 1)
    doc = json.loads(out)
    assert code == 0
    assert doc["diversity"] == 1 and list(doc["linkage"].values()) == [1]
    code, out, _ = run(capsys, "link", fixtures / "release_a.json", fixtures / "release_b.json")
    assert json.loads(out)["diversity"] == 1


def test_anonymize_cli_round_trip(capsys, tmp_path, fixtures):
    code, out, _ = run(capsys, "anonymize", fixtures / "clinic.csv", fixtures / "clinic_partition.json",
                       "--mapping-out", tmp_path / "m.json")
    assert code == 0
    anon = anonymized_from_dict(json.loads(out))
    assert anon.total == 5 and diversity(anon) == 2
    mapping = QidMapping.from_dict(json.loads((tmp_path / "m.json").read_text()))
    assert mapping.columns == ("gender", "postal_code")


def test_experiment_cli(capsys, tmp_path):
    spec = {"format_version": 1, "family": "uniform", "sweep": "delta",
            "beta": [0.01, 0.02], "ell": [10, 30], "delta": {"start": 1e-3, "stop": 0.1, "num": 5, "scale": "log"}}
    (tmp_path / "spec.json").write_text(json.dumps(spec))
    code, out, _ = run(capsys, "experiment", "--spec", tmp_path / "spec.json", "--out", tmp_path / "o")
    assert code == 0
    text = (tmp_path / "o" / "uniform_delta.csv").read_text()
    assert text.splitlines()[0] == "family,sweep,beta,ell,delta,p,m_bound,sample_size"
    assert len(text.splitlines()) == 1 + 2 * 2 * 5
    run(capsys, "experiment", "--spec", tmp_path / "spec.json", "--out", tmp_path / "o2")
    assert (tmp_path / "o2" / "uniform_delta.csv").read_text() == text


def test_bad_spec_exit_code(capsys, tmp_path):
    (tmp_path / "spec.json").write_text(json.dumps({"family": "zipf", "sweep": "delta", "delta": [0.1]}))
    assert run(capsys, "experiment", "--spec", tmp_path / "spec.json", "--out", tmp_path)[0] == 2


def test_console_script_byte_identical(tmp_path, fixtures):
    exe = shutil.which("ldelta")
    cmd = [exe] if exe else [sys.executable, "-m", "ldelta.cli"]
    args = ["check-diversity", str(fixtures / "clinic.csv"), str(fixtures / "clinic_partition.json")]
    a = subprocess.run(cmd + args, capture_output=True, check=True).stdout
    b = subprocess.run(cmd + args, capture_output=True, check=True).stdout
    assert a == b == b"2\n"


def test_csv_errors_carry_line_numbers(tmp_path):
    (tmp_path / "bad.csv").write_text("a,b,s\nx,1,u\ny,2\n")
    with pytest.raises(FileFormatError) as exc:
        read_dataset_csv(tmp_path / "bad.csv")
    assert exc.value.line == 3
    (tmp_path / "hdr.csv").write_text("s\n")
    with pytest.raises(FileFormatError):
        read_dataset_csv(tmp_path / "hdr.csv")


def test_csv_unknown_value_against_mapping(tmp_path, fixtures):
    _, mapping = read_dataset_csv(fixtures / "clinic.csv")
    (tmp_path / "d.csv").write_text("gender,postal_code,disease\nMale,560012,Flu\n")
    with pytest.raises(FileFormatError) as exc:
        read_dataset_csv(tmp_path / "d.csv", mapping)
    assert exc.value.line == 2


def test_partition_json_errors(tmp_path, fixtures):
    _, mapping = read_dataset_csv(fixtures / "clinic.csv")
    (tmp_path / "p.json").write_text('{"classes": [[0, 1]]}')
    with pytest.raises(CoverageError) as exc:
        read_partition_json(tmp_path / "p.json", mapping)
    assert exc.value.exit_code == 2
    (tmp_path / "v.json").write_text('{"format_version": 2, "classes": [[0]]}')
    with pytest.raises(FileFormatError):
        read_partition_json(tmp_path / "v.json")
    (tmp_path / "j.json").write_text('{"classes": [[0]\n')
    with pytest.raises(FileFormatError):
        read_partition_json(tmp_path / "j.json")
    (tmp_path / "b.json").write_text('{"boundaries": [0, 2, 3]}')
    assert read_partition_json(tmp_path / "b.json", mapping).to_lists() == [[0, 1], [2]]


def test_csv_anonymize_export_round_trip(tmp_path):
    dist = JointDistribution.geometric(6, 4, 0.7)
    ds = sample_dataset(dist, 200, seed=8)
    mapping = QidMapping(("a", "b"), "s", tuple((str(q // 3), str(q % 3)) for q in range(6)),
                         tuple(f"s{i}" for i in range(4)))
    write_dataset_csv(ds, mapping, tmp_path / "d.csv")
    again, _ = read_dataset_csv(tmp_path / "d.csv", mapping)
    part = Partition(((0, 1), (2, 3, 4), (5,)))
    before = anonymize(ds, part)
    doc = json.loads(dump_json(anonymized_to_dict(anonymize(again, part))))
    np.testing.assert_array_equal(anonymized_from_dict(doc).counts, before.counts)


def test_distribution_round_trip(tmp_path):
    dist = JointDistribution.geometric(4, 3, 0.6)
    back = distribution_from_dict(json.loads(dump_json(distribution_to_dict(dist))))
    np.testing.assert_allclose(back.probs, dist.probs, rtol=0, atol=1e-15)
    prod = distribution_from_dict({"product": {"q_marginal": [0.5, 0.5], "s_marginal": [0.2, 0.8]}})
    assert prod.summary().product_form
    geo = distribution_from_dict({"geometric": {"rho": 0.5}, "q_size": 2, "s_size": 3})
    assert geo.s_marginal[0] > geo.s_marginal[1]


def test_plan_round_trip():
    dist = JointDistribution.uniform(8, 4)
    pl = plan(dist, 2, 0.05, beta=0.25)
    back = plan_from_dict(json.loads(dump_json(plan_to_dict(pl))))
    assert back.partition.to_lists() == pl.partition.to_lists()
    assert (back.sample_size, back.p, back.m_bound) == (pl.sample_size, pl.p, pl.m_bound)
