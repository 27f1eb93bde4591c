import json
from pathlib import Path

import pytest

from qbundle.cli import main

SCENARIOS = Path(__file__).parent / "scenarios"


def run(argv, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main(argv + ["--out", str(out)])
    return code, json.loads(out.read_text()), out.read_bytes()


@pytest.mark.parametrize("name", ["u1", "z2_regular", "s3_two_orbits", "hopf_s3", "envelope_s3"])
def test_run_scenarios_pass(name, tmp_path):
    code, doc, _ = run(["run", "--scenario", str(SCENARIOS / f"{name}.ini")], tmp_path)
    assert code == 0
    assert doc["totals"]["failed"] == 0
    assert "wall_clock_seconds" not in doc


def test_u1_report_lines(tmp_path):
    _, doc, _ = run(["run", "--scenario", str(SCENARIOS / "u1.ini")], tmp_path)
    assert "base/base-forms-not-generated: pass" in doc["lines"]


@pytest.mark.parametrize("name, kind", [("not_free", "NotFree"), ("bad_reflections", "NotConjugationClosed")])
def test_invalid_scenarios_exit_two(name, kind, tmp_path):
    code, doc, _ = run(["run", "--scenario", str(SCENARIOS / f"{name}.ini")], tmp_path)
    assert code == 2
    assert doc["error"]["type"] == kind


def test_missing_scenario_exits_two(tmp_path):
    code, doc, _ = run(["run", "--scenario", str(tmp_path / "absent.ini")], tmp_path)
    assert code == 2


def test_failed_checks_exit_one(tmp_path):
    # the identities need λ̃ = iλ; the plain displacement breaks them
    sc = tmp_path / "nonreal.ini"
    sc.write_text((SCENARIOS / "dunkl_rank1.ini").read_text() + "real = false\n")
    code, doc, _ = run(["dunkl", "hermitian", "--scenario", str(sc)], tmp_path)
    assert code == 1
    failed = [r for r in doc["checks"] if r["status"] == "fail"]
    assert failed and all(r["witness"] for r in failed)


def test_gauge_roundtrip_is_deterministic(tmp_path):
    argv = ["gauge", "roundtrip", "--scenario", str(SCENARIOS / "gauge_z2.ini"), "--samples", "4"]
    c1, doc, b1 = run(argv, tmp_path, "a.json")
    c2, _, b2 = run(argv, tmp_path, "b.json")
    assert c1 == c2 == 0 and b1 == b2
    assert doc["notes"]["samples"] == 4 and doc["notes"]["seed"] == 7


def test_timing_flag_adds_wall_clock(tmp_path):
    _, doc, _ = run(["run", "--scenario", str(SCENARIOS / "hopf_s3.ini"), "--timing"], tmp_path)
    assert doc["wall_clock_seconds"] >= 0


@pytest.mark.parametrize("action, name", [("commute", "dunkl_b2"), ("hermitian", "dunkl_a2"),
                                          ("hermitian", "dunkl_rank1"), ("gauge", "dunkl_rank1")])
def test_dunkl_verbs(action, name, tmp_path):
    code, doc, _ = run(["dunkl", action, "--scenario", str(SCENARIOS / f"{name}.ini"), "--max-degree", "2"],
                       tmp_path)
    assert code == 0, doc.get("error")
    assert doc["verb"] == f"dunkl {action}"


def test_dunkl_gauge_rejects_rank_two(tmp_path):
    code, doc, _ = run(["dunkl", "gauge", "--scenario", str(SCENARIOS / "dunkl_a2.ini")], tmp_path)
    assert code == 2


def test_list(capsys):
    assert main(["list"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert "group S3 order=6" in lines
    assert "root-system B2" in lines
