import io
import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from rostchow.catalog import BUNDLED
from rostchow.cli import run

SCHEMA = json.loads((Path(__file__).parents[1] / "src/rostchow/schema/report.schema.json").read_text())


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def call_json(*argv):
    code, out, err = call(*argv, "--json")
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    return code, doc


@pytest.mark.parametrize("argv", [
    ["list"], ["show", "Spin_11"], ["poincare", "E_8", "-p", "5"], ["chow", "Spin_7"],
    ["verify-edge", "E_8", "-p", "2"], ["verify-restriction", "Spin_11", "--to", "Spin_7", "--labels", "y10"],
    ["validate", "--all"], ["ss-run", "Spin_11"], ["ss-run", "--fiber", "y6=6", "--d", "7:y6=rho^7"],
])
def test_verbs_succeed_and_json_validates(argv):
    code, _, _ = call(*argv)
    assert code == 0
    code, doc = call_json(*argv)
    assert code == 0 and doc["status"] == "pass" and doc["schema_version"] == "1"
    assert doc["command"] == argv[0]


def test_unknown_group_suggests():
    code, _, err = call("show", "Spin_12")
    assert code == 2
    assert "unknown group" in err and "Spin_13" in err


def test_ambiguous_prime_needs_flag():
    code, _, err = call("show", "E_8")
    assert code == 2 and "-p" in err


def test_usage_errors_exit_two():
    assert call("frobnicate")[0] == 2
    assert call("ss-run")[0] == 2
    assert call("verify-restriction", "Spin_11")[0] == 2


def test_error_envelope_in_json():
    code, doc = call_json("show", "Nope_3")
    assert code == 2 and doc["status"] == "error"


def test_chow_table_matches_json():
    code, out, _ = call("chow", "Spin_7")
    _, doc = call_json("chow", "Spin_7")
    assert "Z/2" in out and "c2" in out
    w = doc["results"][0]["witnesses"]
    groups = {int(d): (g["free"], g["torsion"]) for d, g in w["groups"].items()}
    assert groups == {0: (1, []), 4: (0, [2]), 6: (1, [])}
    assert w["names"]["4"] == ["c2"]


def test_poincare_table_matches_json():
    _, out, _ = call("poincare", "Spin_11")
    _, doc = call_json("poincare", "Spin_11")
    w = doc["results"][0]["witnesses"]
    assert {int(k): v for k, v in w["series"].items()} == {0: 1, 6: 1, 10: 1, 16: 1}
    assert w["dimension"] == 4 and w["top_degree"] == 16
    assert "top degree 16" in out


def test_failing_verification_exits_one(tmp_path):
    text = BUNDLED.read_text().replace("restrict Spin_7 c5 -> 2*y10 integral", "restrict Spin_7 c5 -> 0 integral")
    path = tmp_path / "cat.txt"
    path.write_text(text)
    code, doc = call_json("verify-restriction", "Spin_11", "--to", "Spin_7", "--labels", "y10", "--catalog", str(path))
    assert code == 1 and doc["status"] == "fail"
    assert any(r["verdict"] == "fail" for r in doc["results"])


def test_malformed_catalog_is_a_data_error(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("[entry Spin_7 p=2]\nbogus line\n")
    code, _, err = call("list", "--catalog", str(path))
    assert code == 2 and "line 2" in err


def test_env_var_selects_catalog(tmp_path):
    path = tmp_path / "tiny.txt"
    path.write_text("[entry pt p=2]\n")
    env = {"ROSTCHOW_CATALOG": str(path), "PATH": "/usr/bin:/bin"}
    proc = subprocess.run([sys.executable, "-m", "rostchow", "list", "--json"], capture_output=True, text=True, env=env)
    assert proc.returncode == 0, proc.stderr
    doc = json.loads(proc.stdout)
    assert [r["entry"] for r in doc["results"]] == ["pt p=2"]
    assert doc["catalog"] == str(path)


def test_validate_all_reports_known_only():
    code, doc = call_json("validate", "--all")
    assert code == 0
    flagged = [r for r in doc["results"] if r["verdict"] in ("inconsistent", "fail")]
    assert all(r["witnesses"].get("known_inconsistent") for r in flagged)
    assert len(flagged) == 3


def test_report_runs_all_criteria():
    code, out, _ = call("report")
    assert code == 0
    assert "10/10 criteria pass" in out
