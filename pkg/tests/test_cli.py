import json
import subprocess
import sys

import pytest

from spatial_alex.cli import main
from spatial_alex.fixtures import fixture_text


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_rot_of_fig5(capsys):
    code, out, _ = run(capsys, "rot", "fixture:fig5", "--basis", "t,s")
    assert code == 0 and out.strip() == "t*s^-1"


def test_regions_flag_unbounded(capsys):
    code, report = run_json(capsys, "regions", "fixture:fig5", "--basis", "t,s")
    texts = sorted(r["winding"]["text"] for r in report["result"]["regions"])
    assert texts == sorted(["1", "t", "s^-1", "t*s^-1"])
    assert [r["winding"]["text"] for r in report["result"]["regions"] if r["unbounded"]] == ["1"]


def test_alexander_reports_rot_and_raw_sum(capsys):
    code, report = run_json(capsys, "alexander", "fixture:circle")
    assert code == 0 and report["schema"] == 1
    result = report["result"]
    assert result["alexander"]["text"] == "1/(t^(1/2)-t^(-1/2))"
    assert result["rot"]["text"] == "t"
    assert result["oracles"] == {"base_point_sweep": True}
    assert "text" in result["raw_sum"]
    assert result["polynomial"] is False


def test_alexander_polynomial_flag(capsys):
    _, report = run_json(capsys, "alexander", "fixture:theta")
    assert report["result"]["polynomial"] is True
    assert report["result"]["polynomial_text"] == "b^(1/2)-b^(-1/2)"


def test_basis_renaming(capsys):
    _, out, _ = run(capsys, "alexander", "fixture:fig5", "--basis", "x,y", "--oracle", "off")
    assert out.strip() == "x^(1/2)*y^(1/2)-x^(-1/2)*y^(-1/2)"


def test_statesum_with_base(capsys):
    code, report = run_json(capsys, "statesum", "fixture:fig5", "--base", "m")
    assert code == 0 and report["result"]["base"] == "m"
    assert report["result"]["oracles"]["determinant"]


def test_specialize_auto(capsys):
    code, report = run_json(capsys, "specialize", "fixture:fig5", "--coloring", "auto")
    assert code == 0 and report["result"]["oracles"]["single_variable_pipeline"]


def test_specialize_explicit(capsys):
    code, out, _ = run(capsys, "specialize", "fixture:theta", "--coloring", "a=1,b=2,c=1")
    assert code == 0 and out.strip() == "-t^2+1"


@pytest.mark.parametrize("name", ["circle", "fig5", "theta", "hopf", "trefoil"])
def test_check_passes(capsys, name):
    code, report = run_json(capsys, "check", f"fixture:{name}")
    assert code == 0 and all(report["result"]["checks"].values())
    if name == "theta":
        assert report["result"]["checks"]["arborescence_count"]


def test_check_on_disconnected_input(capsys, tmp_path):
    data = json.loads(fixture_text("circle"))
    data["edges"].append({"id": "u"})
    data["free_loops"].append({"id": "M", "edge": "u", "orientation": "cw", "face": None})
    path = tmp_path / "two.json"
    path.write_text(json.dumps(data))
    code, report = run_json(capsys, "check", str(path))
    assert code == 0 and report["result"]["checks"] == {"disconnected_statesum_zero": True}


def test_reports_are_byte_identical(capsys):
    first = run(capsys, "alexander", "fixture:trefoil", "--json")
    second = run(capsys, "alexander", "fixture:trefoil", "--json")
    assert first == second


def test_fuzz_then_replay(capsys, tmp_path):
    script = tmp_path / "moves.json"
    code, report = run_json(capsys, "fuzz", "fixture:fig5", "--seed", "1", "--moves", "50", "--framed",
                            "--script-out", str(script))
    assert code == 0 and all(step["ok"] for step in report["result"]["steps"])
    assert json.loads(script.read_text()) == report["result"]["script"]
    code, replayed = run_json(capsys, "replay", "fixture:fig5", str(script))
    assert code == 0
    assert replayed["result"]["alexander"] == report["result"]["alexander"]


def test_unframed_fuzz_logs_drift(capsys):
    code, report = run_json(capsys, "fuzz", "fixture:fig5", "--seed", "1", "--moves", "50")
    factors = {s["bracket_factor"]["text"] for s in report["result"]["steps"]}
    assert code == 0 and factors - {"1"}


def test_errors_exit_nonzero(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    code, out, err = run(capsys, "rot", str(bad))
    assert code == 2 and "MalformedInput" in err
    code, report = run_json(capsys, "rot", "fixture:nope")
    assert code == 2 and report["ok"] is False


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "spatial_alex", "rot", "fixture:circle"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.strip() == "t"
