import io
import json
import os
import subprocess
import sys

import pytest

from crinv.cli_report import (AnalyzeOptions, analyze, compare_reports, default_order, main,
                              run_corpus, to_jsonable)
from crinv.corpus import CorpusEntry, Expectation, corpus_to_manifest
from crinv.scalars import QI

from conftest import CYLINDER, HYPERPLANE, LIGHT_CONE, SPHERE

FAST = AnalyzeOptions(parallelism=False)


def _json(capsys, argv):
    code = main(argv)
    return code, capsys.readouterr()


def test_analyze_cone_json(capsys):
    code, out = _json(capsys, ["analyze", "--rho", LIGHT_CONE, "--point", "3,4,5",
                               "--no-parallelism", "--json", "-"])
    assert code == 0
    rep = json.loads(out.out)
    assert rep["k_hat"] == {"re": "0", "im": "2"}
    assert rep["levi"]["rank"] == 1 and rep["k0"] == 2
    assert rep["obstruction"] is None
    assert rep["timings"] is None


def test_exact_report_is_deterministic():
    a = analyze(LIGHT_CONE, ["5", "12", "13"], FAST).to_json()
    b = analyze(LIGHT_CONE, ["5", "12", "13"], FAST).to_json()
    assert a == b
    assert json.loads(a)["input_hash"] == json.loads(b)["input_hash"]


def test_report_round_trip():
    rep = analyze(SPHERE, ["1", "0", "0"], FAST)
    d = json.loads(rep.to_json())
    assert d == json.loads(json.dumps(d))
    assert d["obstruction"]["name"] == "NotRankNMinus1"
    assert d["k0"] == 1


@pytest.mark.parametrize("src, point, dim, name, field, value", [
    (SPHERE, "1,0,0", None, "NotRankNMinus1", "k0", 1),
    (HYPERPLANE, "0,0,0", None, "NotRankNMinus1", "levi", 0),
    (CYLINDER, "1,0,0", "3", "Not2Nondegenerate", "k0", "infinite"),
])
def test_obstructions_exit_zero(capsys, src, point, dim, name, field, value):
    argv = ["analyze", "--rho", src, "--point", point, "--json", "-"]
    if dim:
        argv += ["--dim", dim]
    code, out = _json(capsys, argv)
    assert code == 0
    rep = json.loads(out.out)
    assert rep["obstruction"]["name"] == name
    got = rep[field]["rank"] if field == "levi" else rep[field]
    assert got == value


@pytest.mark.parametrize("argv", [
    ["analyze", "--rho", "re(Z1) +", "--point", "0,0"],
    ["analyze", "--rho", "Z1", "--point", "0"],
    ["analyze", "--rho", LIGHT_CONE, "--point", "1,1,1"],
    ["analyze", "--rho", LIGHT_CONE, "--point", "3,,5"],
    ["analyze", "--rho", LIGHT_CONE, "--point", "3,4"],
    ["analyze"],
    ["frobnicate"],
])
def test_input_errors_exit_two(capsys, argv):
    assert main(argv) == 2


def test_rho_from_file(tmp_path, capsys):
    f = tmp_path / "rho.txt"
    f.write_text(LIGHT_CONE + "\n")
    out = tmp_path / "rep.json"
    code = main(["analyze", "--rho", str(f), "--point", "3,4,5", "--no-parallelism",
                 "--json", str(out)])
    assert code == 0
    assert json.loads(out.read_text())["k0"] == 2
    assert "Case1" in capsys.readouterr().out


def test_jet_order_env(monkeypatch):
    monkeypatch.setenv("CR_JET_ORDER", "7")
    assert default_order() == 7
    assert json.loads(analyze(LIGHT_CONE, ["3", "4", "5"], FAST).to_json())["jet_order"] == 7
    monkeypatch.setenv("CR_JET_ORDER", "x")
    from crinv.errors import DefiningFunctionSyntaxError
    with pytest.raises(DefiningFunctionSyntaxError):
        default_order()
    monkeypatch.delenv("CR_JET_ORDER")
    assert default_order() == 6


def test_float_report_matches_exact():
    ex = json.loads(analyze(LIGHT_CONE, ["8", "15", "17"], FAST).to_json())
    fl = json.loads(analyze(LIGHT_CONE, ["8", "15", "17"], AnalyzeOptions("float", parallelism=False)).to_json())
    assert compare_reports(ex, fl) == []
    fl["k_hat"]["im"] = 2.001
    assert compare_reports(ex, fl)


def test_to_jsonable():
    assert to_jsonable(QI(1, -2)) == {"re": "1", "im": "-2"}
    assert to_jsonable(complex(-0.0, 1.5)) == {"re": 0.0, "im": 1.5}


def _write(tmp_path, entries):
    p = tmp_path / "m.json"
    p.write_text(json.dumps(corpus_to_manifest(entries)))
    return str(p)


def test_corpus_pass_and_fail_codes(tmp_path):
    good = CorpusEntry("sphere", SPHERE, (("1", "0", "0"),),
                       (Expectation("obstruction", "NotRankNMinus1"), Expectation("k0", 1)))
    buf = io.StringIO()
    assert run_corpus(_write(tmp_path, [good]), out=buf) == 0
    assert "pass" in buf.getvalue()
    wrong = CorpusEntry("sphere", SPHERE, (("1", "0", "0"),), (Expectation("k0", 2),))
    buf = io.StringIO()
    assert run_corpus(_write(tmp_path, [wrong]), out=buf) == 3
    assert "expected 2, got 1" in buf.getvalue()


def test_corpus_input_error_and_empty(tmp_path):
    bad = CorpusEntry("bad", "re(Z1) +", (("0", "0"),), (Expectation("k0", 1),))
    assert run_corpus(_write(tmp_path, [bad]), out=io.StringIO()) == 2
    assert run_corpus(_write(tmp_path, []), out=io.StringIO()) == 0


def test_corpus_malformed_manifest(tmp_path, capsys):
    p = tmp_path / "m.json"
    p.write_text('{"schema": 1}')
    assert main(["corpus", "--manifest", str(p)]) == 2
    assert main(["corpus", "--manifest", str(tmp_path / "absent.json")]) == 2


def test_selftest_command(capsys):
    assert main(["selftest"]) == 0
    assert "FAIL" not in capsys.readouterr().out


def test_module_entry_point():
    env = dict(os.environ, PYTHONPATH=os.path.join(os.path.dirname(__file__), "..", "src"))
    proc = subprocess.run([sys.executable, "-m", "crinv", "analyze", "--rho", HYPERPLANE,
                           "--point", "0,0,0", "--json", "-"],
                          capture_output=True, text=True, env=env, timeout=120)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["levi"]["rank"] == 0
