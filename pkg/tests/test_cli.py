import json
import subprocess
import sys
from fractions import Fraction

from lambdak.cli import main, parse_rational_function, run
from lambdak.ring import HalfLaurent, RationalFn


def report_of(argv, capsys):
    code = main([*argv, "--json"])
    out = capsys.readouterr().out
    report = json.loads(out)
    assert report["exit_code"] == code
    return code, report, out


def test_localize_examples(capsys):
    code, report, _ = report_of(["localize", "fixtures/cp1_om.json", "--m", "3", "--generic"], capsys)
    assert code == 0
    assert report["result"]["index"] == "1+g+g^2+g^3"
    assert report["result"]["character"] == "1+g+g^2+g^3"
    assert report["result"]["pole_cancellation"] is True

    code, report, _ = report_of(["localize", "fixtures/free_orbit.json"], capsys)
    assert code == 0 and report["result"]["index"] == "0"

    code, report, _ = report_of(["localize", "cp1_om", "--m", "2", "--at", "1/5"], capsys)
    assert code == 0 and report["result"]["value"]["exact"]


def test_localize_errors(tmp_path, capsys):
    assert main(["localize", "fixtures/cp1_om.json", "--at", "1/1"]) == 3
    assert main(["localize", "no_such_fixture.json"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"components": [{"name": "p", "dim": 0}]}')
    assert main(["localize", str(bad)]) == 2
    odd = tmp_path / "odd.json"
    odd.write_text(json.dumps({"components": [{"name": "p", "dim": 0, "normal": [{"v": 1, "rank": 1}], "l": 0}]}))
    assert main(["localize", str(odd)]) == 3
    capsys.readouterr()


def test_local_file_input(tmp_path, capsys):
    path = tmp_path / "pt.json"
    path.write_text(json.dumps({"components": [{"name": "p", "dim": 0, "normal": [], "l": 0, "E": [{"weight": 2, "rank": 1}]}]}))
    code, report, _ = report_of(["localize", str(path)], capsys)
    assert code == 0 and report["result"]["index"] == "g^2"


def test_eta_circle_examples(capsys):
    _, report, _ = report_of(["eta-circle", "--k", "2", "--generic"], capsys)
    assert report["result"]["value"] == "1/(1-g^2)"
    _, report, _ = report_of(["eta-circle", "--k", "3", "--at", "1/3"], capsys)
    assert report["result"]["value"] == "1/2"
    code, report, _ = report_of(["eta-circle", "--k", "1", "--t", "3/10", "--oracle"], capsys)
    assert code == 0 and float(report["result"]["oracle_error"]) < 1e-9
    code, report, _ = report_of(["eta-circle", "--k", "3", "--t", "0.123456789", "--oracle"], capsys)
    assert code == 0 and report["checks"][0]["status"] == "pass"


def test_invert_lambda_examples(capsys):
    code, report, _ = report_of(["invert-lambda", "--weights", "1:1", "--N", "2", "--D", "2", "--generic"], capsys)
    assert code == 0 and report["checks"][0]["status"] == "pass"
    code, report, _ = report_of(["invert-lambda", "--weights", "1:1,2:1", "--N", "3", "--D", "3"], capsys)
    assert code == 0 and report["result"]["denominator"] == "(g-1)^4(g^2-1)^4"
    assert main(["invert-lambda", "--weights", "2:1", "--at", "1/2"]) == 3
    assert main(["invert-lambda", "--weights", "1:1", "--N", "1", "--D", "2"]) == 3
    assert main(["invert-lambda", "--weights", "1-1"]) == 2
    capsys.readouterr()


def test_reconstruct(capsys):
    code, report, _ = report_of(["reconstruct", "--expr", "1/(1-g^2)", "--bound", "2", "--exclude", "2"], capsys)
    assert code == 0 and report["result"]["reconstructed"] == "1/(1-g^2)"
    code, report, _ = report_of(["reconstruct", "--expr", "1/(1-g^3)", "--bound", "3", "--exclude", "2"], capsys)
    assert code == 1 and "pole outside A" in report["checks"][0]["message"]
    assert main(["reconstruct", "--expr", "1/(1-x)", "--bound", "2"]) == 2
    capsys.readouterr()


def test_parse_rational_function():
    g = HalfLaurent.g
    assert parse_rational_function("g^(1/2)/(1-g)") == RationalFn(g(Fraction(1, 2)), 1 - g())
    assert parse_rational_function("(1+g^-1)/(1-g^2)/3") == RationalFn(g(-1), 3 - 3 * g())


def test_verify_examples(capsys):
    code, report, _ = report_of(["verify", "--suite", "lambda", "--r-max", "3", "--d-max", "5"], capsys)
    assert code == 0 and report["result"]["passed"] == report["result"]["total"] > 0
    assert main(["verify", "--suite", "bogus"]) == 2
    assert main(["verify", "--suite", "gamma", "--r-max", "0"]) == 2
    capsys.readouterr()


def test_verify_all_is_deterministic(capsys):
    argv = ["verify", "--suite", "all", "--seed", "42", "--r-max", "2", "--d-max", "3"]
    code, report, first = report_of(argv, capsys)
    _, _, second = report_of(argv, capsys)
    assert code == 0 and first == second
    assert "timing" not in report and report["parameters"]["seed"] == 42
    assert json.loads(json.dumps(report)) == report
    assert {c["suite"] for c in report["checks"]} >= {"gamma", "lambda", "chern", "gamma-model", "localization", "eta"}


def test_timing_flag():
    _, report = run(["eta-circle", "--k", "1", "--generic", "--timing", "--json"])
    assert isinstance(report["timing"], float)


def test_human_output(capsys):
    assert main(["localize", "fixtures/cp1_om.json", "--m", "1"]) == 0
    out = capsys.readouterr().out
    assert "index: 1+g" in out and "PASS" in out


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "lambdak.cli", "eta-circle", "--k", "2", "--generic"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "1/(1-g^2)" in proc.stdout
