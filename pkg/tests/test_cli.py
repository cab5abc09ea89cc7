import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from padiflow.cli import run

FIX = Path(__file__).parent / "fixtures"


def call(*argv):
    buf = io.StringIO()
    code = run([str(a) for a in argv], out=buf)
    text = buf.getvalue()
    return code, text


def call_json(*argv):
    code, text = call(*argv)
    return code, json.loads(text)


ERROR_CASES = [
    # (command, fixture, exit code, error kind)
    ("solve", "err_malformed.json", 2, "parse"),
    ("solve", "err_schema_missing_s.json", 2, "parse"),
    ("solve", "err_bad_rational.json", 2, "parse"),
    ("solve", "err_wrong_kind.json", 2, "parse"),
    ("solve", "err_not_coprime.json", 2, "parse"),
    ("solve", "err_not_prime.json", 2, "parse"),
    ("solve", "err_series_no_order.json", 2, "parse"),
    ("solve", "missing_file.json", 2, "parse"),
    ("separatrix", "err_zero_field.json", 2, "parse"),
    ("separatrix", "err_no_order.json", 2, "parse"),
    ("solve", "err_hyp_a_norm.json", 1, "hypothesis-violated"),
    ("solve", "err_hyp_a_linear.json", 1, "hypothesis-violated"),
    ("solve", "err_hyp_c_norm.json", 1, "hypothesis-violated"),
    ("solve", "err_hyp_radius.json", 1, "hypothesis-violated"),
    ("separatrix", "err_field_not_normal.json", 1, "precondition-violated"),
    ("separatrix", "err_field_nonreduced.json", 1, "precondition-violated"),
    ("separatrix", "err_field_constant.json", 1, "invalid-argument"),
    ("size", "err_size_nonintegral.json", 1, "hypothesis-violated"),
    ("size", "err_size_constant.json", 1, "invalid-argument"),
]


@pytest.mark.parametrize("command,fixture,code,kind", ERROR_CASES)
def test_error_paths(command, fixture, code, kind):
    got, report = call_json(command, "--input", FIX / fixture)
    assert got == code
    assert report["status"] == "error" and report["error"] == kind


def test_every_error_fixture_is_exercised():
    used = {f for _, f, _, _ in ERROR_CASES}
    on_disk = {p.name for p in FIX.glob("err_*.json")}
    assert on_disk <= used


def test_hypothesis_report_names_coefficient():
    _, report = call_json("solve", "--input", FIX / "err_hyp_c_norm.json")
    assert report["hypothesis"] == "||c_2||_r <= 1/p" and report["index"] == 3


def test_solve_flagship():
    code, report = call_json("solve", "--input", FIX / "flagship_ode.json", "--order", 128)
    assert code == 0
    assert report["agree"] and report["direct"] == report["newton"]
    assert report["order"] == 128
    assert report["selfBounded"] and report["decrementWithinBound"]
    assert report["ledger"]["k1"] == 8


def test_separatrix_flagship():
    code, report = call_json("separatrix", "--input", FIX / "flagship_field.json", "--order", 64)
    assert code == 0
    assert report["phi2"]["terms"] == [[2, "1/3"]]
    assert report["defectOrder2"] is None and report["zeroThrough"] == 64
    assert report["classification"]["kind"] == "nondegenerateReduced"
    _, text = call("--human", "separatrix", "--input", FIX / "flagship_field.json")
    assert "phi2 = T^2: 1/3" in text and "defect order 2: > 64" in text


def test_size_reports():
    code, report = call_json("size", "--input", FIX / "size_series.json")
    assert code == 0 and report["lambdaP"] == "-1" and report["exact"] is True
    code, report = call_json("size", "--input", FIX / "size_integral.json")
    assert report["lowerBoundLogP"] == "0" and report["properTransform"]["terms"][0] == [1, "3"]
    code, report = call_json("size", "--input", FIX / "size_integral.json", "--prime", 4)
    assert code == 2


def test_pclosed_scan():
    code, report = call_json("pclosed", "--input", FIX / "flagship_field.json")
    assert code == 0
    status = {r["p"]: r["status"] for r in report["results"]}
    assert status[3] == "not-closed" and status[97] == "closed" and len(status) == 24
    _, report = call_json("pclosed", "--input", FIX / "field_bad_reduction.json")
    assert report["results"][0] == {"p": 3, "status": "bad-reduction"}
    code, _ = call_json("pclosed", "--input", FIX / "flagship_field.json", "--range", 10, 5)
    assert code == 2


def test_budget_monotone():
    _, small = call_json("budget", "--pmax", 100, "--t", 1, "--C", 14)
    code, big = call_json("budget", "--pmax", 1000, "--t", 1, "--C", 14)
    assert code == 0
    from padiflow.exactnum import Q
    assert Q(small["partial"][0]) < Q(big["partial"][0])
    assert Q(big["tail"][1]) < Q(small["tail"][0])
    assert call_json("budget", "--pmax", 2)[0] == 2
    assert call_json("budget", "--pmax", 50, "--C", "x")[0] == 2


def test_selftest_passes():
    code, report = call_json("selftest", "--seed", 3)
    assert code == 0 and report["passed"]


def test_reports_are_deterministic():
    for argv in (("solve", "--input", FIX / "flagship_ode.json", "--order", 64),
                 ("separatrix", "--input", FIX / "flagship_field.json"),
                 ("budget", "--pmax", 500),
                 ("--human", "solve", "--input", FIX / "flagship_ode.json", "--order", 32)):
        assert call(*argv) == call(*argv)


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as e:
        run(["nonsense"])
    assert e.value.code == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "padiflow.cli", "budget", "--pmax", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["pMax"] == 3
