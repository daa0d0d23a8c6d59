import json
import subprocess
import sys

import pytest

from plancherel import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize(
    "functional,exact",
    [("x_plus_y", "25/6"), ("x_minus_y", "0"), ("durfee", "7/6"), ("phi:0", "7/6")],
)
def test_expect_n4(capsys, functional, exact):
    code, out, _ = run(capsys, "expect", "--n", "4", "--functional", functional)
    assert code == 0
    assert out.split("\t")[0] == exact


def test_expect_json_and_growth_covariance(capsys):
    code, out, _ = run(capsys, "expect", "--n", "1", "--functional", "x_plus_y", "--format", "json")
    assert code == 0 and json.loads(out)["exact"] == "0"
    code, out, _ = run(capsys, "expect", "--n", "8", "--functional", "cov_growth")
    assert code == 0 and out.startswith("-863/5600")


def test_expect_log_prob_is_symbolic(capsys):
    code, out, _ = run(capsys, "expect", "--n", "3", "--functional", "log_prob")
    assert code == 0 and "log" in out


def test_enumeration_cap_exit_code(capsys):
    code, _, err = run(capsys, "expect", "--n", "30", "--functional", "durfee", "--cap", "20")
    assert code == 3 and "cap" in err


def test_unknown_functional_exit_code(capsys):
    code, _, err = run(capsys, "expect", "--n", "3", "--functional", "nope")
    assert code == 2 and err.startswith("error:")


def test_seq_durfee_csv(capsys):
    code, out, _ = run(capsys, "seq", "--name", "durfee", "--n-max", "4")
    assert code == 0 and out == "n,value\n1,1\n2,1\n3,1\n4,7/6\n"


def test_seq_cross_checked_modes(capsys):
    code, out, _ = run(capsys, "seq", "--name", "exy", "--n-max", "6", "--mode", "sum,recurrence,oracle")
    assert code == 0 and out.splitlines()[3] == "3,7/3"


def test_seq_aep_value(capsys):
    code, out, _ = run(capsys, "seq", "--name", "aep", "--ns", "7")
    assert code == 0
    assert out.splitlines()[1].startswith("7,0.82081164148")


def test_seq_float_recurrence(capsys):
    code, out, _ = run(capsys, "seq", "--name", "omega:2", "--ns", "500", "--mode", "recurrence", "--float")
    assert code == 0 and out.splitlines()[1].startswith("500,")


def test_seq_missing_recurrence_is_usage_error(capsys):
    code, _, _ = run(capsys, "seq", "--name", "z", "--n-max", "3", "--mode", "recurrence")
    assert code == 2


def test_seq_tiny_precision_is_resource_error(capsys):
    code, _, _ = run(capsys, "seq", "--name", "z", "--ns", "200", "--precision", "160")
    assert code == 3


def test_precision_env_var(monkeypatch):
    monkeypatch.setenv(cli.PRECISION_ENV, "320")
    assert cli.default_precision() == 320
    monkeypatch.setenv(cli.PRECISION_ENV, "lots")
    with pytest.raises(cli.UsageError):
        cli.default_precision()


def test_validate_identities(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, _, _ = run(capsys, "validate", "--suite", "identities", "--output", str(target))
    report = json.loads(target.read_text())
    assert code == 0 and report["pass"] and report["first_failure"] is None


def test_validate_constants(capsys):
    code, out, _ = run(capsys, "validate", "--suite", "constants")
    assert code == 0 and json.loads(out)["pass"]


def test_profile_n10(capsys):
    code, out, _ = run(capsys, "profile", "--n", "10")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "u,tilde_omega,omega,difference,error"
    assert lines[1].split(",")[3] == "-1.011282865003e-03"


def test_profile_all_needs_output_dir(capsys):
    code, _, _ = run(capsys, "profile", "--preset", "all")
    assert code == 2


def test_profile_preset_writes_file(capsys, tmp_path):
    target = tmp_path / "fig4a.csv"
    code, _, _ = run(capsys, "profile", "--preset", "fig4a", "--output", str(target))
    rows = target.read_text().splitlines()
    assert code == 0 and len(rows) > 50
    assert max(abs(float(r.split(",")[3])) for r in rows[1:]) < 1e-2


def test_simulate_json_lines(capsys):
    code, out, _ = run(capsys, "simulate", "--n", "4", "--trials", "2000", "--statistics", "x_plus_y,durfee")
    recs = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and [r["statistic"] for r in recs] == ["x_plus_y", "durfee"]
    assert recs[0]["reference"] == pytest.approx(25 / 6)
    assert abs(recs[0]["z_score"]) < 5


def test_simulate_rejects_zero_trials():
    with pytest.raises(SystemExit) as exc:
        cli.main(["simulate", "--n", "4", "--trials", "0"])
    assert exc.value.code == 2


def test_module_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "plancherel", "expect", "--n", "2", "--functional", "durfee"],
        capture_output=True, text=True,
    )
    assert out.returncode == 0 and out.stdout.startswith("1\t")
