import json
import subprocess
import sys

import pytest

from hpp.cli import main
from hpp.errors import InvariantViolationError


def _read(path):
    return path.read_bytes()


def test_eta_moments_json(tmp_path):
    out = tmp_path / "m.json"
    assert main(["eta", "--field", "5", "-n", "2", "--moments",
                 "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["field"] == "5"
    assert doc["first_moment"] == "1"
    assert doc["k"] == 2
    # second moment is an exact fraction rendered as a string
    from fractions import Fraction

    Fraction(doc["second_moment"])


def test_eta_table_csv_and_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["eta", "--field", "2^2", "-n", "2", "--out"]
    assert main([*args, str(a)]) == 0
    assert main([*args, str(b)]) == 0
    assert _read(a) == _read(b)
    lines = a.read_text().splitlines()
    assert lines[0].startswith("x,")
    assert len(lines) > 1


def test_eta_table_to_stdout_is_a_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["eta", "--field", "5", "-n", "2"])
    assert exc.value.code == 2


def test_field_guard_maps_to_exit_3(capsys):
    assert main(["eta", "--field", "2^21", "-n", "1", "--moments"]) == 3
    assert "error:" in capsys.readouterr().err


def test_bad_field_string_is_a_usage_error(capsys):
    assert main(["eta", "--field", "6", "-n", "1", "--moments"]) == 2
    assert "error:" in capsys.readouterr().err


def test_success_report_json(tmp_path):
    out = tmp_path / "s.json"
    assert main(["success", "--field", "2^2", "-n", "2", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["analysis"] == "second"
    assert doc["ideal_success"] == pytest.approx(2128 / 4096)
    assert doc["mc"] is None


def test_success_mc_requires_seed(monkeypatch):
    monkeypatch.delenv("HPP_SEED", raising=False)
    with pytest.raises(SystemExit) as exc:
        main(["success", "--field", "5", "-n", "2", "--mc", "100"])
    assert exc.value.code == 2


def test_success_mc_and_dump_dist(tmp_path):
    out = tmp_path / "s.json"
    dist = tmp_path / "dist.csv"
    assert main(["success", "--field", "5", "-n", "2", "--mc", "200",
                 "--seed", "cli-test", "--out", str(out),
                 "--dump-dist", str(dist)]) == 0
    doc = json.loads(out.read_text())
    assert doc["mc"]["runs"] == 200
    assert 0.0 <= doc["mc"]["estimate"] <= 1.0
    lines = dist.read_text().splitlines()
    assert lines[0] == "x,good_mass,qprime,probability"
    assert len(lines) > 1


def test_seed_falls_back_to_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("HPP_SEED", "env-seed")
    out = tmp_path / "e.json"
    assert main(["e2e", "--field", "5", "-n", "1", "-m", "1", "--trials", "2",
                 "--summary-out", str(out), "--out", str(tmp_path / "e.csv")]) == 0
    assert json.loads(out.read_text())["trials"] == 2


def test_e2e_runs_and_is_deterministic(tmp_path, monkeypatch):
    monkeypatch.delenv("HPP_SEED", raising=False)
    args = ["e2e", "--field", "7", "-n", "2", "-m", "2", "--trials", "3",
            "--seed", "t0"]
    c1, s1 = tmp_path / "1.csv", tmp_path / "1.json"
    c2, s2 = tmp_path / "2.csv", tmp_path / "2.json"
    assert main([*args, "--out", str(c1), "--summary-out", str(s1)]) == 0
    assert main([*args, "--out", str(c2), "--summary-out", str(s2)]) == 0
    assert _read(c1) == _read(c2)
    assert _read(s1) == _read(s2)
    doc = json.loads(s1.read_text())
    assert doc["kappa"] == 3
    assert doc["success_rate"] == 1.0
    lines = c1.read_text().splitlines()
    assert lines[0] == "trial,success,queries,solves,retries"
    assert len(lines) == 4


def test_e2e_reveal_and_baseline_column(tmp_path):
    csv_out = tmp_path / "e.csv"
    summary = tmp_path / "e.json"
    assert main(["e2e", "--field", "11", "-n", "1", "-m", "1", "--trials", "2",
                 "--seed", "rev", "--baseline", "--reveal",
                 "--out", str(csv_out), "--summary-out", str(summary)]) == 0
    header = csv_out.read_text().splitlines()[0]
    assert header.endswith(",baseline_queries")
    doc = json.loads(summary.read_text())
    assert len(doc["instances"]) == 2
    assert all("hidden" in row for row in doc["instances"])


def test_e2e_baseline_needs_linear_univariate():
    with pytest.raises(SystemExit) as exc:
        main(["e2e", "--field", "7", "-n", "2", "-m", "2", "--seed", "x",
              "--baseline"])
    assert exc.value.code == 2


def test_e2e_requires_seed(monkeypatch):
    monkeypatch.delenv("HPP_SEED", raising=False)
    with pytest.raises(SystemExit) as exc:
        main(["e2e", "--field", "5", "-n", "1", "-m", "1"])
    assert exc.value.code == 2


def test_baseline_command(tmp_path):
    csv_out = tmp_path / "b.csv"
    fit_out = tmp_path / "fit.json"
    assert main(["baseline", "--sizes", "31,101,307", "--trials", "30",
                 "--seed", "0", "--out", str(csv_out),
                 "--fit-out", str(fit_out)]) == 0
    doc = json.loads(fit_out.read_text())
    assert doc["sizes"] == [31, 101, 307]
    assert 0.3 < doc["exponent"] < 0.7
    assert set(doc["medians"]) == {"31", "101", "307"}
    lines = csv_out.read_text().splitlines()
    assert lines[0] == "d,trial,queries,success"
    assert len(lines) == 1 + 3 * 30


def test_baseline_budget_exhaustion_maps_to_exit_1(tmp_path, capsys):
    assert main(["baseline", "--sizes", "1009,2003,4001", "--trials", "30",
                 "--seed", "0", "--max-queries", "2",
                 "--out", str(tmp_path / "x.csv")]) == 1
    assert "error:" in capsys.readouterr().err


def test_baseline_validation_maps_to_exit_2(capsys):
    assert main(["baseline", "--sizes", "31,101", "--trials", "30",
                 "--seed", "0"]) == 2
    assert "error:" in capsys.readouterr().err


def test_plan_command(tmp_path):
    out = tmp_path / "p.json"
    assert main(["plan", "--field", "7", "-n", "2", "-m", "3",
                 "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["kappa"] == 7
    assert doc["tree"]["kind"] == "split"


def test_invariant_violation_maps_to_exit_4(monkeypatch, capsys):
    def boom(*a, **k):
        raise InvariantViolationError("forced")

    monkeypatch.setattr("hpp.cli.success_report", boom)
    assert main(["success", "--field", "5", "-n", "2"]) == 4
    assert "forced" in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "hpp.cli", "plan", "--field", "5", "-n", "1",
         "-m", "2", "--out", str(tmp_path / "p.json")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads((tmp_path / "p.json").read_text())["kappa"] == 2
