import csv
import io
import json
import math
import os
import subprocess
import sys
from fractions import Fraction

import pytest

from aimtrig import cli
from aimtrig.perturbation import AmbiguityError


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def test_solve_box(capsys):
    code, data = run_json(capsys, "solve", "--potential", "sine2", "--mu", "0", "--levels", "3")
    assert code == cli.EXIT_OK
    assert [round(float(r["energy"]), 12) for r in data["rows"]] == [1.0, 4.0, 9.0]
    assert data["config"]["params"] == {"mu": "0"}


def test_solve_csv_keeps_full_precision(capsys):
    code, out, _ = run(capsys, "solve", "--mu", "1", "--levels", "2", "--digits", "10", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 2
    assert rows[0]["energy"].startswith("1.2424288259")
    assert len(rows[0]["energy"]) > 30


def test_json_round_trip_verifies(capsys, tmp_path):
    path = tmp_path / "run.json"
    code, _, _ = run(capsys, "solve", "--mu", "1", "--levels", "3", "--digits", "10", "--format", "json",
                     "--out", str(path))
    assert code == 0
    code, out, _ = run(capsys, "verify", str(path))
    assert code == cli.EXIT_OK and "verified 3" in out
    data = json.loads(path.read_text())
    data["rows"][1]["energy"] = "4.5"
    path.write_text(json.dumps(data))
    code, _, err = run(capsys, "verify", str(path))
    assert code == cli.EXIT_MISMATCH and "n=1" in err


def test_partial_convergence_exit_code(capsys):
    code, _, err = run(capsys, "solve", "--mu", "10", "--levels", "6", "--digits", "10", "--max-iter", "12")
    assert code == cli.EXIT_PARTIAL
    assert "warning" in err


@pytest.mark.parametrize("argv", [
    ["solve", "--digits", "45"],
    ["solve", "--levels", "0"],
    ["solve", "--bogus"],
    ["solve", "--potential", "sine2", "--mu", "abc"],
    ["exact", "--potential", "sine2", "--mu", "1"],
    ["verify", "/nonexistent/run.json"],
])
def test_configuration_errors_exit_1(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == cli.EXIT_CONFIG


def test_config_file_and_flag_precedence(capsys, tmp_path):
    path = tmp_path / "p.toml"
    path.write_text('potential = "sine2"\nmu = 5\nlevels = 2\n')
    code, data = run_json(capsys, "solve", "--config", str(path), "--digits", "8")
    assert code == 0 and data["config"]["params"]["mu"] == "5"
    assert data["rows"][0]["energy"].startswith("2.0829852")
    code, data = run_json(capsys, "solve", "--config", str(path), "--mu", "1", "--digits", "8")
    assert data["config"]["params"]["mu"] == "1" and len(data["rows"]) == 2
    path.write_text("wibble = 1\n")
    assert run(capsys, "solve", "--config", str(path))[0] == cli.EXIT_CONFIG


def test_precision_from_environment():
    env = dict(os.environ, AIMTRIG_PRECISION="30")
    out = subprocess.run([sys.executable, "-m", "aimtrig", "solve", "--mu", "0", "--levels", "1", "--digits", "15",
                          "--format", "json"], env=env, capture_output=True, text=True, check=True).stdout
    assert json.loads(out)["config"]["precision"] == 30


def test_mu_list_keeps_input_order(capsys):
    code, data = run_json(capsys, "solve", "--mu-list", "0.5,0.1", "--levels", "1", "--digits", "8", "--workers", "2")
    assert code == 0
    assert [r["mu"] for r in data["rows"]] == ["0.5", "0.1"]
    assert data["rows"][1]["energy"].startswith("1.02492211")


def test_perturb_coefficients(capsys):
    code, data = run_json(capsys, "perturb", "--level", "0", "--order", "4", "--eval-mu", "0.1")
    assert code == 0
    assert [r["nu"] for r in data["rows"]] == ["1", "1/4", "-1/128", "1/4096", "-1/393216"]
    assert data["partial_sums"][0]["decimal"] == "1.0249221189"
    code, data = run_json(capsys, "perturb", "--level", "0", "--order", "0")
    assert [r["nu"] for r in data["rows"]] == ["1"]


def test_perturb_ambiguity_exit_code(capsys, monkeypatch):
    def boom(*a, **k):
        raise AmbiguityError("two roots")

    monkeypatch.setattr(cli, "perturbation_series", boom)
    code, _, err = run(capsys, "perturb", "--level", "0", "--order", "2")
    assert code == cli.EXIT_AMBIGUOUS and "two roots" in err


def test_perturb_rejects_other_potentials(capsys):
    assert run(capsys, "perturb", "--potential", "double_cosine")[0] == cli.EXIT_CONFIG


def test_exact_tan2(capsys):
    for flag, value in (("--alpha", "1/2"), ("--mu", "2")):
        code, data = run_json(capsys, "exact", "--potential", "tan2", flag, value, "--levels", "4")
        assert code == 0
        assert [r["energy"] for r in data["rows"]] == ["2", "7", "14", "23"]
        assert all(r["certified"] for r in data["rows"])


def test_exact_cotangent(capsys):
    code, data = run_json(capsys, "exact", "--potential", "cot_complex", "--v", "2", "--levels", "3")
    energies = [Fraction(r["energy"]) for r in data["rows"]]
    assert energies == [Fraction((n + 1) ** 2) + Fraction(1, (n + 1) ** 2) for n in range(3)]


def test_exact_double_cosine(capsys):
    code, data = run_json(capsys, "exact", "--potential", "double_cosine", "--v1", "1")
    row = data["rows"][0]
    assert (row["v2"], row["E0"], row["certified"]) == ("-1/8", "-3/8", True)


def test_table_2(capsys):
    code, data = run_json(capsys, "table", "2")
    assert code == 0 and len(data["rows"]) == 9
    assert all(r["match"] for r in data["rows"])


def test_wavefunction_columns(capsys):
    code, out, _ = run(capsys, "wavefunction", "--mu", "1", "--level", "0", "--perturb-order", "1",
                       "--samples", "9", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 7
    for r in rows:
        y = float(r["y"])
        assert abs(float(r["factor_1"]) - math.exp(-y * y / 8)) < 1e-12
