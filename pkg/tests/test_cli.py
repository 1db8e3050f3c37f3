import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from uqsd.cli import main
from uqsd.optimize import cmean_d2, success_d2
from uqsd.states import Ensemble, ensemble_to_json


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def write_ensemble(tmp_path, name, priors, states):
    path = tmp_path / name
    path.write_text(json.dumps(ensemble_to_json(Ensemble(priors, states))), encoding="utf-8")
    return str(path)


@pytest.fixture
def orth(tmp_path):
    return write_ensemble(tmp_path, "orth.json", [0.5, 0.5], np.eye(2))


def test_optimize_inline(capsys):
    code, out = run(capsys, "optimize", "--gamma", "0.5", "--p1", "0.5")
    rec = json.loads(out)
    assert code == 0 and rec["p_s"] == 0.5 and rec["c_mean"] == 0.5


def test_optimize_orthogonal_file(capsys, orth):
    code, out = run(capsys, "optimize", "--ensemble", orth)
    assert code == 0 and json.loads(out)["p_s"] == 1


def test_optimize_qudit_file(capsys, tmp_path):
    g = np.full((3, 3), 0.5)
    np.fill_diagonal(g, 1)
    w, v = np.linalg.eigh(g)
    path = write_ensemble(tmp_path, "sym.json", [1 / 3] * 3, ((v * np.sqrt(w)) @ v.T).T)
    code, out = run(capsys, "optimize", "--ensemble", path)
    rec = json.loads(out)
    assert code == 0 and rec["method"] == "condition-based"
    assert rec["p_s"] == pytest.approx(0.5, abs=1e-11) and rec["c_mean"] == pytest.approx(0.5, abs=1e-11)


@pytest.mark.parametrize("argv", [
    ["optimize", "--gamma", "1.1", "--p1", "0.5"],
    ["optimize"],
    ["optimize", "--gamma", "0.5", "--p1", "1.5"],
    ["figure", "--which", "4"],
    ["figure", "--which", "3"],
    ["certify", "--gamma", "0.5", "--measured", "0.7", "0.1"],
    ["certify", "--gamma", "0.5", "--measured", "0.7"],
    ["simulate", "--gamma", "0.5", "--trials", "0"],
    ["simulate", "--gamma", "0.5", "--x", "0.1"],
    ["optimize", "--ensemble", "/nonexistent/e.json"],
])
def test_invalid_input_exit_code(capsys, argv):
    assert main(argv) == 2


def test_bad_flag_type_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["optimize", "--gamma", "abc"])
    assert exc.value.code == 2


def test_dependent_ensemble_exit_3(capsys, tmp_path):
    psi = np.array([0.6, 0.8])
    path = write_ensemble(tmp_path, "dep.json", [0.5, 0.5], [psi, psi])
    assert main(["simulate", "--ensemble", path, "--trials", "10"]) == 3


def test_infeasible_qudit_exit_3(capsys, tmp_path):
    g = np.array([[1, 0.3, 0.5], [0.3, 1, 0.2], [0.5, 0.2, 1]])
    w, v = np.linalg.eigh(g)
    path = write_ensemble(tmp_path, "skew.json", [0.25, 0.25, 0.5], ((v * np.sqrt(w)) @ v.T).T)
    assert main(["optimize", "--ensemble", path]) == 3
    assert main(["simulate", "--ensemble", path, "--trials", "10"]) == 3


def parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_figure2_rows(capsys):
    code, out = run(capsys, "figure", "--which", "2", "--points", "11")
    rows = parse_csv(out)
    assert code == 0 and len(rows) == 11
    mid = rows[5]
    assert (float(mid["x"]), float(mid["success"]), float(mid["coherence"])) == (0.5, 0.5, 0.25)


def test_figure3_rows(capsys):
    code, out = run(capsys, "figure", "--which", "3", "--gamma", "0.6")
    rows = parse_csv(out)
    xs = [float(r["x"]) for r in rows]
    assert code == 0 and all(np.diff(xs) > 0)
    row = next(r for r in rows if float(r["x"]) == 0.6)
    assert float(row["p_s"]) == pytest.approx(0.4, abs=1e-12)
    assert float(row["c_mean"]) == pytest.approx(0.48, abs=1e-12)


def test_figure3_quarter_peak(capsys):
    _, out = run(capsys, "figure", "--which", "3", "--gamma", "0.25")
    rows = parse_csv(out)
    best = max(rows, key=lambda r: float(r["c_mean"]))
    assert float(best["x"]) == 0.25


def test_csv_round_trip(capsys, tmp_path):
    out = tmp_path / "fig.csv"
    assert main(["figure", "--which", "3", "--gamma", "0.3+0.4j", "--points", "50", "--out", str(out)]) == 0
    rows = parse_csv(out.read_text(encoding="utf-8"))
    for r in rows:
        x = float(r["x"])
        assert float(r["p_s"]) == pytest.approx(float(success_d2(x, 0.5, 0.5, 0.5)), rel=1e-11)
        assert float(r["c_mean"]) == pytest.approx(float(cmean_d2(x, 0.5, 0.5, 0.5)), rel=1e-11, abs=1e-12)


def test_simulate_reproducible(capsys, tmp_path):
    args = ["simulate", "--gamma", "0.5", "--x", "0.5", "--trials", "100000", "--seed", "42"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rec = json.loads(a.read_text(encoding="utf-8"))
    assert rec["errors"] == 0 and rec["ci_low"] <= 0.5 <= rec["ci_high"]


def test_simulate_orthogonal(capsys, orth):
    code, out = run(capsys, "simulate", "--ensemble", orth, "--trials", "1000")
    assert code == 0 and json.loads(out)["successes"] == 1000


def test_simulate_li_csv(capsys):
    code, out = run(capsys, "simulate", "--gamma", "0.4", "--protocol", "li", "--trials", "2000",
                    "--format", "csv")
    row = parse_csv(out)[0]
    assert code == 0 and row["errors"] == "0" and row["unambiguous"] == "true"


def test_certify(capsys):
    code, out = run(capsys, "certify", "--gamma", "0.5", "--measured", "0.5", "0.5")
    assert code == 0 and json.loads(out)["optimal"] is True
    code, out = run(capsys, "certify", "--gamma", "0.5", "--measured", "0.4", "0.5")
    rec = json.loads(out)
    assert rec["optimal"] is False and rec["deviation1"] == pytest.approx(-0.1, abs=1e-12)


def test_coherence_report(capsys):
    code, out = run(capsys, "coherence", "--gamma", "0.4", "--p1", "0.25")
    rec = json.loads(out)
    assert code == 0
    assert rec["coherence_1"] == pytest.approx(0.42564, abs=1e-5)
    assert rec["coherence_2"] == pytest.approx(0.35521, abs=1e-5)
    assert rec["c_mean"] == pytest.approx(rec["c_mean_closed_form"], abs=1e-10)
    assert rec["lower_bound_holds"] is True


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "uqsd", "optimize", "--gamma", "0.5"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and json.loads(res.stdout)["p_s"] == 0.5
    res = subprocess.run([sys.executable, "-m", "uqsd", "optimize", "--gamma", "1.1"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 2 and "invalid input" in res.stderr
