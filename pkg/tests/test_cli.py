import csv
import io
import json
import subprocess
import sys

import pytest

from ugc_platforms.allocation import iterate_to_fixed_point
from ugc_platforms.cli import main
from ugc_platforms.equilibrium import EquilibriumSet, solve_equilibria
from ugc_platforms.game import GameSolution
from ugc_platforms.model import AdProfile, ModelParams


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_equilibria_json(capsys):
    code, out, _ = run(capsys, "equilibria", "--lambda", "0.1", "--a1", "0", "--a2", "0")
    assert code == 0
    blob = json.loads(out)
    assert len(blob["equilibria"]) == 6
    assert blob["selected"]["share1"] == pytest.approx(0.9436492, abs=5e-8)
    expected = solve_equilibria(ModelParams(0.1), AdProfile(0.0, 0.0))
    assert EquilibriumSet.from_dict(blob) == expected


def test_equilibria_tipping(capsys):
    code, out, _ = run(capsys, "equilibria", "--lambda", "0.1", "--a1", "0.2", "--a2", "0")
    sel = json.loads(out)["selected"]
    assert code == 0 and sel["kind"] == "boundary" and sel["share1"] == 0.0


def test_equilibria_csv_marks_selection(capsys):
    code, out, _ = run(capsys, "equilibria", "--format", "csv")
    table = rows(out)
    assert code == 0 and len(table) == 6
    assert [r["selected"] for r in table].count("true") == 1


@pytest.mark.parametrize(
    "argv",
    [
        ("equilibria", "--lambda", "0.3"),
        ("equilibria", "--a1", "-1"),
        ("dynamics", "--start-share", "0.5"),
        ("montecarlo", "--n-agents", "1"),
        ("best-response", "--mover", "3"),
    ],
)
def test_validation_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    assert json.loads(err)["error"] == "validation"


def test_nash_check_tripwire_exit_3(capsys):
    code, out, err = run(capsys, "nash-check", "--lambda", "0.1")
    assert code == 3 and out == ""
    blob = json.loads(err)
    assert blob["error"] == "internal_inconsistency"
    sol = GameSolution.from_dict(blob["solution"])
    assert (sol.a1_star, sol.a2_star) == (pytest.approx(0.075), 0.0)
    assert sol.verification["p1_deviation_gap"] < -1e-9


def test_stackelberg_reports_gaps(capsys):
    code, out, _ = run(capsys, "stackelberg", "--lambda", "0.1")
    blob = json.loads(out)
    assert code == 0
    assert blob["a1"] == pytest.approx(0.075) and blob["a2"] == 0.0
    assert blob["verification"]["p1_deviation_gap"] < 0


def test_best_response(capsys):
    code, out, _ = run(capsys, "best-response", "--mover", "2", "--a1", "0.075")
    blob = json.loads(out)
    assert code == 0 and blob["ad"] == pytest.approx(1 / 18, abs=1e-12) and blob["attained"] is True


def test_dynamics_csv_full_precision(capsys):
    code, out, _ = run(capsys, "dynamics", "--start-share", "0.99", "--format", "csv")
    trace = iterate_to_fixed_point(ModelParams(0.1), AdProfile(0.0, 0.0), 0.99)
    table = rows(out)
    assert code == 0 and len(table) == len(trace.shares)
    for row, share in zip(table, trace.shares):
        assert row["share1"] == format(share, ".17g")
        assert float(row["share1"]) == share


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# test config\nlambda = 0.2\na1 = 0.05  # overridden\nfocal = 2\n")
    code, out, _ = run(capsys, "equilibria", "--config", str(cfg), "--a1", "0.01")
    blob = json.loads(out)
    assert code == 0
    assert blob["params"]["lambda"] == 0.2
    assert blob["ads"]["a1"] == 0.01 and blob["ads"]["a2"] == 0.0
    assert blob == solve_equilibria(ModelParams(0.2), AdProfile(0.01, 0.0), focal=2).to_dict()


@pytest.mark.parametrize("text", ["bogus = 1\n", "lambda 0.1\n", "seed = x\n"])
def test_bad_config_exit_2(tmp_path, capsys, text):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(text)
    code, _, err = run(capsys, "equilibria", "--config", str(cfg))
    assert code == 2 and json.loads(err)["error"] == "validation"


def test_missing_config_exit_2(tmp_path, capsys):
    code, _, _ = run(capsys, "equilibria", "--config", str(tmp_path / "absent.cfg"))
    assert code == 2


def test_montecarlo_byte_identical(tmp_path, capsys):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        code, out, _ = run(capsys, "montecarlo", "--n-agents", "5000", "--seed", "3", "--format", "csv", "--out", str(p))
        assert code == 0 and out == ""
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert paths[0].read_text().splitlines()[0] == "round,share1,Q1,Q2,switches"


def test_montecarlo_json(capsys):
    code, out, _ = run(capsys, "montecarlo", "--n-agents", "20000", "--seed", "1")
    blob = json.loads(out)
    assert code == 0 and blob["converged"] and abs(blob["final_share1"] - 0.9436) < 0.02


def test_figure_csv_and_dashed_gap(capsys):
    code, out, _ = run(capsys, "figure", "--lambda", "0.25", "--format", "csv")
    table = rows(out)
    assert code == 0 and len(table) == 999
    for r in table:
        assert float(r["y_red_dashed"]) - float(r["y_blue_dashed"]) == 0.25
        b = float(r["beta_tilde"])
        assert float(r["f_red"]) == pytest.approx((1 - 2 * b) * b, abs=1e-16)


def test_figure_json_intersections(capsys):
    code, out, _ = run(capsys, "figure", "--lambda", "0.1")
    blob = json.loads(out)
    assert code == 0
    assert blob["red_intersections"] == pytest.approx([0.0563508, 0.4436492], abs=5e-8)
    assert max(r[1] for r in blob["rows"]) == pytest.approx(1 / 8, abs=1e-15)


def test_figure_rejects_nonpositive_lambda(capsys):
    assert run(capsys, "figure", "--lambda", "0")[0] == 2


def test_undercut_demo(capsys):
    code, out, _ = run(capsys, "undercut-demo", "--lambda", "0.1", "--a1", "0.3", "--a2", "0.3", "--format", "csv")
    table = rows(out)
    assert code == 0
    assert (float(table[-1]["a1"]), float(table[-1]["a2"])) == (pytest.approx(0.075, abs=1e-4), 0.0)


def test_undercut_demo_fixed_point(capsys):
    code, out, _ = run(capsys, "undercut-demo", "--lambda", "0.1", "--a1", "0.075", "--a2", "0")
    assert code == 0 and json.loads(out)["rounds"] == 0


def test_sweep_parallel_matches_serial(tmp_path, capsys):
    args = ("sweep", "--axis", "a1", "--min", "0", "--max", "0.2", "--steps", "41", "--format", "csv")
    serial, parallel = tmp_path / "s.csv", tmp_path / "p.csv"
    assert run(capsys, *args, "--out", str(serial))[0] == 0
    assert run(capsys, *args, "--workers", "3", "--out", str(parallel))[0] == 0
    assert serial.read_bytes() == parallel.read_bytes()
    table = rows(serial.read_text())
    assert [int(r["cell"]) for r in table] == list(range(41))


def test_sweep_lambda_axis_json(capsys):
    code, out, _ = run(capsys, "sweep", "--axis", "lambda", "--min", "0.05", "--max", "0.2", "--steps", "4")
    blob = json.loads(out)
    assert code == 0 and len(blob["rows"]) == 4 and blob["axis"] == "lambda"


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "ugc_platforms", "equilibria", "--lambda", "0.3"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2
    assert json.loads(proc.stderr)["error"] == "validation"
