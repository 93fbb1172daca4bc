import json
import math
import subprocess
import sys

import numpy as np
import pytest

from carnot_heat.cli import cmd_barrier, cmd_compare, cmd_solve, cmd_verify_identities, main
from carnot_heat.config import load_config, parse_config
from carnot_heat.errors import ConfigError
from carnot_heat.grid import Grid, GridFunction, write_csv

SMALL = """
problem.n_cells = 32
problem.T = 0.05
solver.output_stride = 50
"""

HEAT = """
problem.n_cells = 128
problem.T = 0.1
problem.gamma = 0
problem.alpha = 0
solver.output_stride = 100000
"""

BLOWUP = """
problem.n_cells = 32
problem.q = 5
problem.beta = 1
problem.alpha = 50
problem.u0 = bump
problem.u0_amplitude = 5
problem.T = 1
"""

H1_VIOLATION = """
problem.group = heisenberg:1
problem.lower = 0, 0, -1
problem.upper = 1, 1, 1
problem.n_cells = 8
problem.p = 2.5
problem.q = 2.5
problem.beta = 3
problem.T = 0.05
problem.u0 = bump
"""


def write(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return path


def load(path):
    return json.loads(path.read_text())


def test_parse_config_defaults_and_echo():
    rc = parse_config("problem.p = 2.5  # comment\n\n# only a comment\nproblem.lower = 0, 0, -1\n")
    assert rc["problem.p"] == 2.5 and rc["problem.lower"] == (0.0, 0.0, -1.0)
    assert rc["problem.q"] == 2.0
    assert rc.echo == {"problem.p": "2.5", "problem.lower": "0, 0, -1"}
    assert load_config(None)["problem.group"] == "euclidean:1"


@pytest.mark.parametrize(
    "text,field",
    [
        ("problem.nope = 1", "problem.nope"),
        ("problem.p = two", "problem.p"),
        ("problem.p = 2\nproblem.p = 3", "problem.p"),
        ("output.emit_plots = maybe", "output.emit_plots"),
    ],
)
def test_parse_config_errors_name_the_field(text, field):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.field == field
    with pytest.raises(ConfigError):
        parse_config("just words")


def test_solve_zero_data(tmp_path):
    cfg = write(tmp_path, SMALL + "problem.u0 = 0\n")
    assert cmd_solve(cfg, tmp_path / "out") == 0
    man = load(tmp_path / "out" / "manifest.json")
    assert man["schema_version"] == 1 and man["status"] == "complete"
    assert all(s == 0 for s in man["sup_norm"])
    assert (tmp_path / "out" / "series.csv").exists()
    assert len(list((tmp_path / "out" / "fields").glob("u_*.csv"))) == len(man["fields"])


def test_solve_heat_benchmark(tmp_path):
    cfg = write(tmp_path, HEAT + "output.emit_plots = true\n")
    assert cmd_solve(cfg, tmp_path / "out") == 0
    man = load(tmp_path / "out" / "manifest.json")
    assert man["times"][-1] == 0.1
    assert man["sup_norm"][-1] / man["sup_norm"][0] == pytest.approx(math.exp(-(math.pi**2) * 0.1), rel=0.01)
    assert (tmp_path / "out" / "sup_norm.svg").read_text().startswith("<svg")
    assert man["config"]["problem.T"] == "0.1"


def test_solve_blowup_exit_2(tmp_path, capsys):
    cfg = write(tmp_path, BLOWUP)
    assert cmd_solve(cfg, tmp_path / "out") == 2
    man = load(tmp_path / "out" / "manifest.json")
    assert man["status"] == "blowup" and man["blowup_time"] > 0
    assert "blowup" in capsys.readouterr().err


def test_solve_step_budget_exit_2(tmp_path):
    cfg = write(tmp_path, SMALL + "solver.max_steps = 5\n")
    assert cmd_solve(cfg, tmp_path / "out") == 2
    assert load(tmp_path / "out" / "manifest.json")["status"] == "max_steps"


@pytest.mark.parametrize(
    "text",
    ["problem.p = 0.5", "problem.bogus = 1", "problem.u0 = wobbly", "problem.u0 = csv:missing.csv",
     "problem.group = heisenberg:1", "solver.cfl_safety = 2"],
)
def test_solve_config_errors_exit_1(tmp_path, capsys, text):
    cfg = write(tmp_path, SMALL + text + "\n")
    assert cmd_solve(cfg, tmp_path / "out") == 1
    assert "error" in capsys.readouterr().err


def test_missing_config_file_exit_1(tmp_path, capsys):
    assert cmd_solve(tmp_path / "absent.cfg", tmp_path / "out") == 1
    assert "[config]" in capsys.readouterr().err


def test_bad_flags_exit_1(tmp_path):
    cfg = write(tmp_path, SMALL)
    assert cmd_solve(cfg, tmp_path / "out", refine=-1) == 1
    assert cmd_solve(cfg, tmp_path / "out", seed=-1) == 1


def test_csv_initial_data(tmp_path):
    grid = Grid.uniform([0], [1], 32)
    write_csv(GridFunction(grid, np.full(32, 0.25)), tmp_path / "u0.csv")
    cfg = write(tmp_path, SMALL + "problem.u0 = csv:u0.csv\n")
    assert cmd_solve(cfg, tmp_path / "out") == 0
    assert load(tmp_path / "out" / "manifest.json")["sup_norm"][0] == 0.25


def test_refine_halves_h(tmp_path):
    cfg = write(tmp_path, SMALL)
    assert cmd_solve(cfg, tmp_path / "out", refine=1) == 0
    assert load(tmp_path / "out" / "manifest.json")["spec"]["n_cells"] == [64]


def test_determinism(tmp_path):
    cfg = write(tmp_path, SMALL + "problem.u0 = random\n")
    assert cmd_solve(cfg, tmp_path / "a", seed=7) == 0
    assert cmd_solve(cfg, tmp_path / "b", seed=7) == 0
    assert (tmp_path / "a" / "manifest.json").read_bytes() == (tmp_path / "b" / "manifest.json").read_bytes()
    assert cmd_solve(cfg, tmp_path / "c", seed=8) == 0
    assert (tmp_path / "a" / "manifest.json").read_bytes() != (tmp_path / "c" / "manifest.json").read_bytes()


def test_compare_exit_codes(tmp_path):
    cfg = write(tmp_path, SMALL)
    assert cmd_compare(cfg, 0.5, tmp_path / "half") == 0
    rep = load(tmp_path / "half" / "compare.json")
    assert rep["ordered"] and rep["max_violation"] == 0
    assert rep["gronwall_report"]["conclusion_ok"]
    assert cmd_compare(cfg, 1.0, tmp_path / "one") == 0
    assert load(tmp_path / "one" / "compare.json")["max_violation"] == 0
    assert cmd_compare(cfg, 1.5, tmp_path / "over") == 1
    assert cmd_compare(cfg, 0.0, tmp_path / "zero") == 1


def test_compare_violation_exit_3(tmp_path):
    # the degenerate mixed stencil on H^1 is not monotone: a coarse grid shows it
    cfg = write(tmp_path, H1_VIOLATION)
    assert cmd_compare(cfg, 0.3, tmp_path / "out") == 3
    rep = load(tmp_path / "out" / "compare.json")
    assert not rep["ordered"] and rep["max_violation"] > rep["tolerance"]


def test_barrier_exit_codes(tmp_path, capsys):
    cfg = write(tmp_path, "problem.n_cells = 32\nproblem.T = 0.2\nproblem.u0_amplitude = 3\n")
    assert cmd_barrier(cfg, tmp_path / "ok") == 0
    rep = load(tmp_path / "ok" / "barrier.json")
    for key in ("sigma", "L", "x0", "r_prime", "global_bound", "inequality_39_min_margin", "mp_min_value"):
        assert key in rep
    assert rep["global_bound"] == pytest.approx(rep["L"] * math.exp(rep["sigma"] * (rep["r_prime"] + 1)))
    assert rep["L"] >= 3 and rep["failed_check"] is None

    cfg = write(tmp_path, "problem.q = 3.5\nproblem.beta = 2.5\n", "hyp.cfg")
    assert cmd_barrier(cfg, tmp_path / "hyp") == 1
    assert "requires p <= q < beta+1" in capsys.readouterr().err

    cfg = write(tmp_path, "problem.n_cells = 32\nsolver.max_steps = 3\n", "steps.cfg")
    assert cmd_barrier(cfg, tmp_path / "steps") == 3
    assert load(tmp_path / "steps" / "barrier.json")["failed_check"] == "solve_completed"


def test_barrier_sigma_branch(tmp_path):
    cfg = write(tmp_path, "problem.n_cells = 32\nproblem.T = 0.1\nproblem.q = 2.5\nproblem.beta = 3\n")
    assert cmd_barrier(cfg, tmp_path / "out") == 0
    rep = load(tmp_path / "out" / "barrier.json")
    assert rep["sigma"] == pytest.approx(1 / (0.5 * (rep["r_prime"] + 1)))


def test_barrier_infeasible_placement_exit_1(tmp_path, capsys):
    cfg = write(tmp_path, "problem.lower = -1\nproblem.upper = 1\nproblem.n_cells = 16\n")
    assert cmd_barrier(cfg, tmp_path / "out") == 1
    assert "upper side" in capsys.readouterr().err


def test_verify_identities(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("CARNOT_HEAT_THREADS", "1")
    cfg = write(tmp_path, "verify.samples = 20000\n")
    assert cmd_verify_identities(cfg, tmp_path / "ok") == 0
    rep = load(tmp_path / "ok" / "identities.json")
    assert rep["passed"] and rep["stencil_exact_match"]
    grad = next(s for s in rep["studies"] if s["identity"] == "gradient")
    assert grad["order"] >= 1.8
    assert "order" in capsys.readouterr().out

    cfg = write(tmp_path, "verify.n_coarse = 4\nverify.samples = 1000\n", "coarse.cfg")
    assert cmd_verify_identities(cfg, tmp_path / "coarse") == 3

    monkeypatch.setenv("CARNOT_HEAT_THREADS", "zero")
    assert cmd_verify_identities(cfg, tmp_path / "env") == 1


def test_main_dispatch(tmp_path):
    cfg = write(tmp_path, SMALL)
    assert main(["solve", "--config", str(cfg), "--out", str(tmp_path / "s")]) == 0
    assert main(["compare", "--config", str(cfg), "--out", str(tmp_path / "c"), "--scale", "0.25"]) == 0
    assert load(tmp_path / "c" / "compare.json")["scale"] == 0.25
    with pytest.raises(SystemExit):
        main(["unknown"])


def test_module_entry_point(tmp_path):
    cfg = write(tmp_path, SMALL)
    res = subprocess.run(
        [sys.executable, "-m", "carnot_heat", "solve", "--config", str(cfg), "--out", str(tmp_path / "o")],
        capture_output=True, text=True,
    )
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "o" / "manifest.json").exists()
