import json
import shutil
import subprocess
import sys

import pytest

from momentkit import __version__
from momentkit.cli import main, run
from momentkit.poly import ConstraintSet, motzkin, variables

x1, x2 = variables(2)
BALL = json.dumps(ConstraintSet(2, (2 - x1 * x1 - x2 * x2,)).to_json())
SQUARE = json.dumps(((x1 - 1) ** 2 + x2 * x2).to_json())

LACUNARY_L = "[3,6,18,32,66,128,258]"

CASES = [
    (["check-hamburger", "--s", "[1,0,1,0,1]"], 0),
    (["check-hamburger", "--s", "[1,0,-1]"], 1),
    (["check-stieltjes", "--s", "[1,-1,1,-1,1]"], 1),
    (["check-hausdorff", "--s", "[1,0.5,0.3333333333333333,0.25,0.2]", "--N", "2"], 0),
    (["check-interval", "--s", "[1,0,1]", "--a", "-0.5", "--b", "0.5"], 1),
    (["classify-boundary", "--s", "[1,1,1]", "--a", "0", "--b", "1"], 0),
    (["principal", "--s", "[1,0.5,0.3333333333333333]", "--a", "0", "--b", "1"], 0),
    (["principal", "--s", "[1,1,1]", "--a", "0", "--b", "1"], 3),
    (["canonical", "--s", "[1,0.5,0.3333333333333333]", "--a", "0", "--b", "1", "--xi", "0.5"], 0),
    (["carleman", "--builtin", "gaussian"], 0),
    (["carleman", "--builtin", "lognormal"], 2),
    (["krein", "--density", "exp_abs_alpha", "--alpha", "0.5"], 1),
    (["krein", "--density", "gaussian"], 2),
    (["carleman-mv", "--axes", "gaussian,lognormal"], 2),
    (["sos", "--poly", "motzkin", "--level", "3"], 1),
    (["sos", "--poly", SQUARE, "--level", "1"], 0),
    (["archimedean", "--constraints", BALL, "--lam", "2", "--level", "1"], 0),
    (["extract-atoms", "--s", "[1,1,1,1,1]", "--n", "2"], 0),
    (["core-variety", "--L", LACUNARY_L, "--exponents", "[0,2,4,5,6,7,8]"], 0),
    (["cone-member", "--v", "[-1,-0.5,-0.25]", "--points", "[0.5,1]", "--basis", "[[0],[1],[2]]"], 1),
    (["no-such-command"], 3),
    (["check-hamburger"], 3),
    (["check-hamburger", "--s", "[1,0,"], 64),
]


@pytest.mark.parametrize("argv,code", CASES, ids=[" ".join(c[0][:1]) + f"-{i}" for i, c in enumerate(CASES)])
def test_exit_codes(argv, code, capsys):
    assert main(argv) == code


def test_sdp_solve_file(tmp_path, capsys):
    # min y s.t. y >= 1
    f = tmp_path / "p.sdpa"
    f.write_text("1\n1\n1\n1.0\n0 1 1 1 -1.0\n1 1 1 1 1.0\n")
    code, rep = run(["sdp-solve", "--problem", str(f)])
    assert code == 0 and abs(rep["result"]["primal_obj"] - 1.0) < 1e-7


def test_core_variety_report(capsys):
    code, rep = run(["core-variety", "--L", LACUNARY_L, "--exponents", "[0,2,4,5,6,7,8]"])
    assert code == 0
    assert rep["result"]["existence"]["trace"]["k"] == 2
    assert rep["result"]["determinacy"]["verdict"] == "determinate"


def test_check_interval_report(capsys):
    code, rep = run(["check-interval", "--s", "[1,0,1]", "--a", "-1", "--b", "1"])
    assert code == 0 and rep["exit_code"] == 0
    certs = {c["matrix"]: c["min_eig"] for c in rep["result"]["certificates"]}
    assert certs["upper"] == 0.0
    assert rep["version"] == __version__
    assert "sha256" in rep["inputs"]["s"] and rep["tolerances"]


def test_minimize_motzkin_ball(tmp_path, capsys):
    poly = tmp_path / "motzkin.json"
    poly.write_text(json.dumps(motzkin().to_json()))
    ball = tmp_path / "ball2.json"
    ball.write_text(BALL)
    code, rep = run(["minimize", "--poly", str(poly), "--constraints", str(ball), "--levels", "3:5"])
    assert code == 0
    levels = rep["result"]["levels"]
    assert [l["n"] for l in levels] == [3, 4, 5]
    assert all(abs(l["p_mom"]) < 1e-6 for l in levels)
    assert all(set(l) >= {"n", "p_mom", "p_sos", "flat", "atoms"} for l in levels)


def test_out_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["check-hamburger", "--s", "[1,0,1]", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["verdict"] == "yes"
    assert "exit 0" in capsys.readouterr().err


def _cli():
    exe = shutil.which("momentkit")
    return [exe] if exe else [sys.executable, "-m", "momentkit.cli"]


@pytest.mark.parametrize("argv", [
    ["minimize", "--poly", "motzkin", "--constraints", BALL, "--levels", "3:4", "--seed", "5"],
    ["extract-atoms", "--s", "[1,0,1,0,1]", "--n", "2", "--seed", "5"],
    ["core-variety", "--L", LACUNARY_L, "--exponents", "[0,2,4,5,6,7,8]"],
])
def test_byte_identical(argv):
    a = subprocess.run(_cli() + argv, capture_output=True, check=False)
    b = subprocess.run(_cli() + argv, capture_output=True, check=False)
    assert a.returncode == b.returncode and a.returncode <= 2
    assert a.stdout == b.stdout and a.stdout


def test_jobs_do_not_change_report(capsys):
    args = ["minimize", "--poly", "motzkin", "--constraints", BALL, "--levels", "3:4"]
    _, r1 = run(args)
    _, r2 = run(args + ["--jobs", "2"])
    r1.pop("inputs"), r2.pop("inputs")
    assert json.dumps(r1, sort_keys=True) == json.dumps(r2, sort_keys=True)
