import io
import json
import subprocess
import sys

import numpy as np
import pytest

from fedgame.cli import main
from fedgame.generators import gen_matching_k4
from fedgame.model import dumps_instance


def run_cli(args, stdin=""):
    proc = subprocess.run([sys.executable, "-m", "fedgame", *args], input=stdin, capture_output=True, text=True)
    return proc.returncode, proc.stdout, proc.stderr


def call(monkeypatch, capsys, args, stdin=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def gen(monkeypatch, capsys, *args):
    code, out, _ = call(monkeypatch, capsys, ["gen", *args])
    assert code == 0
    return out


def test_flower_stable_eq_pipeline(monkeypatch, capsys):
    instance = gen(monkeypatch, capsys, "flower", "--b", "4", "--variant", "linear")
    code, out, _ = call(monkeypatch, capsys, ["solve", "--objective", "stable-eq"], instance)
    report = json.loads(out)
    assert code == 0 and report["cost"] == pytest.approx(8 / 3) and report["verified_stable"]


def test_pac_cycle_search(monkeypatch, capsys):
    instance = gen(monkeypatch, capsys, "pac-cycle", "--d", "1")
    code, out, err = call(monkeypatch, capsys, ["verify", "--search-equilibria"], instance)
    assert code == 0
    assert json.loads(out)["summary"] == "no stable equilibrium; 4 feasible points"
    assert "no stable equilibrium; 4 feasible points" in err


def test_dominant_price(monkeypatch, capsys):
    instance = gen(monkeypatch, capsys, "random-psd", "--k", "6", "--seed", "7", "--diag-dominant")
    code, out, _ = call(monkeypatch, capsys, ["price", "--which", "pos"], instance)
    assert code == 0 and json.loads(out)["summary"] == "pos ratio 1.000000"


def test_eval_reproduces_solver_utilities(monkeypatch, capsys):
    instance = gen(monkeypatch, capsys, "random-psd", "--k", "5", "--seed", "2")
    _, out, _ = call(monkeypatch, capsys, ["solve", "--objective", "social"], instance)
    report = json.loads(out)
    theta = ",".join(repr(x) for x in report["theta"])
    _, out, _ = call(monkeypatch, capsys, ["eval", "--theta", theta], instance)
    assert np.allclose(json.loads(out)["utilities"], report["utilities"], atol=1e-9, rtol=0)


def test_verify_theta(monkeypatch, capsys):
    instance = gen(monkeypatch, capsys, "matching")
    theta = "0.9,0.1,0.9,0.1,0,0"
    _, out, _ = call(monkeypatch, capsys, ["verify", "--theta", theta, "--envy-free"], instance)
    verdict = json.loads(out)
    assert verdict["feasible"] and verdict["envy_free"] is False and verdict["stable"] is None


def test_solve_envy_free_and_best_response(monkeypatch, capsys):
    instance = gen(monkeypatch, capsys, "flower", "--b", "4")
    _, out, _ = call(monkeypatch, capsys, ["solve", "--objective", "envy-free"], instance)
    assert json.loads(out)["verified_envy_free"]
    _, out, _ = call(monkeypatch, capsys, ["solve", "--objective", "best-response"], instance)
    assert json.loads(out)["method"] == "best-response"


def test_no_equilibrium_price_serializes_null(monkeypatch, capsys):
    instance = gen(monkeypatch, capsys, "pac-cycle", "--d", "1")
    code, out, _ = call(monkeypatch, capsys, ["price", "--which", "pos"], instance)
    assert code == 0 and json.loads(out)["ratio"] is None


def test_simulate_and_defect_outputs(monkeypatch, capsys, tmp_path):
    instance = gen(monkeypatch, capsys, "easy-hard")
    fig = tmp_path / "trace.png"
    code, out, _ = call(monkeypatch, capsys, ["simulate", "--alg", "fedavg", "--rounds", "4", "--figure", str(fig)],
                        instance)
    assert code == 0 and out.splitlines()[0].startswith("round,agent") and fig.stat().st_size > 0
    code, out, _ = call(monkeypatch, capsys, ["defect", "--trials", "100", "--json"], instance)
    curves = json.loads(out)
    assert set(curves) == {"fedavg", "mwfed"}


def test_output_file(monkeypatch, capsys, tmp_path):
    target = tmp_path / "inst.json"
    code, out, _ = call(monkeypatch, capsys, ["gen", "matching", "--out", str(target)])
    assert code == 0 and out == "" and json.loads(target.read_text())["mu"][0] == 0.6
    code, out, _ = call(monkeypatch, capsys, ["eval", "--instance", str(target), "--theta", "1,0,1,0,0,0"])
    assert code == 0 and json.loads(out)["feasible"]


def test_scaling_table(monkeypatch, capsys, tmp_path):
    code, out, _ = call(monkeypatch, capsys, ["scaling", "--b", "4,9", "--figure", str(tmp_path / "s.svg")])
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("b,k,opt") and len(lines) == 3


@pytest.mark.parametrize("args,stdin,fragment", [
    (["eval", "--theta", "1"], "{bad", "line 1"),
    (["eval", "--theta", "1,2,3"], dumps_instance(gen_matching_k4()), "6 agents"),
    (["eval", "--theta", "a,b"], dumps_instance(gen_matching_k4()), "comma-separated"),
    (["eval", "--theta", "1"], "{}", "missing field"),
    (["gen", "flower", "--b", "5"], None, "perfect square"),
    (["eval", "--instance", "/nonexistent.json", "--theta", "1"], None, "cannot read"),
])
def test_validation_errors_exit_2(monkeypatch, capsys, args, stdin, fragment):
    code, _, err = call(monkeypatch, capsys, args, stdin)
    assert code == 2 and fragment in err


def test_solver_failure_exit_3(monkeypatch, capsys):
    from fedgame import cli
    from fedgame.solvers import SolverError

    def boom(instance):
        raise SolverError("forced")

    monkeypatch.setattr(cli, "social_opt", boom)
    instance = gen(monkeypatch, capsys, "matching")
    code, _, err = call(monkeypatch, capsys, ["solve", "--objective", "social"], instance)
    assert code == 3 and "forced" in err


def test_subprocess_pipeline_is_byte_identical():
    _, inst, _ = run_cli(["gen", "random-psd", "--k", "4", "--seed", "9"])
    first = run_cli(["--threads", "1", "defect", "--trials", "50", "--seed", "4"], inst)
    second = run_cli(["--threads", "3", "defect", "--trials", "50", "--seed", "4"], inst)
    assert first[0] == 0 and first[1] == second[1]


def test_bad_subcommand_exit_2():
    code, _, _ = run_cli(["frobnicate"])
    assert code == 2
