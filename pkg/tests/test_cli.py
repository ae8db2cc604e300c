import json
import os
import subprocess
import sys

import pydot
import pytest

from rcu.cli import main
from rcu.io import data_path

EX1 = str(data_path("example1.json"))
EPS = "1/1000"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def broken_model(tmp_path):
    model = json.loads(data_path("example1.json").read_text())
    coin = model["root"]["edges"][0]["to"]
    coin["edges"][0]["event"] = ["HR", "HB"]  # drops HY
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(model))
    return path


class TestValidate:
    def test_ok(self, capsys):
        code, out, _ = run(capsys, "validate", EX1)
        assert code == 0 and json.loads(out) == {"violations": []}

    def test_partition_violation(self, capsys, broken_model):
        code, out, _ = run(capsys, "validate", broken_model)
        assert code == 2
        violations = json.loads(out)["violations"]
        assert {v["kind"] for v in violations} == {"partition"}
        assert "coin" in {v["node"] for v in violations}

    def test_bad_rational(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"events": ["a"], "capacity": {"masses": [{"set": ["a"], "mass": "1/0"}]},
                                    "root": {"kind": "leaf", "gain": 1}}))
        code, _, err = run(capsys, "validate", path)
        assert code == 3 and "$.capacity.masses[0].mass" in err

    def test_missing_file_and_syntax(self, capsys, tmp_path):
        assert run(capsys, "validate", tmp_path / "none.json")[0] == 3
        path = tmp_path / "syntax.json"
        path.write_text("{\n  oops")
        code, _, err = run(capsys, "validate", path)
        assert code == 3 and "line 2" in err


class TestSolve:
    def test_sophisticated(self, capsys):
        code, out, _ = run(capsys, "solve", EX1, "--method", "sophisticated")
        rep = json.loads(out)
        assert code == 0 and rep["strategy"] == {"choices": {"0": 1}}
        assert rep["root_value"] == "100003/3000"

    def test_resolute_auto(self, capsys):
        code, out, _ = run(capsys, "solve", EX1, "--method", "resolute", "--alphas", "auto", "--seed", 7,
                           "--check-dominance")
        rep = json.loads(out)
        assert code == 0 and rep["strategy"] == {"choices": {"0": 0, "1": 1, "2": 1}}
        assert rep["undominated"] is True

    def test_limited_zero(self, capsys):
        code, out, _ = run(capsys, "solve", EX1, "--method", "resolute-limited", "--epsilon0", "0/1")
        assert code == 0 and json.loads(out)["strategy"] == {"choices": {"0": 0, "1": 0, "2": 0}}

    def test_limited_failure_exit(self, capsys, tmp_path):
        alphas = tmp_path / "alphas.json"
        alphas.write_text(json.dumps({"alphas": [{"HR": "1/2", "TY": "1/2"}, {"HB": "1/2", "TR": "1/2"}]}))
        code, out, _ = run(capsys, "solve", EX1, "--method", "resolute-limited", "--epsilon0", 0,
                           "--alphas", alphas)
        assert code == 4 and json.loads(out)["failure"] is True

    def test_cap_exceeded(self, capsys):
        code, _, err = run(capsys, "solve", EX1, "--method", "justifiable-exact", "--cap", 3)
        assert code == 5 and "5 strategies" in err

    def test_cap_from_environment(self, capsys, monkeypatch):
        monkeypatch.setenv("RCU_STRATEGY_CAP", "2")
        assert run(capsys, "solve", EX1, "--method", "justifiable-exact")[0] == 5

    def test_invalid_model_exit(self, capsys, broken_model):
        assert run(capsys, "solve", broken_model)[0] == 2

    def test_deterministic(self, capsys):
        argv = ["solve", EX1, "--method", "resolute", "--seed", 3, "--count", 40]
        first = run(capsys, *argv)[1]
        assert first == run(capsys, *argv)[1]

    def test_audit(self, capsys, tmp_path):
        from rcu.audits import build_money_pump_gadget
        from rcu.fixtures import example1
        from rcu.io import dumps, model_to_json

        m = example1()
        t, pay = build_money_pump_gadget(m.tree, 1)
        m.tree, m.pay_edges = t, (pay,)
        path = tmp_path / "pump.json"
        path.write_text(dumps(model_to_json(m)))
        code, out, _ = run(capsys, "audit", path, "--method", "justifiable-exact")
        assert code == 0 and json.loads(out) == {"pass": True}
        code, out, _ = run(capsys, "audit", path, "--method", "resolute")
        assert code == 0 and json.loads(out) == {"pass": True}


class TestDot:
    def test_structure(self, capsys):
        code, out, _ = run(capsys, "export-dot", EX1)
        assert code == 0
        (graph,) = pydot.graph_from_dot_data(out)
        shapes = [n.get_shape() for n in graph.get_nodes() if n.get_name() not in ("node", "edge", "graph")]
        assert shapes.count("box") == 3
        assert shapes.count("plaintext") == 10

    def test_single_leaf(self, capsys, tmp_path):
        path = tmp_path / "leaf.json"
        path.write_text(json.dumps({"events": ["a"], "capacity": {"masses": [{"set": ["a"], "mass": 1}]},
                                    "root": {"kind": "leaf", "gain": "5"}}))
        out = run(capsys, "export-dot", path)[1]
        (graph,) = pydot.graph_from_dot_data(out)
        assert len([n for n in graph.get_nodes() if n.get_name().startswith("n")]) == 1

    def test_overlay_down(self, capsys, tmp_path):
        s = tmp_path / "s.json"
        s.write_text(json.dumps({"choices": {"0": 1}}))
        out_file = tmp_path / "t.dot"
        assert run(capsys, "export-dot", EX1, "--strategy", s, "--out", out_file)[0] == 0
        text = out_file.read_text()
        bold = [line for line in text.splitlines() if "style=bold" in line]
        assert len(bold) == 1 and 'label="D"' in bold[0]


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rcu.cli", "validate", EX1], capture_output=True, text=True,
                          env={**os.environ})
    assert proc.returncode == 0
