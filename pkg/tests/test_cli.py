import json

import pytest

from txncheck.cli import main, render_cycle
from txncheck.codec import execution_from_json, graph_from_json
from txncheck.fixtures import emit_fixtures


@pytest.fixture(scope="module")
def fx(tmp_path_factory):
    d = tmp_path_factory.mktemp("fixtures")
    assert main(["fixtures", "--emit", str(d)]) == 0
    return d


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    cap = capsys.readouterr()
    lines = [json.loads(l) for l in cap.out.splitlines() if l.strip()]
    return code, lines, cap.err


def test_fixtures_emitted(fx):
    names = {p.stem for p in fx.glob("*.json")}
    assert {e.name for e in emit_fixtures()} == names
    doc = json.loads((fx / "lost-update.json").read_text())
    assert doc["expected"] == {
        "cc": "allowed",
        "ccser": "allowed",
        "psi": "forbidden",
        "si": "forbidden",
        "ser": "forbidden",
    }


def test_check_lost_update(fx, capsys):
    code, out, _ = run(capsys, "check", "ser", fx / "lost-update.json")
    assert code == 1 and out[0]["verdict"] == "non-member"
    code, out, _ = run(capsys, "check", "cc", fx / "lost-update.json")
    assert code == 0 and out[0]["verdict"] == "member" and out[0]["witness"]


def test_check_solver_engine_on_history(fx, capsys):
    code, out, _ = run(capsys, "check", "psi", fx / "long-fork.json", "--engine", "solver")
    assert code == 0 and out[0]["engine"] == "solver"
    code, _, _ = run(capsys, "check", "si", fx / "long-fork.json", "--engine", "solver")
    assert code == 1


def test_witness_round_trip(fx, capsys, tmp_path):
    code, out, _ = run(capsys, "witness", "psi", fx / "long-fork-graph.json")
    assert code == 0
    w = out[0]["witness"]
    path = tmp_path / "w.json"
    path.write_text(json.dumps(w))
    code, out, _ = run(capsys, "graphof", path)
    assert code == 0
    given = graph_from_json(json.loads((fx / "long-fork-graph.json").read_text()))
    back = graph_from_json(out[0]["graph"])
    assert (back.wr, back.ww) == (given.wr, given.ww)
    code, out, _ = run(capsys, "check", "psi", path)
    assert code == 0


def test_witness_non_member_cycle(fx, capsys):
    code, out, _ = run(capsys, "witness", "ser", fx / "lost-update-graph.json")
    assert code == 1 and out[0]["verdict"] == "non-member"
    cyc = out[0]["cycle"]
    assert cyc and cyc[0][0] == cyc[-1][3]
    assert all(a[3] == b[0] for a, b in zip(cyc, cyc[1:]))


def test_pretty_cycle_text(fx, capsys):
    code = main(["--pretty", "witness", "ser", str(fx / "write-skew-graph.json")])
    doc = json.loads(capsys.readouterr().out)
    assert code == 1
    assert doc["cycle_text"] == render_cycle(doc["cycle"])
    assert "-AD(" in doc["cycle_text"]


def test_render_cycle():
    assert render_cycle([("T1", "rw", "x", "T2"), ("T2", "ww", "y", "T1")]) == "T1 -AD(x)-> T2 -VO(y)-> T1"


def test_robust(fx, capsys):
    code, out, _ = run(capsys, "robust", "ser", fx / "write-skew-graph.json")
    assert code == 1 and not out[0]["certified"] and out[0]["cycle"]
    code, out, _ = run(capsys, "robust", "si", fx / "write-skew-graph.json")
    assert code == 0 and out[0]["certified"]
    code, _, err = run(capsys, "robust", "cc", fx / "write-skew-graph.json")
    assert code == 4 and json.loads(err)["error"] == "unsupported"


def test_unsupported_solver(fx, capsys):
    for m in ("si+ser", "cp"):
        code, _, err = run(capsys, "witness", m, fx / "incompleteness.json")
        assert code == 4 and json.loads(err)["error"] == "unsupported"
    code, _, _ = run(capsys, "check", "si+ser", fx / "incompleteness.json", "--engine", "solver")
    assert code == 4


def test_input_errors(tmp_path, fx, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "check", "ser", bad)
    assert code == 2 and json.loads(err)["error"] == "input-error"
    code, _, err = run(capsys, "check", "nope", fx / "lost-update.json")
    assert code == 2
    code, _, _ = run(capsys, "check", "ser", tmp_path / "missing.json")
    assert code == 2
    code, _, _ = run(capsys, "robust", "ser", fx / "lost-update.json")
    assert code == 2


def test_budget_exceeded(tmp_path, capsys, monkeypatch):
    doc = {"transactions": [{"id": f"t{i}", "ops": [{"kind": "write", "obj": "x", "val": i}]} for i in range(4)]}
    p = tmp_path / "h.json"
    p.write_text(json.dumps(doc))
    monkeypatch.setenv("CK_BUDGET", "3")
    code, _, err = run(capsys, "oracle-check", "ser", p)
    assert code == 3 and json.loads(err)["error"] == "budget-exceeded"
    code, _, _ = run(capsys, "enumerate", p)
    assert code == 3


def test_enumerate(fx, capsys):
    code, out, _ = run(capsys, "enumerate", fx / "lost-update.json")
    assert code == 0 and out[-1]["count"] == 4 and len(out) == 5
    code, out, _ = run(capsys, "enumerate", fx / "lost-update.json", "--model", "cp", "--limit", "1")
    assert out[-1]["count"] == 3 and len(out) == 2
    code, out, _ = run(capsys, "enumerate", fx / "write-skew.json", "--model", "ser")
    assert out[-1]["count"] == 0


def test_validate(fx, capsys, tmp_path):
    for p in sorted(fx.glob("*.json")):
        code, out, _ = run(capsys, "validate", p)
        assert code == 0, p
    doc = json.loads((fx / "lost-update.json").read_text())
    doc["transactions"].append(dict(doc["transactions"][0]))
    bad = tmp_path / "dup.json"
    bad.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "validate", bad)
    assert code == 1 and out[0]["violations"]


def test_graphof_and_audit_laws(fx, capsys):
    ex = fx / "running-example-execution.json"
    code, out, _ = run(capsys, "graphof", ex)
    assert code == 0
    g = graph_from_json(out[0]["graph"])
    assert g.ww["acct"].pairs() == [("T0", "T1"), ("T0", "T2"), ("T1", "T2")]
    code, out, _ = run(capsys, "audit-laws", ex, "--model", "cc")
    assert code == 0 and out[0]["pass"] and set(out[0]["laws"]) >= {"a.1", "d.4"}
    code, _, _ = run(capsys, "audit-laws", ex)
    assert code == 2


def _session_doc(vis):
    return {
        "transactions": [
            {"id": "T1", "ops": [{"kind": "write", "obj": "x", "val": 1}]},
            {"id": "T2", "ops": [{"kind": "read", "obj": "x", "val": 1}]},
        ],
        "sessions": [["T1", "T2"]],
        "vis": vis,
        "ar": [["T1", "T2"]],
    }


def test_conforms(tmp_path, capsys):
    p = tmp_path / "e.json"
    p.write_text(json.dumps(_session_doc([["T1", "T2"]])))
    code, out, _ = run(capsys, "conforms", p, "--session", "RYW", "--causal", "none")
    assert code == 0 and out[0]["conforms"]
    code, out, _ = run(capsys, "audit-laws", p, "--session", "RYW", "--causal", "none")
    assert code == 0 and out[0]["laws"]["c.8"]["status"] == "not-applicable"
    p.write_text(json.dumps(_session_doc([])))
    code, out, _ = run(capsys, "conforms", p, "--session", "RYW(x)", "--causal", "none")
    assert code == 1
    assert "session:RYW(x)" in [v["clause"] for v in out[0]["violations"]]
    code, _, _ = run(capsys, "conforms", p, "--session", "XYZ")
    assert code == 2


def test_witness_execution_revalidates(fx, capsys):
    for name in ("long-fork-graph", "write-skew-graph", "lost-update-graph"):
        code, out, _ = run(capsys, "witness", "cc", fx / f"{name}.json")
        assert code == 0
        e = execution_from_json(out[0]["witness"])
        assert e.vis.subset_of(e.ar)
