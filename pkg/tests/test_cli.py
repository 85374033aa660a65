import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from oscint.cli import main
from oscint.records import TOOL_VERSION

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def runner():
    return CliRunner()


def read_json(path):
    return json.loads(Path(path).read_text())


def all_output(res):
    try:
        return res.output + res.stderr
    except ValueError:
        return res.output


def write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2))


# --- resolve ---------------------------------------------------------------

def test_resolve_worked_example(runner, tmp_path):
    res = runner.invoke(main, ["resolve", str(FIXTURES / "cltt-example.json"),
                               "--seed", "5", "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output
    summary = json.loads(res.output)
    assert summary["steps"] == 3
    assert summary["terminal_entries"] == 6
    assert summary["verified"] is True
    assert (tmp_path / "resolution.json").exists()
    records = list(tmp_path.glob("record-*.json"))
    assert len(records) == 1
    rec = read_json(records[0])
    assert rec["command"] == "resolve"
    assert rec["run_id"]


def test_resolve_already_one_dimensional(runner, tmp_path):
    snarl = {"m": 2, "subspaces": [
        {"label": "a", "basis": [["1", "0"]]},
        {"label": "b", "basis": [["0", "1"]]},
        {"label": "c", "basis": [["1", "1"]]}]}
    path = tmp_path / "onedim.json"
    write_json(path, snarl)
    res = runner.invoke(main, ["resolve", str(path)])
    assert res.exit_code == 0, res.output
    summary = json.loads(res.output)
    assert summary["steps"] == 0
    assert summary["terminal_general_position"] is True


def test_resolve_hypothesis_failure_exit_2(runner, tmp_path):
    # m=4 with codims (2,2,2,1): 2 + 7 > 8
    snarl = read_json(FIXTURES / "cltt-example.json")
    snarl["subspaces"].append({"label": "extra", "basis": [
        ["1", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "1", "0"]]})
    path = tmp_path / "bad.json"
    write_json(path, snarl)
    res = runner.invoke(main, ["resolve", str(path)])
    assert res.exit_code == 2, res.output


def test_resolve_malformed_exit_1(runner, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert runner.invoke(main, ["resolve", str(path)]).exit_code == 1
    path2 = tmp_path / "bad-schema.json"
    write_json(path2, {"m": 4})
    assert runner.invoke(main, ["resolve", str(path2)]).exit_code == 1


def test_resolve_deterministic_output(runner, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        res = runner.invoke(main, ["resolve", str(FIXTURES / "cltt-example.json"),
                                   "--seed", "9", "--out", str(out)])
        assert res.exit_code == 0
    assert (a / "resolution.json").read_text() == (b / "resolution.json").read_text()


# --- degeneracy ------------------------------------------------------------

def test_degeneracy_nondegenerate_phase(runner, tmp_path):
    out = tmp_path / "report.json"
    res = runner.invoke(main, ["degeneracy", str(FIXTURES / "antisym-phase.json"),
                               str(FIXTURES / "cltt-maps.json"),
                               "--degree", "2", "--out", str(out)])
    assert res.exit_code == 0, res.output
    summary = json.loads(res.output)
    assert summary["is_degenerate"] is False
    assert summary["quotient_norm"] > 0.1
    report = read_json(out)
    assert report["certificate"] is None
    assert (tmp_path / "report.record.json").exists()


def test_degeneracy_degenerate_phase(runner):
    res = runner.invoke(main, ["degeneracy", str(FIXTURES / "pullback-phase.json"),
                               str(FIXTURES / "cltt-maps.json"), "--degree", "2"])
    assert res.exit_code == 0, res.output
    summary = json.loads(res.output)
    assert summary["is_degenerate"] is True
    assert summary["quotient_norm"] == 0.0


def test_degeneracy_dimension_mismatch_exit_1(runner, tmp_path):
    poly = tmp_path / "p.json"
    write_json(poly, {"vars": 3, "terms": [{"exps": [1, 1, 1], "coeff": "1"}]})
    res = runner.invoke(main, ["degeneracy", str(poly),
                               str(FIXTURES / "cltt-maps.json")])
    assert res.exit_code == 1


# --- sweep -----------------------------------------------------------------

def test_sweep_demo(runner, tmp_path):
    out = tmp_path / "sweep.csv"
    res = runner.invoke(main, ["sweep", str(FIXTURES / "demo-sweep.json"),
                               "--out", str(out)])
    assert res.exit_code == 0, res.output
    summary = json.loads(res.output)
    assert summary["rows"] == 5
    assert summary["fit"]["rho"] > 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "lambda,re,im,abs,nodes"
    assert len(lines) == 6
    assert (tmp_path / "sweep.json").exists()
    assert (tmp_path / "sweep.record.json").exists()


def test_sweep_adversarial_flat(runner, tmp_path):
    out = tmp_path / "adv.csv"
    res = runner.invoke(main, ["sweep", str(FIXTURES / "adversarial-sweep.json"),
                               "--out", str(out), "--adversarial"])
    assert res.exit_code == 0, res.output
    rows = read_json(tmp_path / "adv.json")["rows"]
    mags = [r["abs"] for r in rows]
    assert max(mags) - min(mags) < 1e-9


def test_sweep_adversarial_requires_degenerate(runner, tmp_path):
    spec = read_json(FIXTURES / "demo-sweep.json")
    spec["phase"] = {"vars": 2, "terms": [{"exps": [1, 1], "coeff": "1"}]}
    spec["maps"] = [{"rows": [["1", "0"]]}, {"rows": [["0", "1"]]}]
    path = tmp_path / "spec.json"
    write_json(path, spec)
    res = runner.invoke(main, ["sweep", str(path), "--out",
                               str(tmp_path / "x.csv"), "--adversarial"])
    assert res.exit_code == 1


def test_sweep_missing_lambdas_exit_1(runner, tmp_path):
    spec = read_json(FIXTURES / "demo-sweep.json")
    del spec["lambdas"]
    path = tmp_path / "spec.json"
    write_json(path, spec)
    res = runner.invoke(main, ["sweep", str(path), "--out", str(tmp_path / "x.csv")])
    assert res.exit_code == 1


def test_sweep_node_cap_exit_3_and_allow_flag(runner, tmp_path):
    spec = read_json(FIXTURES / "demo-sweep.json")
    spec["quad"]["refine_tol"] = 1e-16
    spec["quad"]["max_nodes_per_axis"] = 128
    path = tmp_path / "spec.json"
    write_json(path, spec)
    res = runner.invoke(main, ["sweep", str(path), "--out", str(tmp_path / "x.csv")])
    assert res.exit_code == 3, res.output
    res2 = runner.invoke(main, ["sweep", str(path), "--out", str(tmp_path / "y.csv"),
                                "--allow-unconverged"])
    assert res2.exit_code == 0, res2.output


# --- replay ----------------------------------------------------------------

def _make_resolve_record(runner, tmp_path):
    out = tmp_path / "res"
    res = runner.invoke(main, ["resolve", str(FIXTURES / "cltt-example.json"),
                               "--seed", "3", "--out", str(out)])
    assert res.exit_code == 0
    return next(out.glob("record-*.json"))


def test_replay_resolve_ok(runner, tmp_path):
    rec = _make_resolve_record(runner, tmp_path)
    res = runner.invoke(main, ["replay", str(rec)])
    assert res.exit_code == 0, res.output
    assert "replay ok" in res.output


def test_replay_sweep_ok(runner, tmp_path):
    out = tmp_path / "sweep.csv"
    res = runner.invoke(main, ["sweep", str(FIXTURES / "demo-sweep.json"),
                               "--out", str(out)])
    assert res.exit_code == 0
    res2 = runner.invoke(main, ["replay", str(tmp_path / "sweep.record.json")])
    assert res2.exit_code == 0, res2.output
    assert "replay ok" in res2.output


def test_replay_tampered_exit_4(runner, tmp_path):
    rec_path = _make_resolve_record(runner, tmp_path)
    rec = read_json(rec_path)
    rec["output"]["resolution"]["terminal_general_position"] = \
        not rec["output"]["resolution"]["terminal_general_position"]
    tampered = tmp_path / "tampered.json"
    write_json(tampered, rec)
    res = runner.invoke(main, ["replay", str(tampered)])
    assert res.exit_code == 4, res.output


def test_replay_version_mismatch_warns(runner, tmp_path):
    rec_path = _make_resolve_record(runner, tmp_path)
    rec = read_json(rec_path)
    rec["tool_version"] = "0.0.1"
    stale = tmp_path / "stale.json"
    write_json(stale, rec)
    res = runner.invoke(main, ["replay", str(stale)])
    assert res.exit_code == 0, res.output
    text = all_output(res)
    assert "warning" in text
    assert TOOL_VERSION in text


def test_replay_unknown_command_exit_1(runner, tmp_path):
    rec_path = _make_resolve_record(runner, tmp_path)
    rec = read_json(rec_path)
    rec["command"] = "mystery"
    bad = tmp_path / "bad.json"
    write_json(bad, rec)
    res = runner.invoke(main, ["replay", str(bad)])
    assert res.exit_code == 1
