import json
import os
import subprocess

import pytest

import aec


def small_config(**overrides):
    cfg = json.loads(aec.default_config())
    cfg["episodes"] = 50
    cfg["threads"] = 2
    cfg.update(overrides)
    return json.dumps(cfg)


def test_exports_are_importable():
    for name in aec.__all__:
        assert getattr(aec, name) is not None


def test_predicate_round_trip():
    p = aec.PredicateId.parse("in(o1,c1)")
    assert p.name == "in"
    assert p.args == ["o1", "c1"]
    assert str(p) == "in(o1,c1)"
    assert p == aec.PredicateId("in", ["o1", "c1"])


def test_stores_stay_separate():
    w = aec.GroundedStore()
    p = aec.PredicateId.parse("open(c1)")
    w = aec.ground_update(w, p, True)
    assert w.value_of(p) is True
    b = aec.BeliefStore()
    q = aec.PredicateId.parse("open(c2)")
    b = aec.insert_belief(b, w, q, False, 0.2)
    assert b.contains(q)
    # a belief about a grounded predicate must be refused
    with pytest.raises(Exception):
        aec.insert_belief(b, w, p, False, 0.2)


def test_grounding_conflict_raises():
    w = aec.GroundedStore()
    p = aec.PredicateId.parse("open(c1)")
    w.set(p, True, "query")
    with pytest.raises(aec.GroundingConflict):
        aec.ground_update(w, p, False)


def test_discretize_margins():
    assert aec.discretize(0.9, 0.0, 0.05) is True
    assert aec.discretize(0.1, 0.0, 0.05) is False
    assert aec.discretize(0.52, 0.0, 0.05) is None


def test_run_single_episode_and_audits():
    out = aec.run_single(small_config(), 0)
    assert out["no_leakage"]
    assert aec.audit_no_leakage(out["trace"])["ok"]
    assert aec.audit_gate_semantics(out["trace"])["ok"]
    assert "episode_start" in out["trace"]


def test_run_corpus_report():
    report = json.loads(aec.run_corpus(small_config()))
    assert len(report["episodes"]) == 50
    assert report["leakage_violations"] == 0
    assert report["gate_violations"] == 0
    assert report["infeasible_commits"] == 0  # zero oracle error


def test_validate_theorem1():
    t1 = json.loads(aec.validate_theorem1(small_config(episodes=200)))
    assert t1["conclusive"]
    assert t1["holds"]


def test_soundness_sweep():
    sweep = aec.soundness_sweep()
    assert sweep["ok"]
    assert sweep["checked"] > 0


def test_bad_config_rejected():
    cfg = json.loads(aec.default_config())
    cfg["episodes"] = 0
    with pytest.raises(Exception):
        aec.run_corpus(json.dumps(cfg))


@pytest.fixture(scope="module")
def cli():
    path = os.environ.get("AEC_CLI")
    if not path or not os.path.exists(path):
        pytest.skip("AEC_CLI not set")
    return path


def test_cli_run_matches_module(cli, tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(small_config())
    out_path = tmp_path / "report.json"
    r = subprocess.run(
        [cli, "run", "-c", str(cfg_path), "-o", str(out_path)],
        capture_output=True, text=True,
    )
    assert r.returncode == 0, r.stderr
    cli_report = out_path.read_text()
    assert cli_report == aec.run_corpus(small_config())


def test_cli_config_error_exit_code(cli, tmp_path):
    cfg_path = tmp_path / "bad.json"
    cfg_path.write_text('{"episodes": 0}')
    r = subprocess.run([cli, "run", "-c", str(cfg_path)], capture_output=True, text=True)
    assert r.returncode == 2
