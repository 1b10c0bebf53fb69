"""End-to-end command-line tests via the console entry point."""

import json
import os
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "nullmodels.cli"]


def run_cli(*args, env_extra=None):
    env = os.environ.copy()
    if env_extra:
        env.update(env_extra)
    return subprocess.run(CLI + list(args), capture_output=True, text=True, env=env)


def test_generate_is_byte_deterministic(tmp_path):
    a, b = tmp_path / "a.el", tmp_path / "b.el"
    for out in (a, b):
        r = run_cli("generate", "--model", "cm", "--gamma", "1.5", "--n", "1000",
                    "--seed", "7", "--out", str(out))
        assert r.returncode == 0, r.stderr
    assert a.read_bytes() == b.read_bytes()


def test_generate_rejects_out_of_range_gamma(tmp_path):
    r = run_cli("generate", "--model", "cm", "--gamma", "2.5", "--n", "100",
                "--seed", "1", "--out", str(tmp_path / "x.el"))
    assert r.returncode == 2
    assert "(1, 2)" in r.stderr


def test_generate_irg_records_kernel(tmp_path):
    out = tmp_path / "i.el"
    r = run_cli("generate", "--model", "irg", "--gamma", "1.5", "--n", "500",
                "--seed", "3", "--kernel", "poisson", "--out", str(out))
    assert r.returncode == 0
    header = out.read_text().splitlines()[:5]
    assert any(line.startswith("#kernel poisson") for line in header)


def test_generate_ecm_writes_erasure_report(tmp_path):
    out = tmp_path / "e.el"
    r = run_cli("generate", "--model", "ecm", "--gamma", "1.5", "--n", "500",
                "--seed", "3", "--out", str(out))
    assert r.returncode == 0
    report = json.loads((tmp_path / "e.el.erasure.json").read_text())
    assert report["z_total"] >= 0
    assert sum(report["removed_stubs"]) == 2 * report["z_total"]


def test_stats_pipeline_reproducible(tmp_path):
    out = tmp_path / "g.el"
    run_cli("generate", "--model", "cm", "--gamma", "1.5", "--n", "300",
            "--seed", "5", "--out", str(out))
    r1 = run_cli("stats", str(out))
    r2 = run_cli("stats", str(out))
    assert r1.returncode == 0
    assert r1.stdout == r2.stdout
    payload = json.loads(r1.stdout)
    assert payload["degree_power_sums"]["1"] == 2 * payload["edges"]


def test_stats_degenerate_is_null_with_reason(tmp_path):
    k3 = tmp_path / "k3.el"
    k3.write_text("#n 3\n0 1 1\n1 2 1\n0 2 1\n")
    r = run_cli("stats", str(k3))
    assert r.returncode == 0
    payload = json.loads(r.stdout)
    assert payload["pearson"] is None
    assert "degenerate" in payload["pearson_degenerate_reason"] or \
           "equal" in payload["pearson_degenerate_reason"]
    assert payload["clustering"]["c_global"] == 1.0


def test_stats_malformed_line_exits_one(tmp_path):
    bad = tmp_path / "bad.el"
    bad.write_text("#n 3\n0 1 1\nnot an edge\n")
    r = run_cli("stats", str(bad))
    assert r.returncode == 1
    assert "line 3" in r.stderr


@pytest.fixture()
def config_file(tmp_path):
    cfg = {
        "seed": 11,
        "gamma": 1.5,
        "experiments": [
            {"name": "erased", "type": "scaling", "model": "ecm",
             "statistic": "erased_edges", "sizes": [500, 2000], "replicas": 8},
        ],
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return path


def test_experiment_empty_list_writes_manifest(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"seed": 1, "experiments": []}))
    r = run_cli("experiment", "--config", str(path), "--out", str(tmp_path / "out"))
    assert r.returncode == 0
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert manifest["master_seed"] == 1
    assert manifest["config_hash"]


def test_experiment_thread_invariance(tmp_path, config_file):
    r1 = run_cli("experiment", "--config", str(config_file),
                 "--out", str(tmp_path / "o1"), "--threads", "1")
    r2 = run_cli("experiment", "--config", str(config_file),
                 "--out", str(tmp_path / "o2"), "--threads", "4")
    assert r1.returncode == 0 and r2.returncode == 0
    s1 = (tmp_path / "o1" / "summary.json").read_bytes()
    s2 = (tmp_path / "o2" / "summary.json").read_bytes()
    assert s1 == s2


def test_experiment_config_hash_stable_under_key_order(tmp_path):
    a = {"seed": 3, "experiments": [], "gamma": 1.5}
    b = {"gamma": 1.5, "experiments": [], "seed": 3}
    pa, pb = tmp_path / "a.json", tmp_path / "b.json"
    pa.write_text(json.dumps(a))
    pb.write_text(json.dumps(b))
    run_cli("experiment", "--config", str(pa), "--out", str(tmp_path / "oa"))
    run_cli("experiment", "--config", str(pb), "--out", str(tmp_path / "ob"))
    ha = json.loads((tmp_path / "oa" / "manifest.json").read_text())["config_hash"]
    hb = json.loads((tmp_path / "ob" / "manifest.json").read_text())["config_hash"]
    assert ha == hb


def test_experiment_schema_violations_listed(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"seed": 1, "bogus_key": 2,
                                "experiments": [{"name": "x", "type": "unknown"}]}))
    r = run_cli("experiment", "--config", str(path), "--out", str(tmp_path / "o"))
    assert r.returncode == 2
    assert "bogus_key" in r.stderr
    assert "unknown" in r.stderr


def test_experiment_failed_assertion_exits_one_with_tag(tmp_path):
    cfg = {
        "seed": 11, "gamma": 1.5,
        "experiments": [
            {"name": "erased", "type": "scaling", "model": "ecm",
             "statistic": "erased_edges", "sizes": [500, 2000], "replicas": 8,
             "assert": {"slope": {"target": -5.0, "tol": 0.01},
                        "tag": "impossible-slope-check"}},
        ],
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    r = run_cli("experiment", "--config", str(path), "--out", str(tmp_path / "o"))
    assert r.returncode == 1
    assert "impossible-slope-check" in r.stderr


def test_environment_seed_override(tmp_path, config_file):
    r = run_cli("experiment", "--config", str(config_file),
                "--out", str(tmp_path / "o"), env_extra={"NULLMODELS_SEED": "777"})
    assert r.returncode == 0
    manifest = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert manifest["master_seed"] == 777


def test_integrate_subcommand(tmp_path):
    r = run_cli("integrate", "--gamma", "1.5", "--tolerance", "0.001")
    assert r.returncode == 0
    payload = json.loads(r.stdout)
    assert abs(payload["value"] - 56.4845) < 0.01
    assert len(payload["convergence"]) == 3
    r2 = run_cli("integrate", "--gamma", "1.5", "--epsilon", "0.1")
    v_trunc = json.loads(r2.stdout)["value"]
    assert v_trunc < payload["value"]
