"""End-to-end CLI flows through main(argv), no subprocesses."""

import json
import math

import pytest

from elpp.cli import main
from elpp.environment import GENERATOR_ID, Environment
from elpp.volume import volume_exact


def _lines(capsys):
    out, err = capsys.readouterr()
    return out.splitlines(), err.splitlines()


def _run(capsys, *argv):
    rc = main(list(argv))
    out, err = _lines(capsys)
    return rc, out, err


# drivers and errors ------------------------------------------------------

def test_no_subcommand_is_a_contract_violation(capsys):
    rc, out, err = _run(capsys)
    assert rc == 1 and not out
    assert len(err) == 1
    assert "subcommand" in json.loads(err[0])["error"]


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    out, _ = _lines(capsys)
    assert out[0].startswith("elpp ")


def test_unknown_flag_exits_one(capsys):
    rc, _, err = _run(capsys, "sample", "--kind", "uniform", "--bogus", "1")
    assert rc == 1
    assert json.loads(err[0])["exit"] == 1


# sample ------------------------------------------------------------------

def test_sample_roundtrips_and_is_deterministic(capsys):
    rc, out, err = _run(capsys, "sample", "--kind", "uniform", "--m", "12",
                        "--seed", "3")
    assert rc == 0 and len(out) == 1 and not err
    env = Environment.from_json(out[0])
    assert len(env) == 12 and env.kind == "uniform-cloud"
    rc2, out2, _ = _run(capsys, "sample", "--kind", "uniform", "--m", "12",
                        "--seed", "3")
    assert out2 == out


def test_sample_generates_and_reports_a_seed(capsys):
    rc, out, err = _run(capsys, "sample", "--kind", "ppp", "--ell", "10")
    assert rc == 0
    assert len(err) == 1
    master = json.loads(err[0])["generated_master_seed"]
    env = Environment.from_json(out[0])
    assert env.seed.master_seed == master


def test_sample_requires_a_kind(capsys):
    rc, _, err = _run(capsys, "sample")
    assert rc == 1 and "kind" in json.loads(err[0])["error"]
    rc, _, err = _run(capsys, "sample", "--kind", "nope", "--seed", "1")
    assert rc == 1


def test_sample_rejects_foreign_formats(capsys):
    rc, _, err = _run(capsys, "sample", "--kind", "uniform", "--seed", "1",
                      "--format", "csv")
    assert rc == 1 and "format" in json.loads(err[0])["error"]


def test_sample_writes_to_a_file(capsys, tmp_path):
    p = tmp_path / "env.json"
    rc, out, _ = _run(capsys, "sample", "--kind", "lattice", "--m", "9",
                      "--n", "8", "--half-width", "5", "--seed", "4",
                      "--out", str(p))
    assert rc == 0 and not out
    env = Environment.from_json(p.read_text())
    assert len(env) == 9 and env.box.mode == "lattice"


# lpp and var -------------------------------------------------------------

@pytest.fixture()
def env_file(capsys, tmp_path):
    p = tmp_path / "env.json"
    assert main(["sample", "--kind", "uniform", "--m", "10", "--seed", "3",
                 "--out", str(p)]) == 0
    capsys.readouterr()
    return str(p)


def test_lpp_value_and_count_modes_are_dual(capsys, env_file):
    rc, out, _ = _run(capsys, "lpp", "--env", env_file, "--budget", "2.0")
    assert rc == 0
    doc = json.loads(out[0])
    assert doc["subcommand"] == "lpp"
    v = doc["outputs"]["value"]
    assert len(doc["outputs"]["witness"]) == v
    rc, out, _ = _run(capsys, "lpp", "--env", env_file, "--count", str(v))
    assert rc == 0
    dual = json.loads(out[0])
    # the witness realizes the least entropy for its count
    assert dual["outputs"]["min_entropy"] == pytest.approx(
        doc["outputs"]["witness_entropy"], abs=1e-9)
    assert dual["outputs"]["min_entropy"] <= 2.0


def test_lpp_needs_exactly_one_mode(capsys, env_file):
    rc, _, err = _run(capsys, "lpp", "--env", env_file)
    assert rc == 1
    rc, _, err = _run(capsys, "lpp", "--env", env_file, "--budget", "1",
                      "--count", "2")
    assert rc == 1 and "exactly one" in json.loads(err[0])["error"]


def test_lpp_missing_env_file_is_io_failure(capsys, tmp_path):
    rc, _, err = _run(capsys, "lpp", "--env", str(tmp_path / "nope.json"),
                      "--budget", "1")
    assert rc == 2 and json.loads(err[0])["exit"] == 2


def test_lpp_corrupt_env_file_is_contract_violation(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    rc, _, err = _run(capsys, "lpp", "--env", str(p), "--budget", "1")
    assert rc == 1


def test_var_reports_a_certified_maximizer(capsys, tmp_path):
    p = tmp_path / "env.json"
    assert main(["sample", "--kind", "ppp", "--ell", "12", "--seed", "6",
                 "--out", str(p)]) == 0
    capsys.readouterr()
    rc, out, _ = _run(capsys, "var", "--env", str(p), "--beta", "2.0")
    assert rc == 0
    doc = json.loads(out[0])["outputs"]
    env = Environment.from_json(p.read_text())
    energy = sum(env.weights[i] for i in doc["argmax_ids"])
    assert doc["value"] == pytest.approx(2.0 * energy - doc["argmax_entropy"],
                                         abs=1e-9)
    assert len(doc["argmax"]) == len(doc["argmax_ids"])


def test_var_sweep_excludes_point_solves(capsys, env_file):
    rc, out, _ = _run(capsys, "var", "--env", env_file, "--sweep", "0.5,1,2")
    assert rc == 0
    doc = json.loads(out[0])["outputs"]
    assert doc["betas"] == [0.5, 1.0, 2.0]
    assert doc["values"] == sorted(doc["values"])
    rc, _, err = _run(capsys, "var", "--env", env_file, "--sweep", "1,2",
                      "--beta", "1")
    assert rc == 1


# volume ------------------------------------------------------------------

def test_volume_csv_carries_metadata_and_the_exact_value(capsys):
    rc, out, _ = _run(capsys, "volume", "--k", "1", "--samples", "2000",
                      "--seed", "5")
    assert rc == 0 and len(out) == 3
    meta = json.loads(out[0].removeprefix("# "))
    assert meta["master_seed"] == 5 and meta["generator_id"] == GENERATOR_ID
    assert out[1] == "k,t,B,exact,mc_mean,mc_stderr,samples"
    row = out[2].split(",")
    assert float(row[3]) == pytest.approx(4.0 * math.sqrt(2.0) / 3.0, rel=1e-15)
    assert int(row[6]) == 2000


def test_volume_json_format(capsys):
    rc, out, _ = _run(capsys, "volume", "--k", "2", "--samples", "2000",
                      "--seed", "5", "--format", "json")
    assert rc == 0
    doc = json.loads(out[0])
    assert doc["outputs"]["exact"] == pytest.approx(volume_exact(2, 1.0, 1.0))
    assert doc["outputs"]["master_seed"] == 5
    assert doc["params"]["k"] == 2


# config files ------------------------------------------------------------

def test_config_supplies_params_and_flags_override(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({
        "subcommand": "volume",
        "params": {"k": 2, "samples": 2000},
        "master_seed": 9,
        "format": "json",
    }))
    rc, out, _ = _run(capsys, "volume", "--config", str(cfg))
    assert rc == 0
    doc = json.loads(out[0])
    assert doc["params"]["k"] == 2 and doc["outputs"]["master_seed"] == 9
    rc, out, _ = _run(capsys, "volume", "--config", str(cfg), "--k", "1")
    assert json.loads(out[0])["params"]["k"] == 1


def test_config_rejections(capsys, tmp_path):
    cases = [
        ({"subcommand": "sample"}, "volume"),          # wrong subcommand
        ({"paramz": {}}, "volume"),                    # unknown top-level key
        ({"params": {"k": 1, "zzz": 2}}, "volume"),    # unknown param
        ({"params": []}, "volume"),                    # params not a mapping
    ]
    for doc, sub in cases:
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps(doc))
        rc, _, err = _run(capsys, sub, "--config", str(cfg), "--k", "1",
                          "--seed", "1")
        assert rc == 1, doc
    cfg.write_text("[1, 2]")
    assert _run(capsys, "volume", "--config", str(cfg))[0] == 1
    cfg.write_text("{broken")
    assert _run(capsys, "volume", "--config", str(cfg))[0] == 1
    rc, _, err = _run(capsys, "volume", "--config", str(tmp_path / "no.json"),
                      "--k", "1")
    assert rc == 2


# experiments -------------------------------------------------------------

def test_exp_jsonl_output(capsys):
    rc, out, _ = _run(capsys, "exp", "--name", "tail", "--replicas", "5",
                      "--m", "8", "--seed", "31")
    assert rc == 0 and len(out) == 6
    meta = json.loads(out[0])
    assert meta["experiment"] == "tail" and meta["master_seed"] == 31
    assert meta["params"]["m"] == 8 and meta["params"]["mode"] == "continuous"
    for r, line in enumerate(out[1:]):
        doc = json.loads(line)
        assert doc["seed"]["stream_index"] == r
        assert "value" in doc["outputs"]


def test_exp_csv_summary(capsys):
    rc, out, _ = _run(capsys, "exp", "--name", "blowup", "--replicas", "10",
                      "--q-ladder", "2,4", "--ell0", "5", "--seed", "31",
                      "--format", "csv")
    assert rc == 0
    assert out[1] == "q,ell,median,mean"
    assert len(out) == 4  # meta + header + one row per rung


def test_exp_threads_cannot_change_bytes(capsys, tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    base = ["exp", "--name", "tail", "--replicas", "6", "--m", "8",
            "--seed", "32"]
    assert main(base + ["--threads", "1", "--out", str(a)]) == 0
    assert main(base + ["--threads", "8", "--out", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


def test_exp_threads_is_accepted_in_config_but_never_echoed(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({
        "subcommand": "exp",
        "params": {"name": "tail", "replicas": 4, "m": 6, "threads": 2},
        "master_seed": 33,
    }))
    rc, out, _ = _run(capsys, "exp", "--config", str(cfg))
    assert rc == 0
    assert "threads" not in json.loads(out[0])["params"]


def test_exp_rejects_stray_and_missing_parameters(capsys):
    # ell belongs to scaling/convergence, not tail
    rc, _, err = _run(capsys, "exp", "--name", "tail", "--replicas", "4",
                      "--ell", "30", "--seed", "1")
    assert rc == 1 and "ell" in json.loads(err[0])["error"]
    rc, _, err = _run(capsys, "exp", "--name", "tail", "--seed", "1")
    assert rc == 1 and "replicas" in json.loads(err[0])["error"]
    rc, _, err = _run(capsys, "exp", "--name", "wat", "--replicas", "4")
    assert rc == 1


# selftest ----------------------------------------------------------------

def test_selftest_runs_green(capsys):
    rc, out, err = _run(capsys, "selftest")
    assert rc == 0 and not err
    assert len(out) == 6
    assert all(line.startswith("ok ") for line in out)
