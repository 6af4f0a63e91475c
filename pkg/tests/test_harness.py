import json
from importlib import resources

import jsonschema
import pytest

from symdouble.coordmodels import golden
from symdouble.harness import (
    SUITES, ConfigError, SuiteConfig, UnknownSuite, build_config, list_suites, regen_golden,
    run_suite,
)
from symdouble.harness.cli import main


def schema(name):
    return json.loads(resources.files("symdouble.harness").joinpath(name).read_text())


def run_cli(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_ten_suites_in_stable_order():
    names = [d["name"] for d in list_suites()]
    assert names == ["dvb-duality", "vbgpd-dual", "cotangent-double", "core-embedding",
                     "poisson-mult", "dd-dri", "sideduality", "thm-pairs", "lapvb",
                     "thm-needed"]
    assert names == [d["name"] for d in list_suites()]
    assert all(d["anchor"] for d in list_suites())
    jsonschema.validate(list_suites(), schema("suites.schema.json"))


def test_list_json(capsys):
    code, out = run_cli(capsys, "list", "--format", "json")
    assert code == 0
    jsonschema.validate(json.loads(out.out), schema("suites.schema.json"))


def test_unknown_suite_and_bad_config(capsys):
    with pytest.raises(UnknownSuite):
        run_suite("no-such-suite")
    with pytest.raises(ConfigError):
        SuiteConfig(format="xml")
    with pytest.raises(ConfigError):
        build_config("dvb-duality", trials=0)
    with pytest.raises(ConfigError):
        build_config("dvb-duality", dims="a,b")
    with pytest.raises(ConfigError):
        run_suite("vbgpd-dual", build_config("vbgpd-dual", fault=True))
    code, out = run_cli(capsys, "no-such-suite")
    assert code == 2 and "unknown suite" in out.err


def test_dvb_duality_property_run():
    rep = run_suite("dvb-duality", build_config("dvb-duality", dims="3,3,3", trials=100, seed=7))
    assert rep.ok
    assert all(c.trials == 100 for c in rep.checks)


@pytest.mark.parametrize("name", [n for n, s in SUITES.items() if s.fault])
def test_fault_fixture(name, capsys):
    code, out = run_cli(capsys, name, "--inject-fault", "--trials", "3")
    assert code == 1
    rep = json.loads(out.out)
    assert not rep["ok"]
    bad = [c for c in rep["checks"] if not c["ok"]]
    assert bad and all(c["witness"] is not None for c in bad)


def test_same_seed_same_bytes(capsys):
    _, a = run_cli(capsys, "thm-needed", "--seed", "5")
    _, b = run_cli(capsys, "thm-needed", "--seed", "5")
    assert a.out == b.out
    jsonschema.validate(json.loads(a.out), schema("report.schema.json"))


def test_seed_changes_samples():
    a = run_suite("dvb-duality", build_config("dvb-duality", seed=1, trials=5, fault=True))
    b = run_suite("dvb-duality", build_config("dvb-duality", seed=2, trials=5, fault=True))
    assert a.to_json() != b.to_json()


def test_config_precedence(tmp_path):
    f = tmp_path / "run.cfg"
    f.write_text("# comment\ntrials = 4\nseed = 9\ndims = 1,2\nformat = text\n")
    cfg = build_config("core-embedding", file=f, env={})
    assert (cfg.trials, cfg.seed, cfg.dims, cfg.format) == (4, 9, (1, 2), "text")
    cfg = build_config("core-embedding", file=f, env={"SYMDOUBLE_SEED": "11"})
    assert cfg.seed == 11
    cfg = build_config("core-embedding", file=f, env={"SYMDOUBLE_SEED": "11"}, seed=3, trials=2)
    assert (cfg.seed, cfg.trials) == (3, 2)
    f.write_text("colour = blue\n")
    with pytest.raises(ConfigError):
        build_config("core-embedding", file=f, env={})


def test_env_seed_reaches_cli(capsys, monkeypatch):
    monkeypatch.setenv("SYMDOUBLE_SEED", "42")
    _, out = run_cli(capsys, "poisson-mult")
    assert json.loads(out.out)["seed"] == 42


def test_text_format(capsys):
    code, out = run_cli(capsys, "poisson-mult", "--format", "text")
    assert code == 0 and "PASS" in out.out.splitlines()[0]


def test_timing_is_opt_in(capsys):
    _, out = run_cli(capsys, "poisson-mult", "--timing")
    rep = json.loads(out.out)
    assert isinstance(rep["timing_s"], float)
    jsonschema.validate(rep, schema("report.schema.json"))
    _, out = run_cli(capsys, "poisson-mult")
    assert "timing_s" not in json.loads(out.out)


def test_rationals_are_p_over_q(capsys):
    _, out = run_cli(capsys, "poisson-mult")
    a_star = json.loads(out.out)["details"]["a_* (k=1)"]
    assert a_star == [["0/1", "1/1"], ["-1/1", "0/1"]]


def test_regen_golden_requires_flag(tmp_path, capsys):
    with pytest.raises(golden.GoldenError):
        regen_golden("cotangent-double", tmp_path)
    code, out = run_cli(capsys, "cotangent-double", "--regen-golden", "--golden", str(tmp_path))
    assert code == 2 and "--force" in out.err
    assert list(tmp_path.iterdir()) == []


def test_regen_then_compare(tmp_path, capsys):
    code, _ = run_cli(capsys, "cotangent-double", "--regen-golden", "--force",
                      "--golden", str(tmp_path))
    assert code == 0
    assert all(golden.diff(n, tmp_path) == [] for n in golden.golden_names())
    code, out = run_cli(capsys, "cotangent-double", "--golden", str(tmp_path), "--dims", "1,2",
                        "--trials", "5")
    assert code == 0
    names = [c["name"] for c in json.loads(out.out)["checks"]]
    assert "golden cotangent-pair1" in names


def test_corrupted_golden_fails(tmp_path, capsys):
    regen_golden("cotangent-double", tmp_path, force=True)
    p = tmp_path / "cotangent-pair1.json"
    p.write_text(p.read_text().replace('"1"', '"2"', 1))
    code, out = run_cli(capsys, "cotangent-double", "--golden", str(tmp_path), "--dims", "1",
                        "--trials", "3")
    assert code == 1
    bad = [c for c in json.loads(out.out)["checks"] if not c["ok"]]
    assert bad[0]["name"] == "golden cotangent-pair1"
    assert "checksum" in bad[0]["witness"]["error"]
