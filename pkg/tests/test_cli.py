import json

import pytest

from svoa import cli


@pytest.fixture
def env(tmp_path):
    return {"SVOA_CACHE_DIR": str(tmp_path / "cache")}


def run(argv, env):
    return cli.run(argv, environ=env)


def test_qseries_example(env):
    code, rep, out = run(["qseries", "--kind", "c", "--order", "4"], env)
    assert code == 0
    assert rep.checks[0].payload["coefficients"] == [8, 128, 1152, 7680, 42112]
    assert out.splitlines()[-1] == "qseries: PASS"


def test_cohomology_example(env):
    code, rep, _ = run(["cohomology", "--norm", "0", "--picture", "-1", "--format", "json"], env)
    assert code == 0
    dims = rep.checks[0].payload["dims"]
    assert {int(k): v for k, v in dims.items()} == {-1: 0, 0: 0, 1: 8, 2: 0, 3: 0}


def test_brst_check(env):
    code, rep, _ = run(["brst-check"], env)
    assert code == 0 and rep.passed


def test_json_schema(env):
    code, _, out = run(["trace-identity", "--order", "3", "--format", "json", "--timing"], env)
    doc = json.loads(out)
    assert code == 0
    assert doc["schema"] == "svoa-report/1" and doc["suite"] == "trace-identity" and doc["passed"]
    (check,) = doc["checks"]
    assert set(check) == {"name", "passed", "payload", "seconds"}
    assert check["payload"]["lattice_side"] == check["payload"]["closed_form"]


def test_failing_verdict_exits_one(env):
    code, rep, out = run(["asymptotics", "--n", "10"], env)
    assert code == 1 and not rep.passed
    assert "FAIL" in out
    code, _, _ = run(["asymptotics", "--n", "1000", "--prefactor", "derived"], env)
    assert code == 0


@pytest.mark.parametrize("argv", [[], ["nonsense"], ["qseries", "--kind", "zz"],
                                  ["cohomology", "--norm", "1"], ["cohomology"],
                                  ["cohomology", "--alpha", "1,2,3"],
                                  ["denominator-check", "--r", "1,0,0,0,0,0,0,0,0,0"]])
def test_usage_errors(argv, env):
    code, rep, out = run(argv, env)
    assert code == 2 and rep is None and out.startswith("svoa: error:")


def test_malformed_config(tmp_path, env):
    bad = tmp_path / "bad.cfg"
    bad.write_text("format json\n")
    assert run(["qseries", "--config", str(bad)], env)[0] == 2
    bad.write_text("colour = red\n")
    assert run(["qseries", "--config", str(bad)], env)[0] == 2
    assert run(["qseries", "--config", str(tmp_path / "missing.cfg")], env)[0] == 2


def test_config_precedence(tmp_path, env):
    cfg = tmp_path / "svoa.cfg"
    cfg.write_text("# comment\nformat = text\n")
    e = dict(env, SVOA_FORMAT="json")
    _, _, out = run(["qseries"], e)
    assert out.lstrip().startswith("{")                       # env over defaults
    _, _, out = run(["qseries", "--config", str(cfg)], e)
    assert not out.lstrip().startswith("{")                   # file over env
    _, _, out = run(["qseries", "--config", str(cfg), "--format", "json"], e)
    assert out.lstrip().startswith("{")                       # flag over file
    e["SVOA_CONFIG"] = str(cfg)
    _, _, out = run(["qseries"], e)
    assert not out.lstrip().startswith("{")


def test_cache_hit_and_corruption(tmp_path, env):
    argv = ["trace-identity", "--order", "4", "--format", "json"]
    _, first, out1 = run(argv, env)
    assert first.checks[0].seconds is not None
    files = list((tmp_path / "cache").glob("*.json"))
    assert len(files) == 1
    _, second, out2 = run(argv, env)
    assert second.checks[0].seconds is None                   # served from cache
    assert out1 == out2
    files[0].write_text(files[0].read_text().replace('"passed": true', '"passed": false', 1))
    code, third, out3 = run(argv, env)
    assert code == 0 and third.checks[0].seconds is not None  # recomputed
    assert out3 == out1
    assert json.loads(files[0].read_text())["report"]["passed"] is True


def test_cache_off_matches(tmp_path, env):
    argv = ["denominator-check", "--height", "2", "--format", "json"]
    _, _, on = run(argv, env)
    _, _, off = run(argv + ["--no-cache"], env)
    _, _, again = run(argv, env)
    assert on == off == again


def test_cache_inspect_and_clear(env):
    run(["trace-identity", "--order", "2"], env)
    run(["gamma-check"], env)
    code, rep, _ = run(["cache", "inspect"], env)
    entries = rep.checks[0].payload["entries"]
    assert code == 0 and len(entries) == 2 and all(e["valid"] for e in entries)
    code, rep, _ = run(["cache", "clear"], env)
    assert rep.checks[0].payload["removed"] == 2
    _, rep, _ = run(["cache", "inspect"], env)
    assert rep.checks[0].payload["entries"] == []


def test_bracket_and_elements(env):
    code, rep, _ = run(["bracket", "Q0", "Q1", "--format", "json"], env)
    assert code == 0
    assert cli.parse_element("P3").alpha == cli.parse_element("Q3").alpha
    for bad in ("X1", "P0", "P11", "Q16", "root:1,0:0:0"):
        with pytest.raises(cli.UsageError):
            cli.parse_element(bad)


def test_cartan_formats(env):
    code, rep, _ = run(["cartan", "--height", "1", "--matrix-format", "csv"], env)
    assert code == 0
    rows = rep.checks[0].payload["csv"].splitlines()
    assert len(rows) == len(rep.checks[0].payload["simple_roots"])
    code, rep, _ = run(["cartan", "--height", "1"], env)
    assert code == 0 and "matrix" in rep.checks[0].payload


def test_default_momentum():
    from svoa import lattice as lt
    for n in (0, -2, -4, 2):
        v = cli.default_momentum(n)
        assert lt.ip4(v, v) == 4 * n and lt.in_ii91(v[:10])
    with pytest.raises(cli.UsageError):
        cli.default_momentum(-1)


def test_main_prints(capsys, env, monkeypatch):
    monkeypatch.setenv("SVOA_CACHE_DIR", env["SVOA_CACHE_DIR"])
    assert cli.main(["qseries", "--kind", "a", "--order", "3"]) == 0
    assert "[1, -16, 112, -448]" in capsys.readouterr().out
    assert cli.main(["bogus"]) == 2
    assert "svoa: error" in capsys.readouterr().err
