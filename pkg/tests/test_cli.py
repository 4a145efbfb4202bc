import json
import subprocess
import sys

import pytest

from qvoa.cli import Cache, ConfigError, RunConfig, main, parse_lambdas, resolve_cache_dir, run


def run_main(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_slq2_report(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, text, _ = run_main(capsys, "slq2", "--no-cache", "--out", str(out))
    assert code == 0
    rep = json.loads(out.read_text())
    rel = [c for c in rep["checks"] if c["id"].startswith("slq2.relation.")]
    assert len(rel) == 13 and all(c["status"] == "pass" for c in rel)
    assert rep["summary"]["fail"] == 0 and rep["schema"] == 1
    assert all(c["anchor"] for c in rep["checks"])
    assert text.strip().splitlines()[-1].endswith("0 failed, 0 skipped")


def test_cohomology_dims(tmp_path, capsys):
    out = tmp_path / "c.json"
    code, _, _ = run_main(capsys, "cohomology", "--lambda", "1", "--no-cache", "--out", str(out))
    assert code == 0
    dims = json.loads(out.read_text())["data"]["cohomology_dims"]
    assert dims["1"] == {"-1": 0, "0": 1, "1": 0, "2": 0, "3": 1, "4": 0}


@pytest.mark.parametrize("bad", ["3/2", "1.5", "2", "-1.2"])
def test_rational_kappa_refused(capsys, bad):
    code, _, err = run_main(capsys, "correlators", "--kappa", bad, "--no-cache")
    assert code == 2 and "kappa" in err


def test_config_errors(capsys):
    assert run_main(capsys)[0] == 2
    assert run_main(capsys, "uq-relations", "--level", "-1", "--no-cache")[0] == 2
    with pytest.raises(ConfigError):
        parse_lambdas("1,x")
    assert parse_lambdas("0, 2") == (0, 2)


def test_truncation_hint(capsys):
    code, text, _ = run_main(capsys, "cohomology", "--lambda", "1", "--level", "1", "--no-cache")
    assert code == 1 and "raise --level" in text


def test_cache_hit_and_sample_recompute(tmp_path, capsys):
    cfg = RunConfig("braiding", cache=str(tmp_path))
    first = run(cfg, Cache(tmp_path))
    assert first.ok and first.cache["hits"] == 0 and first.cache["misses"] > 0
    second = run(cfg, Cache(tmp_path))
    assert second.ok and second.cache["hits"] == first.cache["misses"]
    assert any(c.id == "braiding.cache-sample" and c.status == "pass" for c in second.checks)
    strip = lambda r: [(c.id, c.status) for c in r.checks if c.id != "braiding.cache-sample"]
    assert strip(first) == strip(second)


def test_cache_corruption_and_schema(tmp_path):
    cache = Cache(tmp_path)
    cache.put("op", {"x": 1}, {"value": [1, 2]})
    assert cache.get("op", {"x": 1}) == {"value": [1, 2]}
    path = cache.path(cache.key("op", {"x": 1}))
    blob = json.loads(path.read_text())
    blob["payload"]["value"] = [1, 3]
    path.write_text(json.dumps(blob))
    assert cache.get("op", {"x": 1}) is None and cache.rejected == 1 and not path.exists()
    cache.put("op", {"x": 1}, {"value": [1, 2]})
    path.write_text("{not json")
    assert cache.get("op", {"x": 1}) is None and cache.rejected == 2
    cache.put("op", {"x": 1}, {"value": [1, 2]})
    assert Cache(tmp_path, schema=2).get("op", {"x": 1}) is None


def test_corrupt_braiding_entry_is_recomputed(tmp_path):
    cfg = RunConfig("braiding", cache=str(tmp_path))
    run(cfg, Cache(tmp_path))
    for f in tmp_path.glob("*/*.json"):
        f.write_text(f.read_text().replace('"1"', '"2"', 1))
    cache = Cache(tmp_path)
    rep = run(cfg, cache)
    assert rep.ok and cache.rejected > 0


def test_cache_dir_resolution(monkeypatch, tmp_path):
    monkeypatch.setenv("QVOA_CACHE", str(tmp_path))
    assert resolve_cache_dir(None) == str(tmp_path)
    assert resolve_cache_dir("/elsewhere") == "/elsewhere"
    monkeypatch.delenv("QVOA_CACHE")
    assert resolve_cache_dir(None).endswith(".cache/qvoa")


def test_byte_identical_reports(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run_main(capsys, "chains", "--no-timing", "--out", str(a), "--cache", str(tmp_path / "c"))
    run_main(capsys, "chains", "--no-timing", "--out", str(b), "--cache", str(tmp_path / "c"))
    assert a.read_bytes() == b.read_bytes()


def test_config_file_and_override(tmp_path, capsys):
    conf = tmp_path / "run.conf"
    out = tmp_path / "o.json"
    conf.write_text(f"command = cohomology\nlambda = 0\nlevel = 0\nout = {out}\n")
    code, _, _ = run_main(capsys, "--config", str(conf), "--no-cache", "--no-timing")
    assert code == 1
    code, _, _ = run_main(capsys, "--config", str(conf), "--level", "4", "--no-cache", "--no-timing")
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["config"]["level"] == 4 and rep["config"]["lambda"] == [0]


def test_console_script(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "qvoa.cli", "intertwiners", "--no-cache"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "0 failed" in proc.stdout
