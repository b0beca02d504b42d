import json

import pytest

from dampinv.cli import main
from dampinv.io import read_json

WEAK_FAST = ["--model", "weak", "--gamma", "1", "--panels", "8", "--order", "8"]


def mode_files(path):
    return {p.name: p.read_bytes() for p in sorted(path.glob("mode_*_u.csv"))}


def test_validate(capsys):
    assert main(["validate"]) == 0
    out = capsys.readouterr().out
    assert "7/7 identities passed" in out
    assert out.count("PASS") == 7


def test_default_strong_pipeline(tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["pipeline", "--model", "strong", "--delta", "1", "--n", "3", "--lmax", "0", "--alpha", "1.5", "--out", str(out)])
    assert code == 0
    report = read_json(out / "report.json")
    assert report["modes"][0]["rel_l2_error"] <= 0.05
    manifest = read_json(out / "manifest.json")
    assert manifest["alpha_in_window"] is True
    assert manifest["kernel"]["alpha"] == 1.5
    for name in ("gram_0.csv", "eig_values_0.csv", "eig_vectors_0.csv", "mode_0_0_u.csv", "mode_0_0_recon.csv"):
        assert (out / name).exists()
        assert manifest["digests"][name].startswith("sha256:")


def test_seeded_runs_are_byte_identical(tmp_path):
    args = WEAK_FAST + ["--lmax", "1", "--seed", "7", "--noise-sigma", "1e-3"]
    assert main(["pipeline", *args, "--out", str(tmp_path / "a")]) == 0
    assert main(["pipeline", *args, "--out", str(tmp_path / "b")]) == 0
    a, b = mode_files(tmp_path / "a"), mode_files(tmp_path / "b")
    assert len(a) == 4 and a == b
    assert main(["pipeline", *WEAK_FAST, "--lmax", "1", "--seed", "8", "--noise-sigma", "1e-3", "--out", str(tmp_path / "c")]) == 0
    assert mode_files(tmp_path / "c") != a


def test_manifest_deterministic_modulo_timestamp(tmp_path):
    for name in ("a", "b"):
        assert main(["pipeline", *WEAK_FAST, "--out", str(tmp_path / name)]) == 0
    ma, mb = read_json(tmp_path / "a" / "manifest.json"), read_json(tmp_path / "b" / "manifest.json")
    ma.pop("created"), mb.pop("created")
    assert ma == mb


@pytest.mark.parametrize(
    "argv",
    [
        ["pipeline", "--model", "strong", "--gamma", "2"],
        ["pipeline", "--model", "weak", "--delta", "2"],
        ["pipeline", "--model", "viscous"],
        ["pipeline", "--model", "strong", "--delta", "-1"],
        ["pipeline", "--reg-param", "0"],
        ["pipeline", "--phantom", "expr"],
        ["pipeline", "--lmax", "-1"],
    ],
)
def test_config_errors(tmp_path, capsys, argv):
    out = tmp_path / "run"
    assert main([*argv, "--out", str(out)]) == 2
    record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert record["status"] == "error" and record["code"] == 2
    assert read_json(out / "error.json") == record


def test_branch_point_on_grid_is_config_error(tmp_path):
    # one node per panel at the panel midpoint 6 = 2/delta
    assert main(["kernel", "--delta", str(1 / 3), "--panels", "1", "--order", "1", "--out", str(tmp_path)]) == 2


def test_config_file_overrides_flags(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"model": "weak", "gamma": 1.0, "panels": 8, "order": 8, "lmax": 0}))
    out = tmp_path / "run"
    assert main(["pipeline", "--model", "strong", "--lmax", "3", "--config", str(cfg), "--out", str(out)]) == 0
    manifest = read_json(out / "manifest.json")
    assert manifest["kernel"]["model"] == "weak"
    assert manifest["config"]["lmax"] == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"modle": "weak"}))
    assert main(["pipeline", "--config", str(bad), "--out", str(out)]) == 2
    bad.write_text("{not json")
    assert main(["pipeline", "--config", str(bad), "--out", str(out)]) == 2


def test_stages_and_reuse(tmp_path):
    out = str(tmp_path)
    for stage in ("simulate", "kernel", "decompose", "invert"):
        assert main([stage, *WEAK_FAST, "--out", out]) == 0
    first = read_json(tmp_path / "report.json")
    gram = tmp_path / "gram_0.csv"
    stamp = gram.stat().st_mtime_ns
    assert main(["invert", *WEAK_FAST, "--out", out]) == 0
    assert gram.stat().st_mtime_ns == stamp
    assert read_json(tmp_path / "report.json") == first
    # a different kernel configuration must not reuse stale matrices
    assert main(["kernel", *WEAK_FAST, "--alpha", "0.5", "--out", out]) == 0
    assert gram.stat().st_mtime_ns != stamp


def test_tampered_gram_is_rebuilt(tmp_path):
    out = str(tmp_path)
    assert main(["pipeline", *WEAK_FAST, "--out", out]) == 0
    gram = tmp_path / "gram_0.csv"
    original = gram.read_bytes()
    gram.write_text("# 1 1\n0.0\n")
    assert main(["kernel", *WEAK_FAST, "--out", out]) == 0
    assert gram.read_bytes() == original


def test_invert_without_data_is_io_error(tmp_path, capsys):
    assert main(["invert", *WEAK_FAST, "--out", str(tmp_path)]) == 4
    assert json.loads(capsys.readouterr().err.strip())["code"] == 4


def test_malformed_mode_file_is_io_error(tmp_path):
    assert main(["simulate", *WEAK_FAST, "--out", str(tmp_path)]) == 0
    (tmp_path / "mode_0_0_u.csv").write_text("# 2 3\n0,1,2\n1,2\n")
    assert main(["invert", *WEAK_FAST, "--out", str(tmp_path)]) == 4
