import json
import subprocess
import sys

import pytest

from jbstar.cli import main, read_config_file
from jbstar.errors import ConfigError


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_passes_and_is_deterministic(capsys):
    argv = ["verify", "--suite", "fundamental-identity", "--suite", "jb-axiom", "--model", "matrix:2",
            "--model", "spin:3", "--trials", "5", "--seed", "7"]
    code, first, _ = run(argv, capsys)
    assert code == 0
    _, second, _ = run(argv, capsys)
    a, b = json.loads(first), json.loads(second)
    a.pop("wall_time")
    b.pop("wall_time")
    assert a == b
    assert [r["tag"] for r in a["records"]] == sorted(r["tag"] for r in a["records"])
    assert a["counts"] == {"pass": 4, "warn": 0, "fail": 0}


def test_tight_tolerance_fails_with_exit_one(capsys):
    code, out, _ = run(["verify", "--suite", "jb-axiom", "--model", "matrix:3", "--trials", "5",
                        "--tol", "jb-axiom=1e-30"], capsys)
    assert code == 1
    assert json.loads(out)["verdict"] == "fail"


@pytest.mark.parametrize("argv", [
    ["verify", "--suite", "no-such-tag"],
    ["verify", "--trials", "0"],
    ["verify", "--tol", "jb-axiom"],
    ["verify", "--tol", "nonsense=1e-3"],
    ["verify", "--tol", "jb-axiom=-1"],
    ["verify", "--format", "yaml"],
    ["verify", "--config", "/nonexistent/file.cfg"],
    ["frobnicate"],
    ["roundtrip", "--model", "matrix:2", "--target", "spin:3", "--trials", "1"],
])
def test_configuration_errors_exit_two(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert "jbstar" in err


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "job.cfg"
    cfg.write_text(
        "# sample job\n"
        "suite = power-assoc, peirce\n"
        "model = matrix:2\n"
        "trials = 3\n"
        "seed = 11\n"
        "tol.peirce = 1e-8\n"
        "format = json\n"
    )
    vals = read_config_file(str(cfg))
    assert vals["suite"] == ["power-assoc", "peirce"]
    assert vals["tol"] == ["peirce=1e-8"]
    out = tmp_path / "report.json"
    code, stdout, _ = run(["verify", "--config", str(cfg), "--trials", "4", "--out", str(out)], capsys)
    assert code == 0
    assert stdout == ""
    rep = json.loads(out.read_text())
    assert rep["config"]["trials"] == 4
    assert rep["config"]["seed"] == 11
    assert rep["config"]["tolerances"] == {"peirce": 1e-8}
    assert {r["tag"] for r in rep["records"]} == {"power-assoc", "peirce"}


def test_config_file_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("trials = many\n")
    with pytest.raises(ConfigError):
        read_config_file(str(bad))
    bad.write_text("colour = blue\n")
    with pytest.raises(ConfigError):
        read_config_file(str(bad))
    bad.write_text("just words\n")
    with pytest.raises(ConfigError):
        read_config_file(str(bad))


def test_text_format(capsys):
    code, out, _ = run(["verify", "--suite", "peirce", "--model", "spin:3", "--trials", "2",
                        "--format", "text"], capsys)
    assert code == 0
    assert "PASS" in out and "peirce" in out


def test_roundtrip_and_stone(capsys):
    code, out, _ = run(["roundtrip", "--model", "matrix:1+matrix:2", "--trials", "3"], capsys)
    assert code == 0
    rec = json.loads(out)["records"]
    assert rec[0]["tag"] == "thm-main"
    code, out, _ = run(["stone", "--model", "spin:3", "--trials", "3"], capsys)
    assert code == 0
    tags = {r["tag"]: r for r in json.loads(out)["records"]}
    assert tags["thm-stone"]["verdict"] == "pass"
    assert tags["thm-stone-fault"]["verdict"] == "pass"


def test_albert_records_are_flagged_relaxed(capsys):
    code, out, _ = run(["verify", "--suite", "jb-axiom", "--model", "albert", "--trials", "2"], capsys)
    assert code == 0
    rec = json.loads(out)["records"][0]
    assert rec["relaxed"] is True
    assert rec["tolerance"] == pytest.approx(1e-5)


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "jbstar.cli", "verify", "--suite", "peirce",
                          "--trials", "1", "--format", "text"], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
