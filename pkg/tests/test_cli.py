import json
import subprocess
import sys

import pytest

from shadelift.cli import main

ROTATION = """\
disk 0 points 4 star 0
disk 1 points 4 star 0
arc 0.0 1.3
arc 0.1 1.0
arc 0.2 1.1
arc 0.3 1.2
"""


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


@pytest.fixture(autouse=True)
def _no_format_env(monkeypatch):
    monkeypatch.delenv("SHADELIFT_FORMAT", raising=False)


def test_classify(capsys):
    code, data = run_json(capsys, "classify-bicharacters", "--group", "2,2", "--filter", "symmetric-nondegenerate")
    assert code == 0
    assert data["orbit_count"] == 2 and data["count"] == 4
    assert data["schema"] == "shadelift.classify-bicharacters/1"


def test_verify_duality(capsys):
    code, data = run_json(capsys, "verify-duality", "--group", "4", "--chi", "1,1=1/4", "--check", "symmetric")
    assert code == 0
    assert all(data["checks"].values()) and len(data["checks"]) == 5
    assert data["symmetric"] is True


def test_verify_duality_star(capsys):
    code, data = run_json(capsys, "verify-duality", "--group", "3,3", "--chi", "1,2=1/3;2,1=2/3")
    assert code == 0 and data["ok"]


def test_verify_duality_chi_file(capsys, tmp_path):
    path = tmp_path / "chi.json"
    path.write_text(json.dumps({"group": [2], "phases": [["1/2"]]}))
    code, data = run_json(capsys, "verify-duality", "--group", "2", "--chi-file", str(path))
    assert code == 0 and data["ok"]


def test_degenerate_chi_fails(capsys):
    code, _, _ = run(capsys, "verify-duality", "--group", "2", "--chi", "1,1=0")
    assert code == 1


def test_bigraph(capsys):
    code, out, _ = run(capsys, "bigraph", "norm", "bwd1duals1")
    assert code == 0 and float(out) == 1.0
    code, data = run_json(capsys, "bigraph", "parse", "bwd1v1v1p1p1v1x0x0p0x1x0duals1v1v2x1")
    assert code == 0 and data["levels"] == [1, 1, 1, 3, 2] and data["roundtrip"]
    code, out, _ = run(capsys, "bigraph", "parse", "bwd1duals1", "--format", "dot")
    assert code == 0 and out.startswith("graph")


def test_usage_errors(capsys):
    assert run(capsys, "bigraph", "parse", "bwdx")[0] == 2
    assert run(capsys, "classify-bicharacters", "--group", "a,b")[0] == 2
    assert run(capsys, "verify-duality", "--group", "2", "--chi", "9,9=1/2")[0] == 2
    assert run(capsys, "no-such-command")[0] == 2
    assert run(capsys)[0] == 2


def test_lift_check_deterministic(capsys):
    argv = ("lift-check", "--group", "2", "--trials", "8", "--seed", "4", "--json")
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2
    data = json.loads(out1)
    assert data["ok"] and data["results"][0]["cases"] == {"+": 4, "-": 4}


def test_lift_check_threads_same_output(capsys):
    base = ("lift-check", "--group", "2,2", "--trials", "4", "--seed", "2", "--json")
    _, one, _ = run(capsys, *base)
    _, two, _ = run(capsys, *base, "--threads", "2")
    assert one == two


def test_ty(capsys):
    code, data = run_json(capsys, "ty", "classify", "--group", "4")
    assert code == 0 and data["count"] == 4
    code, data = run_json(capsys, "ty", "indicators", "--group", "4", "--sign", "-")
    assert code == 0
    assert [data["nu2"][k] for k in "0123"] == [1, 0, 1, 0]
    assert data["factor_planar_algebra_admissible"] is False


def test_env_format(capsys, monkeypatch):
    monkeypatch.setenv("SHADELIFT_FORMAT", "json")
    code, out, _ = run(capsys, "bigraph", "norm", "bwd1duals1")
    assert code == 0 and json.loads(out)["norm"] == 1.0
    monkeypatch.setenv("SHADELIFT_FORMAT", "yaml")
    assert run(capsys, "bigraph", "norm", "bwd1duals1")[0] == 2


def test_tangle_commands(capsys, tmp_path):
    f = tmp_path / "rot.tangle"
    f.write_text(ROTATION)
    code, data = run_json(capsys, "tangle", "validate", str(f))
    assert code == 0 and data["valid"]
    code, data = run_json(capsys, "tangle", "shade", str(f))
    assert code == 0 and data["signs"] == ["+", "-"]
    code, data = run_json(capsys, "tangle", "compose", str(f), "--disk", "1", "--with", str(f))
    assert code == 0 and len(data["tangle"]["disks"]) == 2
    code, data = run_json(capsys, "tangle", "eval", str(f), "--group", "2", "--box", "Q(1)")
    assert code == 0 and data["result"]["side"] == "+"


def test_tangle_invalid(capsys, tmp_path):
    f = tmp_path / "bad.tangle"
    f.write_text("disk 0 points 4 star 0\narc 0.0 0.2\narc 0.1 0.3\n")
    code, out, _ = run(capsys, "tangle", "validate", str(f))
    assert code == 1 and "nonplanar" in out
    f.write_text("disk 0 points 4 star 0\narc 0.0 zz\n")
    code, _, err = run(capsys, "tangle", "validate", str(f))
    assert code == 2 and "line 2, col 9" in err


def test_console_script_exit_code():
    proc = subprocess.run(
        [sys.executable, "-m", "shadelift.cli", "bigraph", "norm", "bwd1duals1x"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2
