import json

import numpy as np
import pytest

from hodgesolve import io
from hodgesolve.cli import main


@pytest.fixture(scope="module")
def pd2_file(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    assert main(["generate", "punctured_disk", "--size", "2", "--out", str(d / "pd2.scx")]) == 0
    cx = io.read_complex(d / "pd2.scx")
    b = np.random.default_rng(0).standard_normal(cx.count(1, "K"))
    (d / "b.json").write_text(json.dumps({"dim": 1, "scope": "K", "values": b.tolist()}))
    return d


def _report(capsys):
    return json.loads(capsys.readouterr().out)


def test_generate_ball1(tmp_path, capsys):
    assert main(["generate", "ball", "--size", "1", "--out", str(tmp_path / "b.scx")]) == 0
    r = _report(capsys)
    assert sum(r["counts_X"]) == 15 and r["collapse_valid"]


def test_generate_punctured_disk_beta(pd2_file, capsys):
    assert main(["generate", "punctured_disk", "--size", "2", "--out", str(pd2_file / "again.scx")]) == 0
    assert _report(capsys)["beta1_K"] == {"measured": 2, "requested": 2}


def test_generate_is_deterministic(tmp_path, capsys):
    for name in ("a", "b"):
        main(["generate", "ball", "--size", "12", "--seed", "5", "--out", str(tmp_path / name)])
    capsys.readouterr()
    assert (tmp_path / "a").read_text() == (tmp_path / "b").read_text()


def test_validate(pd2_file, capsys):
    assert main(["validate", "--complex", str(pd2_file / "pd2.scx")]) == 0
    assert _report(capsys)["collapse"]["ok"]


def test_validate_bad_sequence(pd2_file, tmp_path, capsys):
    raw = json.loads((pd2_file / "pd2.scx").read_text())
    raw["collapses"] = raw["collapses"][1:] + raw["collapses"][:1]
    p = tmp_path / "bad.scx"
    p.write_text(json.dumps(raw))
    assert main(["validate", "--complex", str(p)]) == 2
    assert _report(capsys)["status"] == "validation_error"


def test_bases_and_harmonic(pd2_file, capsys):
    assert main(["bases", "--complex", str(pd2_file / "pd2.scx"), "--verify"]) == 0
    r = _report(capsys)
    assert len(r["homology"]["chains"]) == 2 and r["delta_independence"]["ok"]
    assert main(["harmonic-basis", "--complex", str(pd2_file / "pd2.scx"), "--eps", "0.01", "--verify"]) == 0
    r = _report(capsys)
    assert r["projection_error"]["measured"] <= r["projection_error"]["bound"]


def test_hodge_and_solve(pd2_file, tmp_path, capsys):
    args = ["--complex", str(pd2_file / "pd2.scx"), "--chain", str(pd2_file / "b.json")]
    assert main(["hodge", *args, "--eps", "0.01", "--verify"]) == 0
    assert all(v["ok"] for v in _report(capsys)["verify"].values())
    assert main(["solve", *args, "--verify", "--out", str(tmp_path / "x.json")]) == 0
    r = _report(capsys)
    assert r["verify"]["ok"] and "solution" not in r
    assert len(json.loads((tmp_path / "x.json").read_text())["values"]) == 51


def test_audit_command(pd2_file, tmp_path, capsys):
    out = tmp_path / "audit.json"
    assert main(["audit", "--complex", str(pd2_file / "pd2.scx"), "--trials", "5", "--out", str(out)]) == 0
    r = json.loads(out.read_text())
    assert r["status"] == "ok" and r["norms"]["ok"] and r["seed"] == 0


def test_exit_codes(pd2_file, tmp_path, capsys):
    assert main(["solve", "--complex", str(tmp_path / "none.scx"), "--chain", "x"]) == 4
    (tmp_path / "short.json").write_text(json.dumps({"dim": 1, "values": [1.0]}))
    assert main(["solve", "--complex", str(pd2_file / "pd2.scx"), "--chain", str(tmp_path / "short.json")]) == 2
    assert main(["solve", "--complex", str(pd2_file / "pd2.scx")]) == 2
    capsys.readouterr()


def test_verification_failure_exit_code(pd2_file, tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    # forcing a far too coarse boundary delta breaks the Hodge error bound
    cfg.write_text(json.dumps({"boundary": {"delta": 0.9}}))
    args = ["--complex", str(pd2_file / "pd2.scx"), "--chain", str(pd2_file / "b.json")]
    assert main(["hodge", *args, "--eps", "0.001", "--verify", "--config", str(cfg)]) == 3
    assert _report(capsys)["status"] == "verification_failed"
