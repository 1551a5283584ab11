"""Command-line interface: subcommands, settings precedence, exit codes."""

import json

import pytest

from cstarlab.cli import main
from cstarlab.instances import Instance, base_algebra
from cstarlab.serialize import load


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for var in ("CSTARLAB_SEED", "CSTARLAB_EPS", "CSTARLAB_ALGEBRA",
                "CSTARLAB_CONFIG", "CSTARLAB_FORMAT", "CSTARLAB_TRACK"):
        monkeypatch.delenv(var, raising=False)


def test_algebra_comma_sizes():
    A = base_algebra("2,1", 4)
    assert A.dim == 5
    assert A.ambient_dim == 4


def test_gen_writes_instance(tmp_path):
    out = tmp_path / "inst.json"
    rc = main(["gen", "--seed", "3", "--eps", "1e-5", "--out", str(out)])
    assert rc == 0
    inst = load(out)
    assert isinstance(inst, Instance)
    assert inst.seed == 3
    assert inst.params["eps"] == 1e-5


def test_dist_pipeline_json_output(tmp_path):
    out = tmp_path / "report.json"
    rc = main(["dist", "--seed", "2", "--eps", "1e-5",
               "--format", "json", "--out", str(out)])
    assert rc == 0
    data = json.loads(out.read_text())
    assert data["kind"] == "report"
    assert data["pipeline"] == "dist"
    assert data["ok"] is True


def test_pipeline_accepts_saved_instance(tmp_path):
    inst_path = tmp_path / "inst.json"
    rep_path = tmp_path / "report.json"
    assert main(["gen", "--seed", "5", "--eps", "1e-5",
                 "--out", str(inst_path)]) == 0
    rc = main(["dist", str(inst_path), "--seed", "5",
               "--format", "json", "--out", str(rep_path)])
    assert rc == 0
    assert json.loads(rep_path.read_text())["ok"] is True


def test_pipeline_rejects_report_as_instance(tmp_path, capsys):
    rep_path = tmp_path / "report.json"
    assert main(["dist", "--seed", "1", "--eps", "1e-5",
                 "--format", "json", "--out", str(rep_path)]) == 0
    rc = main(["iso", str(rep_path)])
    assert rc == 2
    assert "does not contain an instance" in capsys.readouterr().err


def test_report_rerenders_saved_report(tmp_path, capsys):
    rep_path = tmp_path / "report.json"
    assert main(["unitary", "--seed", "4", "--eps", "1e-5",
                 "--format", "json", "--out", str(rep_path)]) == 0
    rc = main(["report", str(rep_path), "--format", "csv"])
    assert rc == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "certificate,verdict,achieved,ceiling,slack"


def test_report_rejects_instance_file(tmp_path, capsys):
    inst_path = tmp_path / "inst.json"
    assert main(["gen", "--seed", "1", "--out", str(inst_path)]) == 0
    rc = main(["report", str(inst_path)])
    assert rc == 2
    assert "pipeline report" in capsys.readouterr().err


def test_env_overrides_default(tmp_path, monkeypatch):
    monkeypatch.setenv("CSTARLAB_EPS", "1e-6")
    out = tmp_path / "inst.json"
    assert main(["gen", "--seed", "1", "--out", str(out)]) == 0
    inst = load(out)
    assert inst.params["eps"] == 1e-6


def test_flag_beats_env_beats_config(tmp_path, monkeypatch):
    cfg = tmp_path / "lab.ini"
    cfg.write_text("[lab]\nseed = 5\neps = 1e-3\n")
    # config only
    out1 = tmp_path / "i1.json"
    assert main(["gen", "--config", str(cfg), "--out", str(out1)]) == 0
    assert load(out1).seed == 5
    # env beats config
    monkeypatch.setenv("CSTARLAB_SEED", "6")
    out2 = tmp_path / "i2.json"
    assert main(["gen", "--config", str(cfg), "--out", str(out2)]) == 0
    assert load(out2).seed == 6
    # flag beats both
    out3 = tmp_path / "i3.json"
    assert main(["gen", "--config", str(cfg), "--seed", "7",
                 "--out", str(out3)]) == 0
    assert load(out3).seed == 7


def test_config_via_env_var(tmp_path, monkeypatch):
    cfg = tmp_path / "lab.ini"
    cfg.write_text("[lab]\nalgebra = diag3\n")
    monkeypatch.setenv("CSTARLAB_CONFIG", str(cfg))
    out = tmp_path / "inst.json"
    assert main(["gen", "--out", str(out)]) == 0
    assert load(out).A.dim == 3


def test_missing_config_exits_2(capsys):
    rc = main(["gen", "--config", "/nonexistent/lab.ini"])
    assert rc == 2
    assert "config file not found" in capsys.readouterr().err


def test_paper_track_window_violation_exits_2(capsys):
    rc = main(["iso", "--seed", "1", "--eps", "1e-3", "--track", "paper"])
    assert rc == 2
    err = capsys.readouterr().err
    assert "WindowError" in err


def test_unknown_algebra_exits_2(capsys):
    rc = main(["gen", "--algebra", "M17"])
    assert rc == 2
    assert "unknown algebra profile" in capsys.readouterr().err


def test_selftest_single_criterion(capsys):
    rc = main(["selftest", "--criteria", "3"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "PASS criterion 3" in out


def test_selftest_unknown_criterion(capsys):
    rc = main(["selftest", "--criteria", "99"])
    assert rc == 2
    err = capsys.readouterr().err
    assert "unknown criterion 99" in err
