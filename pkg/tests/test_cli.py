"""CLI verbs: argument handling, exit codes, artifact side effects."""
import json
import os

import pytest

from ebeamsim.cli import main


def write_scenario(path, **over):
    sc = {
        "schema_version": "1",
        "name": "cli-t",
        "physics": {"voltage": 20e3, "current": 0.0},
        "kind": "gaussian",
        "size": {"width_nm": 5.0},
        "grid": {"n": 128},
        "propagation": {"ds": 50.0, "s_max": 300.0, "record_stride": 4,
                        "stop_width_factor": None},
    }
    sc.update(over)
    path.write_text(json.dumps(sc))
    return str(path)


def test_presets_lists_known_scenarios(capsys):
    assert main(["presets"]) == 0
    out = capsys.readouterr().out
    assert "fig3e" in out
    assert "shape-preserving" in out
    assert "sweep" in out  # fig4 row is tagged


def test_solve_prints_size_resolution(tmp_path, capsys):
    f = write_scenario(tmp_path / "s.json")
    assert main(["solve", "--scenario", f,
                 "--outdir", str(tmp_path / "out")]) == 0
    out = capsys.readouterr().out
    assert "sigma=" in out and "width=5" in out


def test_propagate_writes_summary_and_reports_censored(tmp_path, capsys):
    f = write_scenario(tmp_path / "s.json")
    d = tmp_path / "out"
    assert main(["propagate", "--scenario", f, "--outdir", str(d)]) == 0
    out = capsys.readouterr().out
    assert "censored" in out  # s_max = 300 ends before the sqrt(2) crossing
    assert os.path.exists(d / "summary.json")
    assert os.path.exists(d / "trace.csv")


def test_profile_env_default(tmp_path, monkeypatch):
    monkeypatch.setenv("EBEAMSIM_PROFILE", "full")
    f = write_scenario(tmp_path / "s.json")
    d = tmp_path / "out"
    assert main(["propagate", "--scenario", f, "--outdir", str(d)]) == 0
    s = json.loads((d / "summary.json").read_text())
    assert s["profile"] == "full"


def test_report_reads_finished_directory(tmp_path, capsys):
    f = write_scenario(tmp_path / "s.json")
    d = tmp_path / "out"
    main(["propagate", "--scenario", f, "--outdir", str(d)])
    capsys.readouterr()
    assert main(["report", str(d)]) == 0
    assert "cli-t" in capsys.readouterr().out


def test_report_empty_directory_fails(tmp_path, capsys):
    assert main(["report", str(tmp_path)]) == 1
    assert "no summary" in capsys.readouterr().err


def test_unknown_preset_exits_2(capsys):
    assert main(["propagate", "--preset", "nope", "--outdir", "/tmp/x"]) == 2
    assert "error:" in capsys.readouterr().err


def test_invalid_scenario_file_exits_2(tmp_path, capsys):
    f = tmp_path / "bad.json"
    f.write_text("{not json")
    assert main(["propagate", "--scenario", str(f),
                 "--outdir", str(tmp_path / "o")]) == 2
    assert "error:" in capsys.readouterr().err


def test_mask_requires_radial_profile_kind(tmp_path, capsys):
    f = write_scenario(tmp_path / "s.json", mask={"n": 256})
    assert main(["mask", "--scenario", f,
                 "--outdir", str(tmp_path / "o")]) == 2
    assert "radial-profile" in capsys.readouterr().err


def test_sweep_requires_sweep_section(tmp_path, capsys):
    f = write_scenario(tmp_path / "s.json")
    assert main(["sweep", "--scenario", f,
                 "--outdir", str(tmp_path / "o")]) == 2
    assert "sweep" in capsys.readouterr().err


def test_scenario_and_preset_mutually_exclusive(tmp_path):
    f = write_scenario(tmp_path / "s.json")
    with pytest.raises(SystemExit):
        main(["propagate", "--scenario", f, "--preset", "fig3a",
              "--outdir", str(tmp_path / "o")])
