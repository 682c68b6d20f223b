import json
import subprocess
import sys

import numpy as np
import pytest

from exball_nls import cli

SMALL = {
    "spec_version": 1,
    "grid": {"L": 16, "M": 256},
    "evolution": {"p": 4, "dt": 0.01, "t_end": 0.4, "snapshot_stride": 4},
    "etas": {"eta0": 0.3, "eta1": 0.01, "eta2": 0.001, "eta3": 0.0001},
    "initial_condition": {"family": "gaussian", "amplitude": 1.0, "width": 1.0},
    "diagnostics": {"R": [2, 4], "A": [1, 2], "morawetz_windows": [[0.0, 0.4]]},
    "seed": 0,
}


def write_config(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def variant(**sections):
    cfg = json.loads(json.dumps(SMALL))
    for key, val in sections.items():
        if isinstance(val, dict) and isinstance(cfg.get(key), dict):
            cfg[key].update(val)
        else:
            cfg[key] = val
    return cfg


@pytest.fixture
def small_run_dir(tmp_path):
    out = tmp_path / "run"
    assert cli.main(["--quiet", "--out", str(out), "evolve", write_config(tmp_path, SMALL)]) == 0
    return out


def test_evolve_writes_run(small_run_dir):
    manifest = json.loads((small_run_dir / "manifest.json").read_text())
    assert len(manifest["snapshots"]) == 11
    header = (small_run_dir / "diagnostics.csv").read_text().splitlines()[0]
    assert header == "t,mass,energy,boundary_mass,M_R=2,M_R=4"


def test_evolve_deterministic(tmp_path):
    cfg = write_config(tmp_path, SMALL)
    for name in ("a", "b"):
        assert cli.main(["--quiet", "--out", str(tmp_path / name), "evolve", cfg]) == 0
    for f in ("manifest.json", "diagnostics.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_evolve_default_config(tmp_path, capsys):
    assert cli.main(["--out", str(tmp_path / "d"), "evolve", "default"]) == 0
    out = capsys.readouterr().out
    drift = float(out.split("energy drift:")[1].split()[0])
    assert drift < 1e-5


@pytest.mark.parametrize("analysis", ["intervals", "morawetz", "scatter"])
def test_analyze(small_run_dir, analysis):
    assert cli.main(["--quiet", "analyze", str(small_run_dir), analysis]) == 0
    report = json.loads((small_run_dir / "report.json").read_text())
    assert analysis in report


def test_analyze_outputs(small_run_dir):
    for a in ("intervals", "morawetz", "scatter"):
        assert cli.main(["--quiet", "analyze", str(small_run_dir), a]) == 0
    report = json.loads((small_run_dir / "report.json").read_text())
    assert set(report) == {"intervals", "morawetz", "scatter"}
    defects = np.loadtxt(small_run_dir / "cauchy_defect.csv", delimiter=",", skiprows=1)
    assert defects.shape == (4, 3)
    assert (small_run_dir / "v_plus.bin").stat().st_size == 257 * 16


def test_analyze_corrupted_run(small_run_dir):
    path = small_run_dir / "snapshots" / "000003.bin"
    raw = bytearray(path.read_bytes())
    raw[100] ^= 0xFF
    path.write_bytes(bytes(raw))
    assert cli.main(["--quiet", "analyze", str(small_run_dir), "intervals"]) == 4


def test_analyze_missing_snapshot(small_run_dir):
    (small_run_dir / "snapshots" / "000000.bin").unlink()
    assert cli.main(["--quiet", "analyze", str(small_run_dir), "morawetz"]) == 4


@pytest.mark.parametrize("cfg", [
    variant(colour="blue"),
    variant(evolution={"dt": -1.0}),
    variant(evolution={"snapshot_stride": 0}),
    variant(grid={"M": 255}),
    variant(etas={"eta0": 2.0}),
    variant(spec_version=2),
    variant(evolution={"gamma": 1}),
    variant(initial_condition={"family": "tabulated", "re": [1.0] * 257}),
    variant(initial_condition={"family": "vortex"}),
])
def test_bad_config_exit_2(tmp_path, cfg, capsys):
    assert cli.main(["--quiet", "--out", str(tmp_path / "x"), "evolve", write_config(tmp_path, cfg)]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_error_names_field(tmp_path, capsys):
    cli.main(["--quiet", "evolve", write_config(tmp_path, variant(evolution={"dt": -1.0}))])
    assert "evolution.dt" in capsys.readouterr().err


def test_missing_and_malformed_config(tmp_path):
    assert cli.main(["--quiet", "evolve", str(tmp_path / "nope.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["--quiet", "evolve", str(bad)]) == 2


def test_numerical_abort_exit_3(tmp_path):
    cfg = variant(evolution={"p": 400, "dt": 0.01, "t_end": 0.04, "snapshot_stride": 1, "dealias_factor": 201},
                  initial_condition={"family": "gaussian", "amplitude": 1000.0, "width": 0.2})
    assert cli.main(["--quiet", "--out", str(tmp_path / "x"), "evolve", write_config(tmp_path, cfg)]) == 3


def test_budget_exit_3(tmp_path):
    cfg = variant(evolution={"t_end": 20.0, "snapshot_stride": 50})
    with pytest.warns(UserWarning):
        code = cli.main(["--quiet", "--out", str(tmp_path / "x"), "evolve", write_config(tmp_path, cfg)])
    assert code == 3
    # the trusted part is still written
    assert (tmp_path / "x" / "manifest.json").is_file()


def test_check_suites_exit_codes():
    assert cli.main(["--quiet", "check", "transform"]) == 0
    # the dispersive range criterion is not met by the kernel, so the suite reports failure
    assert cli.main(["--quiet", "check", "dispersive"]) == 1


def test_check_prints_lines(capsys):
    cli.main(["check", "transform"])
    lines = capsys.readouterr().out.splitlines()
    assert lines and all(line.split()[0] in ("PASS", "FAIL", "INFO") for line in lines)


def test_unknown_suite_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        cli.main(["check", "everything"])
    assert exc.value.code == 2


def test_threads(monkeypatch):
    assert cli.main(["--quiet", "--threads", "0", "check", "transform"]) == 2
    monkeypatch.setenv("EXBALL_NLS_THREADS", "two")
    assert cli.main(["--quiet", "check", "transform"]) == 2
    monkeypatch.setenv("EXBALL_NLS_THREADS", "2")
    assert cli.main(["--quiet", "check", "transform"]) == 0


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "exball_nls", "--quiet", "check", "transform"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
