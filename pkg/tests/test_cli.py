import json
import subprocess
import sys

import pytest

from mpshell.cli import EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_IO, EXIT_OK, main
from mpshell.config import benchmark_config
from mpshell.output import read_curve


def _write(tmp_path, raw, name="m.json"):
    p = tmp_path / name
    p.write_text(json.dumps(raw))
    return str(p)


def _small_strip(**extra):
    raw = benchmark_config("strip", nx=4, ny=1)
    raw["magnetics"] = {"steps": 2}
    raw.update(extra)
    return raw


def test_run_writes_outputs(tmp_path, capsys):
    cfg = _write(tmp_path, _small_strip())
    out = tmp_path / "out"
    assert main(["run", cfg, "--out", str(out)]) == EXIT_OK
    assert "T: u=" in capsys.readouterr().out
    curve = read_curve(out / "curve.csv")
    assert curve["T"].shape == (3, 6)
    assert (out / "snapshot_1.0000.vtk").exists() and (out / "iterations.log").exists()


def test_config_error_exit(tmp_path, capsys):
    raw = _small_strip()
    del raw["material"]["mu"]
    assert main(["run", _write(tmp_path, raw), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    assert "material.mu" in capsys.readouterr().err


def test_convergence_exit(tmp_path):
    raw = _small_strip(solver={"max_iter": 1, "min_step": 0.3})
    raw["magnetics"] = {"steps": 1}
    out = tmp_path / "o"
    assert main(["run", _write(tmp_path, raw), "--out", str(out)]) == EXIT_CONVERGENCE
    # the partial curve (reference state) and the iteration log survive
    assert read_curve(out / "curve.csv")["T"].shape == (1, 6)
    assert (out / "iterations.log").read_text().startswith("step iteration")


def test_io_error_exit(tmp_path):
    assert main(["run", str(tmp_path / "missing.json")]) == EXIT_IO
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["run", _write(tmp_path, _small_strip()), "--out", str(blocker)]) == EXIT_IO


def test_schema_command(capsys):
    assert main(["schema"]) == EXIT_OK
    s = json.loads(capsys.readouterr().out)
    assert s["$schema"].startswith("http://json-schema.org/draft-07")


def test_benchmark_write_config(tmp_path):
    p = tmp_path / "c.json"
    assert main(["benchmark", "cross", "--param", "n_per_mm=0.5", "--write-config", str(p)]) == EXIT_OK
    raw = json.loads(p.read_text())
    assert raw["geometry"] == {"benchmark": "cross", "params": {"n_per_mm": 0.5}}
    assert main(["benchmark", "strip", "--param", "colour=red", "--write-config", str(p)]) == EXIT_CONFIG


def test_benchmark_run(tmp_path):
    out = tmp_path / "b"
    argv = ["benchmark", "strip", "--param", "nx=4", "--param", "ny=1", "--steps", "2", "--out", str(out)]
    assert main(argv) == EXIT_OK
    assert read_curve(out / "curve.csv")["T"][-1, 1] == pytest.approx(50.0)


@pytest.mark.parametrize("name", ["strip", "cylinder"])
def test_verify_tangent(tmp_path, capsys, name):
    params = {"nx": 4, "ny": 1} if name == "strip" else {"n_circ": 8, "n_axial": 2, "n_blocks": 8}
    cfg = _write(tmp_path, benchmark_config(name, **params))
    assert main(["verify-tangent", cfg, "--elements", "2"]) == EXIT_OK
    assert "PASS" in capsys.readouterr().out


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "mpshell.cli", "schema"], capture_output=True, text=True)
    assert r.returncode == 0 and '"title": "mpshell model"' in r.stdout
