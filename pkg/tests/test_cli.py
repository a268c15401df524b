import numpy as np
import pytest
from click.testing import CliRunner

from mixwave.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def write_tiny_config(path, out_dir, extra=""):
    path.write_text(
        "grid.I = 6\n"
        "grid.J = 6\n"
        "material.a11 = 1.0\n"
        "material.a12 = 0.1\n"
        "material.a22 = 1.0\n"
        "material.coupling = 1.0\n"
        "material.alpha = 0.5\n"
        "material.eta = 0.5\n"
        "diffusive.modes = 8\n"
        "diffusive.dxi = 0.25\n"
        "newmark.dt = 0.02\n"
        "time.final = 0.2\n"
        "init.preset = gaussian-pair\n"
        f"output.dir = {out_dir}\n" + extra
    )
    return path


class TestPresetCommand:
    def test_prints_fully_explicit_config(self, runner):
        result = runner.invoke(main, ["preset", "example3-reduced"])
        assert result.exit_code == 0
        assert "init.u0 = cone(0.5, 0.5, 0.1)" in result.output
        assert "material.eta = 1.0" in result.output

    def test_emits_loadable_file(self, runner, tmp_path):
        target = tmp_path / "cfg.txt"
        result = runner.invoke(main, ["preset", "example2-reduced", "--emit", str(target)])
        assert result.exit_code == 0
        from mixwave import load_config, preset

        assert load_config(target) == preset("example2-reduced")

    def test_rejects_unknown_name(self, runner):
        result = runner.invoke(main, ["preset", "example7"])
        assert result.exit_code != 0


class TestSimulateCommand:
    def test_runs_and_reports(self, runner, tmp_path):
        cfg = write_tiny_config(tmp_path / "cfg.txt", tmp_path / "out")
        result = runner.invoke(main, ["simulate", str(cfg)])
        assert result.exit_code == 0, result.output
        assert "steps: 10" in result.output
        assert (tmp_path / "out" / "energy.csv").exists()
        assert (tmp_path / "out" / "energy_linear.csv").exists()

    def test_strict_mode_rejects_unknown_keys(self, runner, tmp_path):
        cfg = write_tiny_config(tmp_path / "cfg.txt", tmp_path / "out", extra="grid.K = 2\n")
        result = runner.invoke(main, ["simulate", str(cfg)])
        assert result.exit_code != 0
        ok = runner.invoke(main, ["simulate", str(cfg), "--no-strict"])
        assert ok.exit_code == 0, ok.output


class TestSpectrumCommand:
    def test_dense_csv(self, runner, tmp_path):
        cfg = write_tiny_config(tmp_path / "cfg.txt", tmp_path / "out", extra="diffusive.modes = 2\n")
        result = runner.invoke(main, ["spectrum", str(cfg), "--dense"])
        assert result.exit_code == 0, result.output
        csv = (tmp_path / "out" / "spectrum.csv").read_text()
        rows = csv.strip().split("\n")[1:]
        assert all(float(r.split(",")[0]) < 0 for r in rows)

    def test_krylov_flags(self, runner, tmp_path):
        cfg = write_tiny_config(tmp_path / "cfg.txt", tmp_path / "out", extra="diffusive.modes = 2\n")
        result = runner.invoke(main, ["spectrum", str(cfg), "--krylov", "--k", "4", "--seed", "9"])
        assert result.exit_code == 0, result.output
        rows = (tmp_path / "out" / "spectrum.csv").read_text().strip().split("\n")[1:]
        assert len(rows) == 4


class TestDecayFitCommand:
    def test_fits_synthetic_series(self, runner, tmp_path):
        from mixwave import io
        from mixwave.integrator import EnergyRecord

        t = np.logspace(1, 3, 100)
        records = [EnergyRecord(ti, 0, 0, 0, 7.0 / ti**2, "s") for ti in t]
        csv = io.write_energy_csv(tmp_path / "e.csv", records)
        result = runner.invoke(
            main, ["decay-fit", str(csv), "--window", "10,1000", "--alpha", "0.5"]
        )
        assert result.exit_code == 0, result.output
        assert "slope: -2.000000" in result.output
        assert "reference slope -2.0000" in result.output

    def test_bad_window_syntax(self, runner, tmp_path):
        p = tmp_path / "e.csv"
        p.write_text("t,kinetic,elastic,diffusive,total\n1,0,0,0,1\n")
        result = runner.invoke(main, ["decay-fit", str(p), "--window", "ten", "--alpha", "0.5"])
        assert result.exit_code != 0

    def test_insufficient_data_fails_cleanly(self, runner, tmp_path):
        p = tmp_path / "e.csv"
        rows = "\n".join(f"{t},0,0,0,1" for t in (1, 2, 3))
        p.write_text(f"t,kinetic,elastic,diffusive,total\n{rows}\n")
        result = runner.invoke(main, ["decay-fit", str(p), "--window", "1,3", "--alpha", "0.5"])
        assert result.exit_code == 1
        assert "at least 10" in result.output
        assert "Traceback" not in result.output


class TestOracleCommand:
    def test_table_matches_analytic_value(self, runner):
        result = runner.invoke(
            main,
            ["oracle", "--alpha", "0.5", "--f", "identity", "--modes", "1000",
             "--dxi", "0.1", "--dt", "0.01", "--t-final", "1.0", "--rows", "4"],
        )
        assert result.exit_code == 0, result.output
        lines = result.output.strip().split("\n")
        assert lines[0] == "t,diffusive,analytic,rel_error"
        last = lines[-1].split(",")
        assert float(last[0]) == pytest.approx(1.0)
        assert float(last[2]) == pytest.approx(2 / np.sqrt(np.pi), rel=1e-9)
        assert float(last[3]) < 0.05
