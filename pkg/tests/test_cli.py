import csv
import json

import numpy as np
import pytest

from onrcav.cli import main, parse_detector, parse_mhz_grid, parse_power_range
from onrcav.errors import DomainError


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def read_csv_text(text):
    rows = list(csv.reader(text.strip().splitlines()))
    return rows[0], rows[1:]


class TestParsers:
    def test_linear_power_range(self):
        vals = parse_power_range("30:110:10pW")
        assert np.allclose(vals, np.arange(30, 111, 10) * 1e-12)

    def test_log_power_range(self):
        vals = parse_power_range("1:1000:4xnW")
        assert np.allclose(vals, np.array([1, 10, 100, 1000]) * 1e-9)

    def test_default_unit_is_pw(self):
        vals = parse_power_range("1:2:1")
        assert np.allclose(vals, [1e-12, 2e-12])

    def test_bad_ranges(self):
        for bad in ("1:2", "1:2:0pW", "2:1:1pW", "1:2:1xW", "a:b:c"):
            with pytest.raises(DomainError):
                parse_power_range(bad)

    def test_mhz_grid(self):
        g = parse_mhz_grid("-1:1:0.5")
        assert np.allclose(g / (2 * np.pi * 1e6), [-1, -0.5, 0, 0.5, 1])
        with pytest.raises(DomainError):
            parse_mhz_grid("5:1:0.5")

    def test_detector_spec(self):
        det = parse_detector("dark=100,eff=0.5,t=2.0")
        assert det.dark_rate == 100 and det.quantum_efficiency == 0.5
        with pytest.raises(DomainError):
            parse_detector("dark=100,eff=0.5")
        with pytest.raises(DomainError):
            parse_detector("dark=100,eff=0.5,t=2,extra=1")


class TestSubcommands:
    def test_scurve_csv(self, capsys, tmp_path):
        out = tmp_path / "fig2a.csv"
        code, _, _ = run_cli(capsys, "scurve", "--preset", "paper-fig2",
                             "--direction", "forward", "--samples", "200",
                             "--out", str(out))
        assert code == 0
        header, rows = read_csv_text(out.read_text())
        assert header == ["y", "input_pW", "output_pW", "input_flux_per_s",
                          "output_flux_per_s", "intracavity_photons", "stable"]
        assert len(rows) == 200
        stable = [r[6] for r in rows]
        assert "0" in stable and "1" in stable  # bistable curve

    def test_window_json_ok(self, capsys):
        code, out, _ = run_cli(capsys, "window", "--preset", "paper-fig2")
        assert code == 0
        doc = json.loads(out)
        assert doc["status"] == "ok"
        assert doc["p_lower_pw"] == pytest.approx(161.656, rel=1e-3)
        assert doc["p_upper_pw"] == pytest.approx(891.014, rel=1e-3)
        assert doc["thresholds"]["backward"]["bistable"]

    def test_window_empty_exit_zero(self, capsys):
        code, out, _ = run_cli(capsys, "window", "--preset", "paper-fig2",
                               "--neff", "0")
        assert code == 0
        doc = json.loads(out)
        assert doc["status"] == "empty window"
        assert "p_lower_pw" not in doc

    def test_metrics(self, capsys, tmp_path):
        out = tmp_path / "fig3.csv"
        code, stdout, _ = run_cli(capsys, "metrics", "--preset", "paper-fig2",
                                  "--powers", "200:800:100pW", "--out", str(out))
        assert code == 0
        header, rows = read_csv_text(out.read_text())
        assert header[0] == "input_pW"
        assert len(rows) == 7
        summary = json.loads(stdout)
        # inside the guaranteed window: saturated branch, strong blocking
        assert 0.14 < summary["mean_forward_transmission"] < 0.19
        assert summary["mean_blocking_ratio_db"] > 25

    def test_sweep_neff(self, capsys, tmp_path):
        out = tmp_path / "fig4.csv"
        code, stdout, _ = run_cli(capsys, "sweep-neff", "--values", "3.0,8.0,12.8",
                                  "--samples", "5", "--out", str(out))
        assert code == 0
        header, rows = read_csv_text(out.read_text())
        assert len(rows) == 3
        assert json.loads(stdout)["p_lower_nondecreasing"] is True

    def test_spectrum_fit_roundtrip(self, capsys, tmp_path):
        spec_path = tmp_path / "spectrum.csv"
        code, _, _ = run_cli(capsys, "spectrum", "--preset", "paper-fig2",
                             "--grid=-40:40:0.5", "--out", str(spec_path))
        assert code == 0
        code, out, _ = run_cli(capsys, "fit-neff", "--in", str(spec_path))
        assert code == 0
        doc = json.loads(out)
        assert doc["n_eff_hat"] == pytest.approx(12.8, rel=1e-6)

    def test_design_report_json(self, capsys):
        code, out, _ = run_cli(capsys, "design", "--t1-ppm", "88.9", "--t2-ppm",
                               "5.1", "--loss-ppm", "10.8", "--length-um", "335",
                               "--neff", "12.8")
        assert code == 0
        doc = json.loads(out)
        assert doc["rates_mhz"]["kappa1"] == pytest.approx(3.1655, abs=1e-3)
        assert doc["status"] == "ok"

    def test_design_optimize(self, capsys):
        code, out, _ = run_cli(capsys, "design", "--optimize", "--kappa-mhz",
                               "3.7", "--loss-mhz", "0.4")
        assert code == 0
        doc = json.loads(out)
        assert doc["kappa1_mhz"] == pytest.approx(1.85, rel=1e-9)
        assert doc["kappa2_mhz"] == pytest.approx(1.45, rel=1e-9)
        assert doc["transmission"] == pytest.approx(0.784, abs=5e-4)

    def test_design_text(self, capsys):
        code, out, _ = run_cli(capsys, "design", "--t1-ppm", "88.9", "--t2-ppm",
                               "5.1", "--loss-ppm", "10.8", "--text")
        assert code == 0
        assert "matched redesign" in out

    def test_design_infeasible_exit_code(self, capsys):
        code, _, err = run_cli(capsys, "design", "--optimize", "--kappa-mhz",
                               "0.7", "--loss-mhz", "0.4")
        assert code == 2
        doc = json.loads(err)
        assert doc["error"] == "InfeasibleDesignError"

    def test_quantum_validate(self, capsys, tmp_path):
        out = tmp_path / "q.csv"
        code, _, _ = run_cli(capsys, "quantum-validate", "--resonant",
                             "--n-atoms", "1", "--fock", "16", "--g-mhz", "12",
                             "--drive-scan", "0.005:0.05:4xpW", "--out", str(out))
        assert code == 0
        header, rows = read_csv_text(out.read_text())
        assert header[0] == "input_pW"
        assert len(rows) == 4
        outs = [float(r[2]) for r in rows]
        assert all(a < b for a, b in zip(outs, outs[1:]))

    def test_synth_ingest_roundtrip(self, capsys, tmp_path):
        sweep = tmp_path / "sweep.csv"
        det = "dark=1e6,eff=0.5,t=0.5"
        code, _, _ = run_cli(capsys, "synth", "--powers", "10:8000:50xpW",
                             "--detector", det, "--out", str(sweep))
        assert code == 0
        code, out, _ = run_cli(capsys, "ingest", "--in", str(sweep),
                               "--detector", det)
        assert code == 0
        doc = json.loads(out)
        assert doc["window"]["detected"]
        assert doc["window"]["p_lower_pw"] == pytest.approx(161.656, rel=0.12)
        assert doc["metrics"]["mean_transmission"] > 0.1

    def test_synth_poisson_requires_seed(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "synth", "--powers", "1:10:5xpW",
                               "--detector", "dark=100,eff=0.5,t=1", "--poisson",
                               "--out", str(tmp_path / "x.csv"))
        assert code == 2
        assert "seed" in json.loads(err)["message"]

    def test_byte_identical_reruns(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            code, _, _ = run_cli(capsys, "scurve", "--samples", "64",
                                 "--out", str(path))
            assert code == 0
        assert a.read_bytes() == b.read_bytes()
        # seeded synthetic data is reproducible too
        c, d = tmp_path / "c.csv", tmp_path / "d.csv"
        for path in (c, d):
            code, _, _ = run_cli(capsys, "synth", "--powers", "10:1000:20xpW",
                                 "--detector", "dark=1e5,eff=0.5,t=1",
                                 "--poisson", "--seed", "42", "--out", str(path))
            assert code == 0
        assert c.read_bytes() == d.read_bytes()

    def test_config_file_flow(self, capsys, tmp_path):
        cfg = tmp_path / "p.cfg"
        cfg.write_text("n_eff = 0.0\n")
        code, out, _ = run_cli(capsys, "window", "--config", str(cfg))
        assert code == 0
        assert json.loads(out)["status"] == "empty window"

    def test_unknown_preset_structured_error(self, capsys):
        code, _, err = run_cli(capsys, "window", "--preset", "bogus")
        assert code == 2
        assert json.loads(err)["error"] == "DomainError"
