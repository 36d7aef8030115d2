import json

import pytest

from hopfbvp.cli import _parse_range, main


def run(tmp_path, *args):
    return main([*args, "--out-dir", str(tmp_path)])


class TestVerify:
    def test_exit_zero_and_table(self, tmp_path, capsys):
        assert run(tmp_path, "verify") == 0
        out = capsys.readouterr().out
        assert "pass" in out and "FAIL" not in out
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["verdict"] == "pass"
        assert all(row["passed"] for row in summary["rows"])


class TestSolve:
    def test_solution_found(self, tmp_path):
        rc = run(
            tmp_path, "solve", "--p", "1", "--q", "2", "--lambda", "1", "--mu", "4",
            "--n", "800", "--n-scan", "10", "--s-min", "0.05", "--s-max", "1.45",
        )
        assert rc == 0
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["verdict"] == "solution_found"
        assert (tmp_path / "profile.csv").exists()
        assert (tmp_path / "glued.json").exists()
        assert (tmp_path / "scan.csv").exists()
        assert summary["s_star"] is not None
        assert summary["config"]["n"] == 800

    def test_no_sign_change_exit_code(self, tmp_path):
        rc = run(
            tmp_path, "solve", "--p", "1", "--q", "2", "--lambda", "1", "--mu", "1.5",
            "--n", "500", "--n-scan", "8", "--s-min", "0.05", "--s-max", "1.4",
        )
        assert rc == 2
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["verdict"] == "no_sign_change"

    def test_cross_check_and_mismatch_map(self, tmp_path):
        # use the transversal-root regime: for degenerate families (p=q=1,
        # lam=mu) the two pipelines legitimately return different members
        rc = run(
            tmp_path, "solve", "--p", "1", "--q", "2", "--lambda", "1", "--mu", "4",
            "--n", "800", "--n-scan", "8", "--s-min", "0.05", "--s-max", "1.45",
            "--cross-check", "--mismatch-map", "mismatch.csv",
        )
        assert rc == 0
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["shooting_verdict"] == "solution"
        assert summary["pipeline_sup_distance"] <= 1e-4
        lines = (tmp_path / "mismatch.csv").read_text().splitlines()
        assert lines[0] == "c0,c1,dalpha,ddalpha"
        assert len(lines) > 100

    def test_invalid_grid_size_rejected(self, tmp_path):
        rc = run(tmp_path, "solve", "--p", "1", "--q", "2", "--lambda", "1",
                 "--mu", "4", "--n", "8")
        assert rc == 1
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert "n must be >= 16" in summary["error"]

    def test_usage_error_exit_code(self, tmp_path):
        rc = run(tmp_path, "solve", "--p", "1", "--q", "2", "--lambda", "1",
                 "--mu", "-1")
        assert rc == 1
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["verdict"] == "error"
        assert "mu" in summary["error"]


class TestScanJump:
    def test_writes_scan_with_bracket(self, tmp_path):
        rc = run(
            tmp_path, "scan-jump", "--p", "1", "--q", "2", "--lambda", "1",
            "--mu", "4", "--n", "600", "--n-scan", "8", "--s-min", "0.05",
            "--s-max", "1.4",
        )
        assert rc == 0
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["verdict"] == "sign_change"
        assert summary["brackets"]
        lines = (tmp_path / "scan.csv").read_text().splitlines()
        assert lines[0] == "s,l,l_tilde,I_s,I_s1,I_s2,converged"
        assert len(lines) == 9

    def test_deterministic_output(self, tmp_path):
        args = [
            "scan-jump", "--p", "1", "--q", "2", "--lambda", "1", "--mu", "4",
            "--n", "400", "--n-scan", "4", "--s-min", "0.2", "--s-max", "1.0",
        ]
        run(tmp_path / "a", *args)
        run(tmp_path / "b", *args)
        assert (tmp_path / "a/scan.csv").read_bytes() == (
            tmp_path / "b/scan.csv"
        ).read_bytes()

    def test_parallel_matches_serial_bytes(self, tmp_path):
        base = [
            "scan-jump", "--p", "1", "--q", "2", "--lambda", "1", "--mu", "4",
            "--n", "400", "--n-scan", "4", "--s-min", "0.2", "--s-max", "1.0",
        ]
        run(tmp_path / "serial", *base, "--jobs", "1")
        run(tmp_path / "par", *base, "--jobs", "2")
        assert (tmp_path / "serial/scan.csv").read_bytes() == (
            tmp_path / "par/scan.csv"
        ).read_bytes()


class TestMap:
    def test_range_syntax_and_csv(self, tmp_path):
        rc = run(
            tmp_path, "map", "--p", "1", "--q", "1", "--lambda", "1:2:2",
            "--mu", "1:2:2", "--n", "400", "--n-scan", "6",
            "--s-min", "0.2", "--s-max", "1.3",
        )
        assert rc == 0
        lines = (tmp_path / "map.csv").read_text().splitlines()
        assert lines[0] == "lambda,mu,verdict,s_star"
        assert len(lines) == 5
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["n_solution_found"] == 2
        assert summary["n_no_sign_change"] == 2

    def test_bad_range(self, tmp_path):
        rc = run(tmp_path, "map", "--p", "1", "--q", "2", "--lambda", "1:2",
                 "--mu", "1:6:10")
        assert rc == 1


class TestBlowupAndCompare:
    def test_blowup_csv(self, tmp_path):
        rc = run(
            tmp_path, "blowup", "--p", "1", "--q", "2", "--lambda", "1",
            "--mu", "4", "--s-list", "0.04,0.02", "--n", "800",
        )
        assert rc == 0
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["decreasing"] is True
        lines = (tmp_path / "blowup.csv").read_text().splitlines()
        assert lines[0] == "s,sup_distance"

    def test_compare_auto_config(self, tmp_path):
        rc = run(
            tmp_path, "compare", "--p", "1", "--q", "2", "--lambda", "1",
            "--mu", "4", "--s", "0.01", "--n", "800",
        )
        assert rc == 0
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["verdict"] == "ordering_holds"
        assert summary["report"]["supersolution_ok"] is True


class TestHopfEval:
    def test_reports_norm_and_poles(self, tmp_path):
        rc = run(
            tmp_path / "solve", "solve", "--p", "1", "--q", "2", "--lambda", "1",
            "--mu", "4", "--n", "600", "--n-scan", "8",
            "--s-min", "0.05", "--s-max", "1.45",
        )
        assert rc == 0
        rc = run(
            tmp_path, "hopf-eval", "--profile", str(tmp_path / "solve/profile.csv"),
            "--kind", "restricted3", "--samples", "2000",
        )
        assert rc == 0
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["max_norm_error"] <= 1e-10
        assert summary["north_pole_error"] <= 1e-3
        assert summary["south_pole_error"] <= 1e-3

    def test_unknown_kind(self, tmp_path):
        (tmp_path / "p.csv").write_text("t,alpha,dalpha,residual\n0.1,0.2,2,0\n0.2,0.4,2,0\n0.3,0.6,2,0\n")
        rc = run(tmp_path, "hopf-eval", "--profile", str(tmp_path / "p.csv"),
                 "--kind", "sedenion")
        assert rc == 1


class TestConfig:
    def test_parse_range(self):
        assert _parse_range("1:2:5") == (1.0, 2.0, 5)
        with pytest.raises(ValueError):
            _parse_range("1:2")

    def test_config_file_and_flag_override(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("n = 300\ns-min = 0.3\n# comment\njobs=1\n")
        rc = run(
            tmp_path, "scan-jump", "--p", "1", "--q", "1", "--lambda", "1",
            "--mu", "1", "--config", str(cfg), "--n-scan", "3",
            "--s-max", "1.2", "--n", "250",
        )
        assert rc == 0
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["config"]["s_min"] == 0.3  # from config file
        assert summary["config"]["n"] == 250  # flag overrides config

    def test_env_var_out_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HOPF_OUT_DIR", str(tmp_path / "envout"))
        rc = main(["verify"])
        assert rc == 0
        assert (tmp_path / "envout/summary.json").exists()
