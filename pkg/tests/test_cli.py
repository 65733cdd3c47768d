import json
import math
import os
import subprocess
import sys
from fractions import Fraction

import pytest

from bdecay import lifetime_direct
from bdecay.cli import main


def run_cli(args, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    proc = subprocess.run(
        [sys.executable, "-m", "bdecay.cli", *args],
        capture_output=True,
        text=True,
        env=env,
    )
    return proc


class TestDecayCommand:
    def test_two_node_epidemic(self, capsys):
        rc = main(["decay", "--n", "2", "--beta", "1", "--delta", "1", "--eps", "0"])
        out = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert out["zeta_exact"] == pytest.approx(-(2 - math.sqrt(2)), abs=1e-12)
        assert out["zeta_lagrange2"] == -0.5625
        assert out["bound_ordering_ok"] is True
        assert set(out) == {
            "n", "beta", "delta", "eps", "tau", "x",
            "zeta_exact", "zeta_lagrange1", "zeta_lagrange2", "zeta_lagrange3",
            "zeta_newton", "bound_ordering_ok", "precision_bits",
        }

    def test_single_node_all_estimators_collapse(self, capsys):
        rc = main(["decay", "--n", "1", "--beta", "1", "--delta", "1", "--eps", "0"])
        out = json.loads(capsys.readouterr().out)
        assert rc == 0
        for key in ("zeta_exact", "zeta_lagrange1", "zeta_lagrange2", "zeta_lagrange3",
                    "zeta_newton"):
            assert out[key] == pytest.approx(-1.0, abs=1e-12)

    def test_order_flag_caps_series(self, capsys):
        rc = main(["decay", "--n", "2", "--tau", "1", "--eps", "0", "--order", "1"])
        out = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert out["zeta_lagrange1"] == -0.5
        assert out["zeta_lagrange2"] is None
        assert out["zeta_lagrange3"] is None

    def test_invalid_order_is_usage_error(self):
        proc = run_cli(["decay", "--n", "2", "--tau", "1", "--order", "7"])
        assert proc.returncode == 2

    def test_invalid_parameters_exit_2(self):
        proc = run_cli(["decay", "--n", "0", "--tau", "1"])
        assert proc.returncode == 2
        proc = run_cli(["decay", "--n", "2", "--tau", "1", "--eps", "-3"])
        assert proc.returncode == 2

    def test_tau_and_x_mutually_exclusive(self):
        proc = run_cli(["decay", "--n", "2", "--tau", "1", "--x", "2"])
        assert proc.returncode == 2

    def test_exact_flag_prints_rationals(self, capsys):
        rc = main(["decay", "--n", "2", "--tau", "1", "--eps", "0", "--exact"])
        out = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert out["zeta_lagrange2"] == "-9/16"


class TestSweepCommand:
    def test_header_and_meta(self, capsys):
        rc = main(["sweep", "--n-min", "4", "--n-max", "5", "--x-values", "0.5,2",
                   "--eps", "1e-5"])
        lines = capsys.readouterr().out.strip().split("\n")
        assert rc == 0
        assert lines[0].startswith("# meta: bdecay")
        assert lines[1] == ("n,tau,x,eps,zeta_exact,zeta_lagrange2,zeta_newton,"
                            "rel_err_lagrange2,rel_err_newton,precision_bits")
        assert len(lines) == 2 + 4  # two n values x two tau rules

    def test_byte_stable(self, tmp_path):
        args = ["sweep", "--n-min", "4", "--n-max", "6", "--x-values", "2",
                "--eps", "1e-5"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_matches_decay_command(self, capsys):
        rc = main(["sweep", "--n-values", "5", "--x-values", "2", "--eps", "1e-5",
                   "--precision-bits", "128"])
        sweep_lines = capsys.readouterr().out.strip().split("\n")
        row = dict(zip(sweep_lines[1].split(","), sweep_lines[2].split(",")))
        rc2 = main(["decay", "--n", "5", "--x", "2", "--eps", "1e-5",
                    "--precision-bits", "128"])
        point = json.loads(capsys.readouterr().out)
        assert rc == rc2 == 0
        assert float(row["zeta_exact"]) == point["zeta_exact"]
        assert float(row["zeta_lagrange2"]) == point["zeta_lagrange2"]

    def test_full_grid_row_count(self, capsys):
        # 57 sizes x 4 infection-rate rules = 228 data rows
        rc = main(["sweep", "--n-min", "4", "--n-max", "60",
                   "--x-values", "0.5,1,2,3", "--eps", "1e-5",
                   "--precision-bits", "128"])
        lines = capsys.readouterr().out.strip().split("\n")
        assert rc == 0
        assert len(lines) == 2 + 57 * 4

    def test_row_order_deterministic(self, capsys):
        rc = main(["sweep", "--n-values", "6,4", "--x-values", "3,0.5",
                   "--eps", "1e-5"])
        lines = capsys.readouterr().out.strip().split("\n")[2:]
        keys = [(int(l.split(",")[0]), float(l.split(",")[2])) for l in lines]
        assert keys == sorted(keys)
        assert rc == 0


class TestLifetimeCommand:
    def test_three_nodes(self, capsys):
        rc = main(["lifetime", "--n", "3", "--tau", "1", "--delta", "1"])
        out = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert out["e_t"] == pytest.approx(23 / 6)
        assert out["f_taylor"] == pytest.approx(23 / 6)
        assert out["regime"] == "above"

    def test_pure_death_limit(self, capsys):
        rc = main(["lifetime", "--n", "3", "--tau", "1e-12"])
        out = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert out["e_t"] == pytest.approx(11 / 6, rel=1e-9)
        assert out["f_asymptotic"] is None

    def test_zeta_product_residual_above_threshold(self, capsys):
        rc = main(["lifetime", "--n", "60", "--x", "2"])
        out = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert out["zeta_f_residual"] < 1e-4

    def test_nonzero_eps_rejected(self):
        proc = run_cli(["lifetime", "--n", "3", "--tau", "1", "--eps", "0.5"])
        assert proc.returncode == 2


class TestRegimesCommand:
    def test_csv_rows(self, capsys):
        rc = main(["regimes", "--n-values", "50", "--x-values", "0.5,1,2"])
        lines = capsys.readouterr().out.strip().split("\n")
        assert rc == 0
        assert lines[1] == "n,x,regime,leading_estimate,order_only"
        regimes = [l.split(",")[2] for l in lines[2:]]
        assert regimes == ["below", "at", "above"]


class TestSimulateCommand:
    def test_summary_and_reproducibility(self, capsys):
        args = ["simulate", "--n", "4", "--tau", "0.1", "--runs", "500", "--seed", "9"]
        assert main(args) == 0
        first = json.loads(capsys.readouterr().out)
        assert main(args) == 0
        second = json.loads(capsys.readouterr().out)
        assert first["mean"] == second["mean"]
        assert first["rng"]["algorithm"].startswith("numpy.random.Philox")
        want = float(lifetime_direct(4, Fraction(1, 10)))
        assert abs(first["mean"] - want) < 6 * first["stderr"]

    def test_samples_out(self, tmp_path, capsys):
        path = tmp_path / "samples.csv"
        rc = main(["simulate", "--n", "2", "--tau", "0.2", "--runs", "50",
                   "--seed", "3", "--samples-out", str(path)])
        capsys.readouterr()
        assert rc == 0
        lines = path.read_text().strip().split("\n")
        assert lines[1] == "run,t"
        assert len(lines) == 52


class TestValidateCommand:
    def test_quick_suite_passes(self, capsys):
        rc = main(["validate", "--level", "quick"])
        out = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert out["failed"] == 0
        assert out["first_failure"] is None
        assert any(c["name"] == "bound-ordering" for c in out["checks"])

    def test_injected_fault_names_bound_ordering(self):
        proc = run_cli(["validate", "--level", "quick"],
                       env_extra={"BDECAY_FAULT": "f2-sign-flip"})
        assert proc.returncode == 1
        summary = json.loads(proc.stdout)
        assert summary["first_failure"] == "bound-ordering"
        assert "bound-ordering" in proc.stderr
