import math
import subprocess
import sys

import numpy as np
import pytest

from sphstoch import wigner_d
from sphstoch.cli import main
from sphstoch.fileio import read_coefficients, read_map


def run(args):
    return main([str(a) for a in args])


def test_synth_writes_map_and_coefficients(tmp_path, capsys):
    out = tmp_path / "field.sfm"
    assert run(["synth", "--lmax", 8, "--spin", 2, "--seed", 3, "--out", out]) == 0
    echoed = capsys.readouterr().out
    assert "# seed = 3" in echoed and "# lmax = 8" in echoed
    spin_map = read_map(out)
    assert spin_map.spin == 2
    coeffs = read_coefficients(str(out) + ".sfc")
    assert coeffs.l_max == 8 and coeffs.spin == 2


def test_synth_is_deterministic(tmp_path):
    args = ["synth", "--lmax", "6", "--seed", "9", "--quiet"]
    out1, out2 = tmp_path / "a.sfm", tmp_path / "b.sfm"
    assert run(args + ["--out", out1]) == 0
    assert run(args + ["--out", out2]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_full_pipeline_recovers_flat_spectrum(tmp_path):
    out = tmp_path / "field.sfm"
    coeffs_out = tmp_path / "back.sfc"
    spec_out = tmp_path / "chat.txt"
    assert run(["synth", "--lmax", "16", "--seed", "12", "--out", out, "--quiet"]) == 0
    assert run(["analyze", "--in", out, "--lmax", "16", "--out", coeffs_out, "--quiet"]) == 0
    assert run(["spectrum", "--in", coeffs_out, "--out", spec_out, "--quiet"]) == 0
    rows = [
        line.split() for line in spec_out.read_text().splitlines()
        if line and not line.startswith("#")
    ]
    chat = np.array([float(c) for _, c in rows])
    assert len(chat) == 17
    # single-realization chi-squared tolerance around the flat input
    ls = np.arange(17)
    assert np.all(np.abs(chat - 1.0) <= 5.0 * np.sqrt(2.0 / (2 * ls + 1)))


def test_analyze_resolution_exit_code(tmp_path):
    out = tmp_path / "small.sfm"
    assert run(["synth", "--lmax", "4", "--out", out, "--quiet"]) == 0
    assert run(["analyze", "--in", out, "--lmax", "9", "--out", tmp_path / "x.sfc",
                "--quiet"]) == 4


def test_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.sfm"
    bad.write_bytes(b"JUNKJUNKJUNK")
    assert run(["analyze", "--in", bad, "--lmax", "4", "--out", tmp_path / "x.sfc",
                "--quiet"]) == 3


def test_config_error_exit_code(tmp_path):
    assert run(["synth", "--out", tmp_path / "x.sfm", "--quiet"]) == 2  # missing lmax
    assert run(["synth", "--lmax", "4", "--grid", "5by10",
                "--out", tmp_path / "x.sfm", "--quiet"]) == 2
    assert run(["synth", "--lmax", "4", "--grid", "5x11",
                "--out", tmp_path / "x.sfm", "--quiet"]) == 2  # odd n_phi


def test_grid_override(tmp_path):
    out = tmp_path / "big.sfm"
    assert run(["synth", "--lmax", "4", "--grid", "12x24", "--out", out,
                "--quiet"]) == 0
    spin_map = read_map(out)
    assert spin_map.grid.n_theta == 12 and spin_map.grid.n_phi == 24


def test_spectrum_file_input(tmp_path):
    spec = tmp_path / "spec.txt"
    spec.write_text("# spin 1, lmax 3\n0 0\n1 1.0\n2 0.5\n3 0.25\n")
    out = tmp_path / "field.sfm"
    assert run(["synth", "--spectrum", spec, "--out", out, "--quiet"]) == 0
    assert read_map(out).spin == 1
    # conflicting lmax is a config error
    assert run(["synth", "--spectrum", spec, "--lmax", "9",
                "--out", out, "--quiet"]) == 2


def test_cov_command(tmp_path):
    spec = tmp_path / "spec.txt"
    spec.write_text("# spin 0, lmax 1\n0 1.0\n1 0\n")
    out = tmp_path / "cov.txt"
    assert run(["cov", "--spectrum", spec, "--points", "5", "--out", out,
                "--quiet"]) == 0
    rows = [
        line.split() for line in out.read_text().splitlines()
        if line and not line.startswith("#")
    ]
    assert len(rows) == 5
    for beta, re, im in rows:
        assert float(re) == pytest.approx(1.0 / (4 * math.pi), abs=1e-12)
        assert float(im) == 0.0


@pytest.mark.parametrize("method", ["recursion", "rodrigues"])
def test_wigner_command(capsys, method):
    assert run(["wigner", "--l", "3", "--m", "2", "--n", "1",
                "--theta", "0.8", "--method", method]) == 0
    printed = float(capsys.readouterr().out.strip())
    assert printed == pytest.approx(wigner_d(3, 2, 1, 0.8), abs=1e-13)


def test_wigner_command_index_error(capsys):
    assert run(["wigner", "--l", "1", "--m", "2", "--n", "0", "--theta", "0.5"]) == 2


def test_verify_command_passes_on_pristine_build(tmp_path, capsys):
    report = tmp_path / "report.txt"
    assert run(["verify", "--report", report]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 11 and "[FAIL]" not in out
    lines = report.read_text().strip().splitlines()
    assert len(lines) == 14  # 7 diagnostics checks per generator
    for line in lines:
        assert line.split(", ")[-1] in ("pass", "fail")


def test_verify_command_exit_code_on_failure(monkeypatch, capsys):
    from sphstoch import verify as verify_mod

    broken = verify_mod.CriterionResult(1, "wigner_oracle_agreement", False, "forced")
    monkeypatch.setattr(verify_mod, "run_all", lambda **kw: [broken])
    assert run(["verify"]) == 5
    assert "[FAIL]" in capsys.readouterr().out


def test_console_script_entry():
    proc = subprocess.run(
        [sys.executable, "-m", "sphstoch.cli", "wigner", "--l", "1", "--m", "0",
         "--n", "0", "--theta", "1.0471975511965976"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert float(proc.stdout.strip()) == pytest.approx(0.5, abs=1e-12)
