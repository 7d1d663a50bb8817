import os

import numpy as np
import pytest

from sphstoch import ParseError, PowerSpectrum, SpinMap, TriangularCoefficients, build_grid
from sphstoch.fileio import (
    read_coefficients,
    read_map,
    read_spectrum,
    write_coefficients,
    write_map,
    write_spectrum,
)


def test_map_round_trip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    grid = build_grid(5)
    vals = rng.normal(size=(grid.n_theta, grid.n_phi)) + 1j * rng.normal(
        size=(grid.n_theta, grid.n_phi)
    )
    path = tmp_path / "field.sfm"
    write_map(path, SpinMap(grid, -2, vals))
    back = read_map(path)
    assert back.spin == -2
    assert np.array_equal(back.values, vals)
    assert np.array_equal(back.grid.theta_nodes, grid.theta_nodes)


def test_coefficients_round_trip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(1)
    vals = rng.normal(size=36) + 1j * rng.normal(size=36)
    vals[:4] = 0  # structural zeros for spin 2
    coeffs = TriangularCoefficients(5, 2, vals)
    path = tmp_path / "coeffs.sfc"
    write_coefficients(path, coeffs)
    back = read_coefficients(path)
    assert back.l_max == 5 and back.spin == 2
    assert np.array_equal(back.values, coeffs.values)


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "bad.sfm"
    path.write_bytes(b"NOPE" + b"\x00" * 32)
    with pytest.raises(ParseError) as info:
        read_map(path)
    assert info.value.offset == 0
    with pytest.raises(ParseError):
        read_coefficients(path)


def test_truncated_payload_rejected(tmp_path):
    grid = build_grid(2)
    path = tmp_path / "field.sfm"
    write_map(path, SpinMap(grid, 0, np.ones((grid.n_theta, grid.n_phi), complex)))
    blob = path.read_bytes()
    path.write_bytes(blob[:-8])
    with pytest.raises(ParseError):
        read_map(path)


def test_nan_rejected_on_write_and_read(tmp_path):
    grid = build_grid(2)
    vals = np.ones((grid.n_theta, grid.n_phi), complex)
    vals[0, 0] = float("nan")
    with pytest.raises(ValueError):
        write_map(tmp_path / "x.sfm", SpinMap(grid, 0, vals))
    # forge a file with an inf in the payload
    good = np.ones((grid.n_theta, grid.n_phi), complex)
    path = tmp_path / "y.sfm"
    write_map(path, SpinMap(grid, 0, good))
    blob = bytearray(path.read_bytes())
    blob[16:24] = np.array([float("inf")], "<f8").tobytes()
    path.write_bytes(bytes(blob))
    with pytest.raises(ParseError):
        read_map(path)


def test_structural_zero_violation_on_read(tmp_path):
    vals = np.ones(16, complex)  # l_max 3, spin 2: l<2 entries nonzero
    path = tmp_path / "bad.sfc"
    coeffs = TriangularCoefficients(3, 0, vals)
    write_coefficients(path, coeffs)
    blob = bytearray(path.read_bytes())
    blob[8:12] = (2).to_bytes(4, "little", signed=True)  # change spin tag to 2
    path.write_bytes(bytes(blob))
    with pytest.raises(ParseError):
        read_coefficients(path)


def test_spectrum_round_trip(tmp_path):
    spec = PowerSpectrum(4, -2, np.array([0.0, 0.0, 1.5, 2.5, 0.25]))
    path = tmp_path / "spec.txt"
    write_spectrum(path, spec, comments=["seed 7"])
    back = read_spectrum(path)
    assert back.l_max == 4 and back.spin == -2
    assert np.array_equal(back.c_l, spec.c_l)
    text = path.read_text()
    assert text.splitlines()[0] == "# spin -2, lmax 4"
    assert "# seed 7" in text


def test_spectrum_parse_errors_cite_lines(tmp_path):
    path = tmp_path / "spec.txt"
    path.write_text("# spin 0, lmax 2\n0 1.0\n1 -0.5\n2 1.0\n")
    with pytest.raises(ParseError) as info:
        read_spectrum(path)
    assert "negative" in str(info.value) and info.value.line == 3

    path.write_text("0 1.0\n1 1.0\n")
    with pytest.raises(ParseError) as info:
        read_spectrum(path)
    assert "header" in str(info.value)

    path.write_text("# spin 0, lmax 1\n0 1.0\n0 2.0\n")
    with pytest.raises(ParseError) as info:
        read_spectrum(path)
    assert "duplicate" in str(info.value)

    path.write_text("# spin 0, lmax 1\n0 1.0\nnot numbers\n")
    with pytest.raises(ParseError) as info:
        read_spectrum(path)
    assert info.value.line == 3


def test_writes_are_atomic(tmp_path):
    grid = build_grid(2)
    path = tmp_path / "field.sfm"
    write_map(path, SpinMap(grid, 0, np.zeros((grid.n_theta, grid.n_phi), complex)))
    leftovers = [p for p in os.listdir(tmp_path) if p.endswith(".part")]
    assert leftovers == []
    assert path.exists()
