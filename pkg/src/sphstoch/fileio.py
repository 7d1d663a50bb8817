"""On-disk formats and atomic writes.

Map files ("SFM1") and coefficient files ("SFC1") are little-endian binary;
spectrum and other tabular outputs are plain text with a structured header
line. NaN and infinities are rejected on both read and write so files are
bit-exact round-trippable across platforms. Writes go to a temporary file in
the target directory followed by an atomic rename.
"""

from __future__ import annotations

import math
import os
import re
import struct
import tempfile

import numpy as np

from .errors import ParseError
from .fields import PowerSpectrum
from .harmonics import SphereGrid, SpinMap, TriangularCoefficients

MAP_MAGIC = b"SFM1"
COEF_MAGIC = b"SFC1"

_HEADER_RE = re.compile(r"^#\s*spin\s+(-?\d+)\s*,\s*lmax\s+(\d+)\s*$")


def atomic_write_bytes(path, payload: bytes):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def atomic_write_text(path, text: str):
    atomic_write_bytes(path, text.encode("utf-8"))


def _require_finite(arr, what):
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains NaN or infinite values")


def write_map(path, spin_map: SpinMap):
    """Binary map: magic, u32 n_theta, u32 n_phi, i32 spin, then row-major
    (theta outer, phi inner) f64 (re, im) pairs, little-endian."""
    vals = spin_map.values
    _require_finite(vals, "map")
    header = MAP_MAGIC + struct.pack(
        "<IIi", spin_map.grid.n_theta, spin_map.grid.n_phi, spin_map.spin
    )
    flat = np.empty(vals.size * 2, dtype="<f8")
    flat[0::2] = vals.real.ravel()
    flat[1::2] = vals.imag.ravel()
    atomic_write_bytes(path, header + flat.tobytes())


def read_map(path) -> SpinMap:
    with open(path, "rb") as handle:
        blob = handle.read()
    if len(blob) < 4 or blob[:4] != MAP_MAGIC:
        raise ParseError(f"bad magic, expected {MAP_MAGIC!r}", offset=0)
    if len(blob) < 16:
        raise ParseError("truncated map header", offset=len(blob))
    n_theta, n_phi, spin = struct.unpack("<IIi", blob[4:16])
    expect = 16 + n_theta * n_phi * 16
    if len(blob) != expect:
        raise ParseError(
            f"truncated or oversized map payload, expected {expect} bytes",
            offset=min(len(blob), expect),
        )
    flat = np.frombuffer(blob, dtype="<f8", offset=16)
    if not np.all(np.isfinite(flat)):
        bad = int(np.flatnonzero(~np.isfinite(flat))[0])
        raise ParseError("non-finite value in map payload", offset=16 + 8 * bad)
    vals = (flat[0::2] + 1j * flat[1::2]).reshape(n_theta, n_phi)
    grid = SphereGrid.gauss_legendre(n_theta, n_phi)
    return SpinMap(grid, spin, vals.copy())


def write_coefficients(path, coeffs: TriangularCoefficients):
    """Binary coefficients: magic, u32 l_max, i32 spin, then (l_max+1)^2
    complex f64 in (l, m) lexicographic order, m from -l to l."""
    _require_finite(coeffs.values, "coefficients")
    header = COEF_MAGIC + struct.pack("<Ii", coeffs.l_max, coeffs.spin)
    flat = np.empty(coeffs.values.size * 2, dtype="<f8")
    flat[0::2] = coeffs.values.real
    flat[1::2] = coeffs.values.imag
    atomic_write_bytes(path, header + flat.tobytes())


def read_coefficients(path) -> TriangularCoefficients:
    with open(path, "rb") as handle:
        blob = handle.read()
    if len(blob) < 4 or blob[:4] != COEF_MAGIC:
        raise ParseError(f"bad magic, expected {COEF_MAGIC!r}", offset=0)
    if len(blob) < 12:
        raise ParseError("truncated coefficient header", offset=len(blob))
    l_max, spin = struct.unpack("<Ii", blob[4:12])
    expect = 12 + (l_max + 1) ** 2 * 16
    if len(blob) != expect:
        raise ParseError(
            f"truncated or oversized coefficient payload, expected {expect} bytes",
            offset=min(len(blob), expect),
        )
    flat = np.frombuffer(blob, dtype="<f8", offset=12)
    if not np.all(np.isfinite(flat)):
        bad = int(np.flatnonzero(~np.isfinite(flat))[0])
        raise ParseError("non-finite value in coefficient payload", offset=12 + 8 * bad)
    vals = flat[0::2] + 1j * flat[1::2]
    try:
        return TriangularCoefficients(int(l_max), int(spin), vals.copy())
    except ValueError as exc:
        raise ParseError(str(exc), offset=12) from None


def write_spectrum(path, spectrum: PowerSpectrum, comments=()):
    """Text spectrum: header '# spin s, lmax L', then 'l c_l' lines."""
    _require_finite(spectrum.c_l, "spectrum")
    lines = [f"# spin {spectrum.spin}, lmax {spectrum.l_max}"]
    lines += [f"# {c}" for c in comments]
    lines += [f"{l} {spectrum.c_l[l]:.17g}" for l in range(spectrum.l_max + 1)]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_spectrum(path) -> PowerSpectrum:
    with open(path, "r", encoding="utf-8") as handle:
        raw = handle.read().splitlines()
    spin = l_max = None
    values: dict[int, float] = {}
    for lineno, line in enumerate(raw, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            match = _HEADER_RE.match(stripped)
            if match and spin is None:
                spin, l_max = int(match.group(1)), int(match.group(2))
            continue
        parts = stripped.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'l c_l', got {stripped!r}", line=lineno)
        try:
            l = int(parts[0])
            c = float(parts[1])
        except ValueError:
            raise ParseError(f"malformed numbers in {stripped!r}", line=lineno) from None
        if not math.isfinite(c):
            raise ParseError("non-finite spectrum value", line=lineno)
        if c < 0:
            raise ParseError(f"negative c_l = {c!r}", line=lineno)
        if l in values:
            raise ParseError(f"duplicate degree l = {l}", line=lineno)
        values[l] = c
    if spin is None:
        raise ParseError("missing '# spin s, lmax L' header", line=1)
    if sorted(values) != list(range(l_max + 1)):
        raise ParseError(
            f"expected degrees 0..{l_max}, got {sorted(values)[:5]}...", line=len(raw)
        )
    c_l = np.array([values[l] for l in range(l_max + 1)])
    try:
        return PowerSpectrum(l_max, spin, c_l)
    except ValueError as exc:
        raise ParseError(str(exc), line=1) from None


def write_cl_table(path, l_values, c_values, spin, l_max, comments=()):
    """Text table 'l c_hat_l' with the structured header."""
    lines = [f"# spin {spin}, lmax {l_max}"]
    lines += [f"# {c}" for c in comments]
    lines += [f"{l} {c:.17g}" for l, c in zip(l_values, c_values)]
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_covariance_table(path, beta, values, spin, l_max, comments=()):
    """Text table 'beta re(R) im(R)' over a separation-angle grid."""
    lines = [f"# spin {spin}, lmax {l_max}"]
    lines += [f"# {c}" for c in comments]
    lines += [
        f"{b:.17g} {v.real:.17g} {v.imag:.17g}" for b, v in zip(beta, values)
    ]
    atomic_write_text(path, "\n".join(lines) + "\n")
