"""Scalar and spin-weighted spherical harmonics and the spin-s transforms.

The basis functions are restrictions of the Wigner D-functions,

    sY^l_m(theta, phi) = sqrt((2l+1)/(4 pi)) d^l_{m,-s}(cos theta) e^(i m phi),

orthonormal over the sphere; s = 0 gives the scalar harmonics. Synthesis and
analysis separate into a Wigner-d factor in colatitude and a discrete Fourier
factor in longitude. The grid is Gauss-Legendre in cos(theta) times uniform
longitudes, which integrates band-limited products exactly with the minimal
node count: n_theta >= l_max+1 and n_phi >= 2*l_max+1.
"""

from __future__ import annotations

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ResolutionError
from .rotations import SpherePoint
from .wigner import wigner_d, wigner_d_table


def norm_l(l):
    """Orthonormalization factor sqrt((2l+1)/(4 pi))."""
    return np.sqrt((2.0 * np.asarray(l, dtype=float) + 1.0) / (4.0 * math.pi))


def lm_index(l: int, m: int) -> int:
    """Flat index of (l, m) in (l, m)-lexicographic order, m from -l to l."""
    return l * l + l + m


class SphereGrid:
    """Gauss-Legendre colatitudes x uniform longitudes.

    theta_nodes are sorted ascending; gl_weights sum to 2 (the weights of the
    underlying rule on [-1, 1]); phi_nodes are 2*pi*k/n_phi.
    """

    def __init__(self, theta_nodes, gl_weights, phi_nodes):
        self.theta_nodes = np.asarray(theta_nodes, dtype=float)
        self.gl_weights = np.asarray(gl_weights, dtype=float)
        self.phi_nodes = np.asarray(phi_nodes, dtype=float)
        if self.theta_nodes.shape != self.gl_weights.shape:
            raise ValueError("theta nodes and weights must have equal length")
        self._tables: dict = {}
        self._lock = threading.Lock()

    @property
    def n_theta(self) -> int:
        return self.theta_nodes.shape[0]

    @property
    def n_phi(self) -> int:
        return self.phi_nodes.shape[0]

    @classmethod
    def gauss_legendre(cls, n_theta: int, n_phi: int) -> "SphereGrid":
        if n_theta < 1 or n_phi < 1:
            raise ValueError("grid sizes must be positive")
        if n_phi % 2:
            raise ValueError("n_phi must be even (clean Nyquist row)")
        x, w = np.polynomial.legendre.leggauss(n_theta)
        order = np.argsort(-x)  # theta ascending
        theta = np.arccos(x[order])
        phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
        return cls(theta, w[order], phi)

    def max_degree(self) -> int:
        """Largest band limit this grid analyzes exactly."""
        return min(self.n_theta - 1, (self.n_phi - 1) // 2)

    def harmonic_table(self, spin: int, l_max: int) -> np.ndarray:
        """Cached W[l, m+l_max, j] = norm_l(l) * d^l_{m,-spin}(theta_j).

        Built once per (spin, l_max) and shared read-only; concurrent builds
        of the same key produce identical tables.
        """
        key = (int(spin), int(l_max))
        tab = self._tables.get(key)
        if tab is None:
            with self._lock:
                tab = self._tables.get(key)
                if tab is None:
                    raw = wigner_d_table(l_max, -spin, self.theta_nodes)
                    tab = raw * norm_l(np.arange(l_max + 1))[:, None, None]
                    tab.setflags(write=False)
                    self._tables[key] = tab
        return tab


def build_grid(l_max: int) -> SphereGrid:
    """Minimal grid exact at band limit l_max."""
    if l_max < 0:
        raise ValueError("l_max must be nonnegative")
    return SphereGrid.gauss_legendre(l_max + 1, 2 * l_max + 2)


@dataclass
class TriangularCoefficients:
    """Coefficients a_lm, 0 <= l <= l_max, -l <= m <= l, flat (l_max+1)^2 array.

    Entries with l < |spin| are structural zeros: the corresponding basis
    functions vanish identically.
    """

    l_max: int
    spin: int
    values: np.ndarray = field(default=None)

    def __post_init__(self):
        size = (self.l_max + 1) ** 2
        if self.values is None:
            self.values = np.zeros(size, dtype=complex)
        else:
            self.values = np.asarray(self.values, dtype=complex)
            if self.values.shape != (size,):
                raise ValueError(f"expected {size} coefficients, got {self.values.shape}")
        self.validate()

    def validate(self):
        s = abs(self.spin)
        if s > 0:
            head = self.values[: min(s * s, len(self.values))]
            if np.any(head != 0):
                raise ValueError(f"coefficients with l < |spin|={s} must be zero")

    def get(self, l: int, m: int) -> complex:
        return self.values[lm_index(l, m)]

    def set(self, l: int, m: int, value: complex):
        if l < abs(self.spin) and value != 0:
            raise ValueError("cannot set nonzero coefficient below l = |spin|")
        self.values[lm_index(l, m)] = value

    def matrix(self) -> np.ndarray:
        """Dense (l_max+1, 2*l_max+1) layout, column index m + l_max."""
        big_l = self.l_max
        out = np.zeros((big_l + 1, 2 * big_l + 1), dtype=complex)
        for l in range(big_l + 1):
            out[l, big_l - l : big_l + l + 1] = self.values[l * l : (l + 1) ** 2]
        return out

    @classmethod
    def from_matrix(cls, mat: np.ndarray, spin: int) -> "TriangularCoefficients":
        big_l = mat.shape[0] - 1
        vals = np.zeros((big_l + 1) ** 2, dtype=complex)
        for l in range(big_l + 1):
            vals[l * l : (l + 1) ** 2] = mat[l, big_l - l : big_l + l + 1]
        return cls(big_l, spin, vals)

    def copy(self) -> "TriangularCoefficients":
        return TriangularCoefficients(self.l_max, self.spin, self.values.copy())


@dataclass
class SpinMap:
    """Complex samples of a spin-s field on a grid, shape (n_theta, n_phi)."""

    grid: SphereGrid
    spin: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.n_theta, self.grid.n_phi):
            raise ValueError(
                f"map shape {self.values.shape} does not match grid "
                f"({self.grid.n_theta}, {self.grid.n_phi})"
            )


def legendre_P(l: int, x):
    """Legendre polynomial P_l(x) by the stable three-term recurrence."""
    if l < 0:
        raise ValueError("l must be nonnegative")
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if l == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    p_cur = x.copy()
    for k in range(1, l):
        p_cur, p_prev = ((2 * k + 1) * x * p_cur - k * p_prev) / (k + 1), p_cur
    return p_cur if p_cur.ndim else float(p_cur)


def spin_harm(s: int, l: int, m: int, t: SpherePoint) -> complex:
    """Spin-weighted spherical harmonic sY^l_m at a point (0 for l < |s|)."""
    if abs(m) > l:
        raise ValueError(f"|m| must not exceed l: l={l}, m={m}")
    if l < abs(s):
        return 0.0 + 0.0j
    return norm_l(l) * wigner_d(l, m, -s, t.theta) * np.exp(1j * m * t.phi)


def sph_harm(l: int, m: int, t: SpherePoint) -> complex:
    """Scalar spherical harmonic Y_l^m (the spin-0 case)."""
    return spin_harm(0, l, m, t)


def _m_chunks(l_max, workers):
    cols = 2 * l_max + 1
    k = max(1, min(int(workers), cols))
    bounds = np.linspace(0, cols, k + 1).astype(int)
    return [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def _check_resolution(grid: SphereGrid, l_max: int):
    if grid.n_theta < l_max + 1 or grid.n_phi < 2 * l_max + 1:
        raise ResolutionError(
            f"grid ({grid.n_theta} x {grid.n_phi}) cannot resolve l_max={l_max}; "
            f"need n_theta >= {l_max + 1} and n_phi >= {2 * l_max + 1}"
        )


def synthesize(coeffs: TriangularCoefficients, grid: SphereGrid, workers: int = 1) -> SpinMap:
    """Evaluate sum_lm a_lm sY^l_m on the grid.

    Work splits over m-columns; every (m, theta) reduction over l is internal
    to its column, so the result is identical for any worker count.
    """
    big_l = coeffs.l_max
    tab = grid.harmonic_table(coeffs.spin, big_l)
    amat = coeffs.matrix()
    gmat = np.empty((2 * big_l + 1, grid.n_theta), dtype=complex)

    def fill(sl):
        gmat[sl] = np.einsum("lm,lmj->mj", amat[:, sl], tab[:, sl, :])

    chunks = _m_chunks(big_l, workers)
    if len(chunks) == 1:
        fill(chunks[0])
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            list(pool.map(fill, chunks))

    spec = np.zeros((grid.n_phi, grid.n_theta), dtype=complex)
    for m in range(-big_l, big_l + 1):
        spec[m % grid.n_phi] += gmat[m + big_l]
    values = np.fft.ifft(spec, axis=0).T * grid.n_phi
    return SpinMap(grid, coeffs.spin, values)


def analyze(spin_map: SpinMap, l_max: int, workers: int = 1) -> TriangularCoefficients:
    """Quadrature of map * conj(sY) over the sphere; exact for band-limited input."""
    _check_resolution(spin_map.grid, l_max)
    grid = spin_map.grid
    tab = grid.harmonic_table(spin_map.spin, l_max)

    fhat = np.fft.fft(spin_map.values, axis=1) * (2.0 * math.pi / grid.n_phi)
    fmat = np.empty((2 * l_max + 1, grid.n_theta), dtype=complex)
    for m in range(-l_max, l_max + 1):
        fmat[m + l_max] = fhat[:, m % grid.n_phi]
    fmat *= grid.gl_weights[None, :]

    amat = np.zeros((l_max + 1, 2 * l_max + 1), dtype=complex)

    def fill(sl):
        amat[:, sl] = np.einsum("lmj,mj->lm", tab[:, sl, :], fmat[sl])

    chunks = _m_chunks(l_max, workers)
    if len(chunks) == 1:
        fill(chunks[0])
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            list(pool.map(fill, chunks))

    s = abs(spin_map.spin)
    if s > 0:
        for l in range(min(s, l_max + 1)):
            amat[l] = 0.0  # structural zeros, exactly
    return TriangularCoefficients.from_matrix(amat, spin_map.spin)


def synthesize_at(coeffs: TriangularCoefficients, t: SpherePoint) -> complex:
    """Direct pointwise evaluation of the expansion (slow path for checks)."""
    s = coeffs.spin
    total = 0.0 + 0.0j
    for l in range(abs(s), coeffs.l_max + 1):
        for m in range(-l, l + 1):
            a = coeffs.get(l, m)
            if a != 0:
                total += a * spin_harm(s, l, m, t)
    return total


def map_dot(map1: SpinMap, map2: SpinMap) -> complex:
    """Quadrature inner product integral of map1 * conj(map2) over the sphere."""
    w = map1.grid.gl_weights
    dphi = 2.0 * math.pi / map1.grid.n_phi
    return complex(np.einsum("j,jk->", w, map1.values * np.conj(map2.values)) * dphi)
