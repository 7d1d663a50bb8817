"""Random expansion coefficients and spectral synthesis of isotropic fields.

A weakly isotropic spin-s Gaussian field is synthesized as
f = sum_lm a_lm sY^l_m with a_lm = sqrt(c_l) Z_lm, where the Z_lm are
uncorrelated with zero mean and unit variance and c_l = E|a_lm|^2 is the
angular power spectrum. Coefficient streams are counter-based: every draw is
a pure function of (seed, realization, l, m), so sampling is reproducible
under any iteration or parallelization order.

The conjugate-symmetric mode enforces conj(Z_lm) = (-1)^(l-m) Z_{l,-m}
bit-exactly (m > 0 sampled freely, m < 0 derived; at m = 0 the relation
forces Z_l0 real for even l and purely imaginary for odd l, with variance 1).

Two generators are provided: the complex-Gaussian default, and a
fixed-modulus, uniform-phase alternative which keeps all second moments but
is deliberately non-Gaussian (its coefficients are uncorrelated yet
dependent).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConsistencyError
from .harmonics import (
    SphereGrid,
    SpinMap,
    TriangularCoefficients,
    legendre_P,
    norm_l,
    synthesize,
)
from .rotations import Convention, EulerAngles, SpherePoint, convert_convention, inverse
from .wigner import phase_i, wigner_d_table

_MASK64 = (1 << 64) - 1
_KEY_SALT = 0x9E3779B97F4A7C15  # distinguishes coefficient streams from other uses


class GeneratorKind(Enum):
    GAUSSIAN = "gaussian"
    FIXED_MODULUS = "fixed-modulus"


class Symmetry(Enum):
    CONJUGATE_SYMMETRIC = "conj"
    UNCONSTRAINED_COMPLEX = "free"


@dataclass
class PowerSpectrum:
    """Nonnegative c_l = E|a_lm|^2 per degree, tagged with a spin."""

    l_max: int
    spin: int
    c_l: np.ndarray

    def __post_init__(self):
        self.c_l = np.asarray(self.c_l, dtype=float)
        if self.c_l.shape != (self.l_max + 1,):
            raise ValueError(f"need {self.l_max + 1} spectrum values, got {self.c_l.shape}")
        if np.any(self.c_l < 0):
            raise ValueError("power spectrum values must be nonnegative")
        if np.any(self.c_l[: abs(self.spin)] != 0):
            raise ValueError(f"c_l must vanish for l < |spin| = {abs(self.spin)}")

    @classmethod
    def flat(cls, l_max: int, spin: int = 0, value: float = 1.0) -> "PowerSpectrum":
        c = np.full(l_max + 1, float(value))
        c[: abs(spin)] = 0.0
        return cls(l_max, spin, c)


@dataclass
class FieldModel:
    """Spectrum plus the sampling law; the seed fully determines all draws."""

    spectrum: PowerSpectrum
    seed: int = 0
    generator: GeneratorKind = GeneratorKind.GAUSSIAN
    symmetry: Symmetry = Symmetry.CONJUGATE_SYMMETRIC


@dataclass
class CoefficientEnsemble:
    """Realizations sharing one spectrum; z_stack holds the unit-variance Z."""

    spectrum: PowerSpectrum
    symmetry: Symmetry
    generator: GeneratorKind
    z_stack: np.ndarray  # (n_realizations, (l_max+1)^2)

    @property
    def n_realizations(self) -> int:
        return self.z_stack.shape[0]

    @property
    def l_max(self) -> int:
        return self.spectrum.l_max

    def coefficients(self, r: int) -> TriangularCoefficients:
        return _scale_to_coefficients(self.spectrum, self.z_stack[r])

    @property
    def realizations(self):
        return [self.coefficients(r) for r in range(self.n_realizations)]


def _scale_to_coefficients(spectrum, z_flat):
    big_l = spectrum.l_max
    amp = np.sqrt(spectrum.c_l)
    vals = z_flat.copy()
    for l in range(big_l + 1):
        vals[l * l : (l + 1) ** 2] *= amp[l]
    return TriangularCoefficients(big_l, spectrum.spin, vals)


def _raw_doubles(seed: int, realization: int, count: int, domain: int = 0):
    """2*count uniforms, a pure function of (seed, realization, slot index).

    The block counter advances only the low counter word, so distinct
    realizations and domains occupy provably disjoint counter ranges.
    """
    bits = np.random.Philox(
        counter=[0, int(realization) & _MASK64, int(domain) & _MASK64, 0],
        key=[int(seed) & _MASK64, _KEY_SALT],
    )
    words = bits.random_raw(2 * count).astype(np.uint64)
    u1 = ((words[0::2] >> np.uint64(11)) + np.uint64(1)) * (2.0**-53)  # (0, 1]
    u2 = (words[1::2] >> np.uint64(11)) * (2.0**-53)  # [0, 1)
    return u1, u2


def sample_z(model: FieldModel, realization: int = 0, domain: int = 0) -> np.ndarray:
    """Unit-variance coefficient vector Z, flat (l_max+1)^2 layout."""
    big_l = model.spectrum.l_max
    n_coef = (big_l + 1) ** 2
    z = np.zeros(n_coef, dtype=complex)
    symmetric = model.symmetry is Symmetry.CONJUGATE_SYMMETRIC

    if symmetric:
        slots = [(l, m) for l in range(big_l + 1) for m in range(l + 1)]
    else:
        slots = [(l, m) for l in range(big_l + 1) for m in range(-l, l + 1)]
    u1, u2 = _raw_doubles(model.seed, realization, len(slots), domain)

    if model.generator is GeneratorKind.GAUSSIAN:
        radius = np.sqrt(-2.0 * np.log(u1))
        x = radius * np.cos(2.0 * math.pi * u2)
        y = radius * np.sin(2.0 * math.pi * u2)
        draws = (x + 1j * y) / math.sqrt(2.0)
        axis = x  # variance-1 real draw for self-conjugate slots
    else:
        draws = np.exp(2j * math.pi * u2)
        axis = np.where(u2 < 0.5, -1.0, 1.0)

    for k, (l, m) in enumerate(slots):
        if symmetric and m == 0:
            z[l * l + l] = axis[k] if l % 2 == 0 else 1j * axis[k]
        else:
            z[l * l + l + m] = draws[k]
    if symmetric:
        for l in range(big_l + 1):
            for m in range(1, l + 1):
                z[l * l + l - m] = (-1.0) ** ((l - m) % 2) * np.conj(z[l * l + l + m])
    return z


def sample_coefficients(model: FieldModel, realization: int = 0) -> TriangularCoefficients:
    """One realization a_lm = sqrt(c_l) Z_lm."""
    return _scale_to_coefficients(model.spectrum, sample_z(model, realization))


def sample_tensor_pair(model: FieldModel, realization: int = 0, coupled: bool = False):
    """Spin +2 / -2 coefficient pair for one realization.

    By default the two families are sampled independently (separate counter
    domains). With coupled=True the second set is the conjugate partner of
    the first, which makes the assembled tensor observables real.
    """
    if model.spectrum.spin != 2:
        raise ValueError("tensor pair sampling expects a spin 2 spectrum")
    a_coeffs = _scale_to_coefficients(model.spectrum, sample_z(model, realization))
    if coupled:
        return a_coeffs, conjugate_partner(a_coeffs)
    spec_b = PowerSpectrum(model.spectrum.l_max, -2, model.spectrum.c_l)
    b_z = sample_z(model, realization, domain=1)
    return a_coeffs, _scale_to_coefficients(spec_b, b_z)


def sample_ensemble(model: FieldModel, n_realizations: int, start: int = 0) -> CoefficientEnsemble:
    big_l = model.spectrum.l_max
    stack = np.empty((n_realizations, (big_l + 1) ** 2), dtype=complex)
    for r in range(n_realizations):
        stack[r] = sample_z(model, start + r)
    return CoefficientEnsemble(model.spectrum, model.symmetry, model.generator, stack)


def synthesize_field(model: FieldModel, grid: SphereGrid, realization: int = 0,
                     workers: int = 1) -> SpinMap:
    """One realization of the field, restricted to the phi2 = 0 frame slice."""
    return synthesize(sample_coefficients(model, realization), grid, workers=workers)


# ---------------------------------------------------------------------------
# The full group-domain view
# ---------------------------------------------------------------------------

def frame_point(g: EulerAngles) -> SpherePoint:
    """Sphere point where the moving frame of g sits: phi = pi/2 - phi1."""
    if g.convention is not Convention.ZXZ:
        g = convert_convention(g, Convention.ZXZ)
    return SpherePoint(g.theta, math.pi / 2.0 - g.phi1)


def point_frame(t: SpherePoint, phi2: float = 0.0) -> EulerAngles:
    """Moving-frame rotation sitting at t (inverse of frame_point)."""
    return EulerAngles(math.pi / 2.0 - t.phi, t.theta, phi2, Convention.ZXZ)


def lift_to_SO3(coeffs: TriangularCoefficients, g: EulerAngles) -> complex:
    """Evaluate the spin-s component on the full rotation group.

    The series is sum_lm w_lm T^l_{s,m}(g^{-1}) with
    w_lm = norm_l(l) * i^(-s) * a_{l,-m}; it carries the factor e^(i s phi2)
    in the third Euler angle and restricts at phi2 = 0 to the spin-s
    synthesis at the frame point of g.
    """
    if g.convention is not Convention.ZXZ:
        g = convert_convention(g, Convention.ZXZ)
    s = coeffs.spin
    big_l = coeffs.l_max
    ginv = inverse(g)
    if abs(s) > big_l:
        return 0.0 + 0.0j
    # T^l_{s,m}(ginv) = e^{-i s phi1'} i^{m-s} d^l_{s,m}(theta) e^{-i m phi2'}
    # with d^l_{s,m} = (-1)^{s-m} d^l_{m,s} taken from the column-s table.
    tab = wigner_d_table(big_l, s, np.array([ginv.theta]))[:, :, 0]
    ms = np.arange(-big_l, big_l + 1)
    row_phase = (
        phase_i(-s)
        * np.exp(-1j * s * ginv.phi1)
        * np.array([phase_i(int(m) - s) * (-1.0) ** ((s - int(m)) % 2) for m in ms])
        * np.exp(-1j * ms * ginv.phi2)
    )
    amat = coeffs.matrix()
    w = norm_l(np.arange(big_l + 1))[:, None] * amat[:, ::-1]  # column m holds a_{l,-m}
    return complex(np.sum(w * (row_phase[None, :] * tab)))


# ---------------------------------------------------------------------------
# Component assembly
# ---------------------------------------------------------------------------

def _check_conjugate_pair(plus: SpinMap, minus: SpinMap, tol: float = 1e-10):
    if plus.grid is not minus.grid and (
        plus.grid.n_theta != minus.grid.n_theta or plus.grid.n_phi != minus.grid.n_phi
    ):
        raise ConsistencyError("paired maps must share one grid")
    scale = max(1.0, float(np.abs(plus.values).max()))
    resid = float(np.abs(minus.values - np.conj(plus.values)).max())
    if resid > tol * scale:
        raise ConsistencyError(
            f"conjugacy violated: max residual {resid:.3e} exceeds {tol:.1e}"
        )


def vector_components(xplus: SpinMap, xminus: SpinMap):
    """Tangent components (X_theta, X_phi) from the spin +-1 pair.

    At the phi2 = 0 slice the pair reads X_+ = -X_phi + i X_theta and
    X_- = conj(X_+); inverts that linear relation.
    """
    if xplus.spin != 1 or xminus.spin != -1:
        raise ConsistencyError("expected spin +1 and spin -1 maps")
    _check_conjugate_pair(xplus, xminus)
    x_theta = np.ascontiguousarray(xplus.values.imag)
    x_phi = np.ascontiguousarray(-xplus.values.real)
    return x_theta, x_phi


def components_to_vector(grid: SphereGrid, x_theta, x_phi):
    """Inverse of vector_components: build the spin +-1 pair."""
    vplus = -np.asarray(x_phi, float) + 1j * np.asarray(x_theta, float)
    return SpinMap(grid, 1, vplus), SpinMap(grid, -1, np.conj(vplus))


def stokes_from_spin2(a_map: SpinMap, b_map: SpinMap):
    """Linear-polarization pair (Q, U) from the spin +-2 component maps.

    The phi2 = 0 slice of the spin +2 component is 2(X_phiphi + i X_thetaphi)
    for a symmetric trace-free tangent tensor (X_thetatheta = -X_phiphi,
    X_phitheta = X_thetaphi); Q and U are its half real and imaginary parts.
    """
    if a_map.spin != 2 or b_map.spin != -2:
        raise ConsistencyError("expected spin +2 and spin -2 maps")
    _check_conjugate_pair(a_map, b_map)
    q = np.ascontiguousarray(a_map.values.real) / 2.0
    u = np.ascontiguousarray(a_map.values.imag) / 2.0
    return q, u


def spin2_from_stokes(grid: SphereGrid, q, u):
    """Inverse of stokes_from_spin2."""
    a = 2.0 * (np.asarray(q, float) + 1j * np.asarray(u, float))
    return SpinMap(grid, 2, a), SpinMap(grid, -2, np.conj(a))


def conjugate_partner(coeffs: TriangularCoefficients) -> TriangularCoefficients:
    """Spin -s coefficients whose synthesis is the pointwise conjugate map.

    b_lm = (-1)^(m+s) conj(a_{l,-m}); pairing a spin +2 (or +1) set with this
    partner yields real Q/U (or a real tangent vector field).
    """
    s = coeffs.spin
    amat = coeffs.matrix()
    big_l = coeffs.l_max
    ms = np.arange(-big_l, big_l + 1)
    signs = (-1.0) ** (np.abs(ms + s) % 2)
    bmat = signs[None, :] * np.conj(amat[:, ::-1])
    return TriangularCoefficients.from_matrix(bmat, -s)


# ---------------------------------------------------------------------------
# Covariance series
# ---------------------------------------------------------------------------

def covariance_series(spectrum: PowerSpectrum, g12: EulerAngles) -> complex:
    """Closed-form covariance R(g1^{-1} g2) = sum_l (2l+1)/(4 pi) c_l T^l_ss(g12).

    For spin 0 only the middle angle of g12 matters and the series is the
    Legendre sum (1/4 pi) sum_l (2l+1) c_l P_l(cos theta). Truncation at the
    spectrum band limit is exact when c_l vanishes beyond it.
    """
    if g12.convention is not Convention.ZXZ:
        g12 = convert_convention(g12, Convention.ZXZ)
    s = spectrum.spin
    big_l = spectrum.l_max
    dss = wigner_d_table(big_l, s, np.array([g12.theta]))[:, s + big_l, 0]
    ls = np.arange(big_l + 1)
    weights = (2.0 * ls + 1.0) / (4.0 * math.pi) * spectrum.c_l
    phase = np.exp(-1j * s * (g12.phi1 + g12.phi2))  # P_ss carries no i-power
    return complex(phase * np.sum(weights * dss))


def covariance_series_angle(spectrum: PowerSpectrum, beta) -> np.ndarray:
    """Covariance along the one-parameter separation g12 = (0, beta, 0)."""
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    s = spectrum.spin
    big_l = spectrum.l_max
    if s == 0:
        ls = np.arange(big_l + 1)
        out = np.zeros(beta.shape, dtype=complex)
        z = np.cos(beta)
        for l in ls:
            if spectrum.c_l[l]:
                out += (2 * l + 1) / (4.0 * math.pi) * spectrum.c_l[l] * legendre_P(l, z)
        return out
    tab = wigner_d_table(big_l, s, beta)
    ls = np.arange(big_l + 1)
    weights = (2.0 * ls + 1.0) / (4.0 * math.pi) * spectrum.c_l
    return np.einsum("l,lj->j", weights, tab[:, s + big_l, :]).astype(complex)
