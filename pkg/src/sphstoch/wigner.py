"""Generalized spherical functions and Wigner d/D functions.

Matrix elements of the weight-l irreducible unitary representations of the
rotation group, in two parameterizations:

    T^l_mn(phi1, theta, phi2) = exp(-i m phi1) P^l_mn(cos theta) exp(-i n phi2)

on zxz Euler angles, where P^l_mn carries the i^(m-n) phase of its Rodrigues
(differential) definition, and

    D^l_mn(phi1, theta, phi2) = exp(-i m phi1) d^l_mn(cos theta) exp(-i n phi2)

on zyz angles with the real d-functions. The two are tied by
D^l_mn = (-i)^(n-m) T^l_mn at equal angle triples. P and d differ only by
phase: P^l_mn = i^(n-m) d^l_mn.

Two evaluation paths are provided. ``rodrigues_P`` is the slow exact oracle:
it differentiates the defining polynomial in integer arithmetic, cancels the
singular prefactors symbolically, and only then evaluates, so the poles
z = +-1 are reached without division by zero. ``wigner_d`` is the fast path,
a numerically stable three-term recursion in the degree (the Rodrigues form
loses all accuracy in floating point beyond moderate degree).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import ConventionError
from .rotations import Convention, EulerAngles

_I_POW = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


def phase_i(k: int) -> complex:
    """i**k for integer k."""
    return _I_POW[k % 4]


def _check_index(l, m, n):
    if l < 0:
        raise ValueError(f"degree l must be nonnegative, got {l}")
    if abs(m) > l or abs(n) > l:
        raise ValueError(f"orders out of range: l={l}, m={m}, n={n}")


@dataclass(frozen=True)
class WignerIndex:
    l: int
    m: int
    n: int

    def __post_init__(self):
        _check_index(self.l, self.m, self.n)


# ---------------------------------------------------------------------------
# Exact oracle
# ---------------------------------------------------------------------------

def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


def _poly_binomial(sign, k):
    # integer coefficients of (1 + sign*x)^k
    out = [1]
    for _ in range(k):
        out = _poly_mul(out, [1, sign])
    return out


def _poly_diff(p, times):
    for _ in range(times):
        p = [i * c for i, c in enumerate(p)][1:] or [0]
    return p


def _divide_one_minus_x(p):
    # p(x) = (1-x) q(x); p_k = q_k - q_{k-1}
    deg = len(p) - 1
    q = [0] * deg
    prev = 0
    for k in range(deg):
        qk = p[k] + prev
        q[k] = qk
        prev = qk
    if p[deg] != -q[deg - 1]:
        raise ArithmeticError("inexact division by (1-x)")
    return q


def _divide_one_plus_x(p):
    # p(x) = (1+x) q(x); p_k = q_k + q_{k-1}
    deg = len(p) - 1
    q = [0] * deg
    prev = 0
    for k in range(deg):
        qk = p[k] - prev
        q[k] = qk
        prev = qk
    if p[deg] != q[deg - 1]:
        raise ArithmeticError("inexact division by (1+x)")
    return q


@lru_cache(maxsize=4096)
def _rodrigues_cached(l, m, n):
    """Pre-cancelled polynomial and real normalization for P^l_mn.

    P^l_mn(z) = i^(m-n) * norm * (1-z)^(|n-m|/2) (1+z)^(|n+m|/2) * poly(z).
    The derivative of (1-z)^(l-m)(1+z)^(l+m) is taken in integer arithmetic
    and the singular prefactor powers are divided out exactly, so endpoint
    evaluation never divides by zero.
    """
    poly = _poly_mul(_poly_binomial(-1, l - m), _poly_binomial(+1, l + m))
    poly = _poly_diff(poly, l - n)
    for _ in range(max(n - m, 0)):
        poly = _divide_one_minus_x(poly)
    for _ in range(max(n + m, 0)):
        poly = _divide_one_plus_x(poly)
    ratio = Fraction(
        math.factorial(l + n),
        math.factorial(l - m) * math.factorial(l + m) * math.factorial(l - n),
    )
    norm = math.sqrt(ratio) / 2.0**l
    if (l - m) % 2:
        norm = -norm
    return tuple(poly), norm


def rodrigues_P(l: int, m: int, n: int, z: float) -> complex:
    """Exact-differentiation oracle for P^l_mn(z), endpoints included."""
    _check_index(l, m, n)
    if not -1.0 <= z <= 1.0:
        raise ValueError(f"z must lie in [-1, 1], got {z!r}")
    poly, norm = _rodrigues_cached(l, m, n)
    val = 0.0
    for c in reversed(poly):  # Horner
        val = val * z + c
    pref = math.sqrt(1.0 - z) ** abs(n - m) * math.sqrt(1.0 + z) ** abs(n + m)
    return phase_i(m - n) * (norm * pref * val)


# ---------------------------------------------------------------------------
# Fast path
# ---------------------------------------------------------------------------

def _seed_scalar(l0, m, n, c2, s2):
    if abs(n) >= abs(m):
        if n == l0:
            sign, k, a, b = 1.0, l0 - m, l0 + m, l0 - m
        else:
            sign, k, a, b = (-1.0) ** ((l0 + m) % 2), l0 + m, l0 - m, l0 + m
    else:
        if m == l0:
            sign, k, a, b = (-1.0) ** ((l0 - n) % 2), l0 - n, l0 + n, l0 - n
        else:
            sign, k, a, b = 1.0, l0 + n, l0 - n, l0 + n
    return sign * math.sqrt(math.comb(2 * l0, k)) * c2**a * s2**b


def wigner_d(l: int, m: int, n: int, theta: float) -> float:
    """Real Wigner d^l_mn(cos theta) by stable degree recursion."""
    _check_index(l, m, n)
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta!r}")
    l0 = max(abs(m), abs(n))
    z = math.cos(theta)
    cur = _seed_scalar(l0, m, n, math.cos(theta / 2.0), math.sin(theta / 2.0))
    prev = 0.0
    for k in range(l0, l):
        if k == 0:
            cur, prev = z * cur, cur
            continue
        kp = k + 1
        num = (2 * k + 1) * (k * kp * z - m * n) * cur - kp * math.sqrt(
            (k * k - m * m) * (k * k - n * n)
        ) * prev
        den = k * math.sqrt((kp * kp - m * m) * (kp * kp - n * n))
        cur, prev = num / den, cur
    return cur


def wigner_d_table(l_max: int, n: int, theta) -> np.ndarray:
    """All-degree d-table at fixed column n; shape (l_max+1, 2*l_max+1, J)."""
    theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    if theta.min() < 0.0 or theta.max() > math.pi:
        raise ValueError("theta nodes must lie in [0, pi]")
    return kernels.d_table(int(l_max), int(n), np.ascontiguousarray(theta))


@dataclass(frozen=True)
class WignerBlock:
    """Full (2l+1)x(2l+1) table of d^l_mn at one angle; rows m, columns n."""

    l: int
    theta: float
    values: np.ndarray


_block_lock = threading.Lock()


@lru_cache(maxsize=256)
def _block_cached(l: int, theta: float) -> WignerBlock:
    cols = [
        wigner_d_table(l, n, np.array([theta]))[l, :, 0] for n in range(-l, l + 1)
    ]
    vals = np.column_stack(cols)
    vals.setflags(write=False)
    return WignerBlock(l, theta, vals)


def wigner_d_block(l: int, theta: float) -> WignerBlock:
    """Cached full d-block; concurrent builds of one key are idempotent."""
    with _block_lock:
        return _block_cached(int(l), float(theta))


def _phases(l, angle):
    ms = np.arange(-l, l + 1)
    return np.exp(-1j * ms * angle)


def wigner_matrix(l: int, g: EulerAngles) -> np.ndarray:
    """Unitary (2l+1)x(2l+1) representation matrix of g at weight l.

    For zxz angles this is the T^l matrix (generalized spherical functions);
    for zyz angles the Wigner D^l matrix. Rows are indexed by m = -l..l,
    columns by n = -l..l.
    """
    if l < 0:
        raise ValueError("l must be nonnegative")
    d = wigner_d_block(l, g.theta).values
    ms = np.arange(-l, l + 1)
    if g.convention is Convention.ZXZ:
        mid = _I_POW_ARR((ms[None, :] - ms[:, None]) % 4) * d
    else:
        mid = d.astype(complex)
    return _phases(l, g.phi1)[:, None] * mid * _phases(l, g.phi2)[None, :]


def _I_POW_ARR(k):
    return np.asarray(_I_POW, dtype=complex)[k]


def wigner_matrix_stack(l_max: int, g: EulerAngles) -> list:
    """Representation matrices for every degree l = 0..l_max at one rotation.

    Builds all degrees from shared column tables, much cheaper than repeated
    wigner_matrix calls when the whole tower is needed.
    """
    big_l = int(l_max)
    theta = np.array([g.theta])
    cols = [wigner_d_table(big_l, n, theta)[:, :, 0] for n in range(-big_l, big_l + 1)]
    out = []
    for l in range(big_l + 1):
        d = np.column_stack(
            [cols[n + big_l][l, big_l - l : big_l + l + 1] for n in range(-l, l + 1)]
        )
        ms = np.arange(-l, l + 1)
        if g.convention is Convention.ZXZ:
            mid = _I_POW_ARR((ms[None, :] - ms[:, None]) % 4) * d
        else:
            mid = d.astype(complex)
        out.append(_phases(l, g.phi1)[:, None] * mid * _phases(l, g.phi2)[None, :])
    return out


def eval_T(l: int, m: int, n: int, g: EulerAngles) -> complex:
    """Generalized spherical function T^l_mn(g); g must carry zxz angles."""
    if g.convention is not Convention.ZXZ:
        raise ConventionError("eval_T requires zxz Euler angles")
    _check_index(l, m, n)
    return (
        np.exp(-1j * m * g.phi1)
        * phase_i(n - m)
        * wigner_d(l, m, n, g.theta)
        * np.exp(-1j * n * g.phi2)
    )


def eval_D(l: int, m: int, n: int, g: EulerAngles) -> complex:
    """Wigner D^l_mn(g); g must carry zyz angles."""
    if g.convention is not Convention.ZYZ:
        raise ConventionError("eval_D requires zyz Euler angles")
    _check_index(l, m, n)
    return (
        np.exp(-1j * m * g.phi1)
        * wigner_d(l, m, n, g.theta)
        * np.exp(-1j * n * g.phi2)
    )


# ---------------------------------------------------------------------------
# Orthogonality over the group
# ---------------------------------------------------------------------------

def so3_orthogonality(l_max: int, n_theta: int | None = None, n_phi: int | None = None):
    """Quadrature Gram matrix of the D^l_mn over the rotation group.

    Integrates D conj(D') with the unnormalized invariant measure
    sin(theta) dphi1 dtheta dphi2 (total mass 8 pi^2) by product quadrature:
    Gauss-Legendre in theta, uniform (trapezoidal on the periodic interval)
    in phi1 and phi2. Returns (gram, expected) where expected carries
    8 pi^2 / (2l+1) on the diagonal and zero elsewhere.
    """
    if n_theta is None:
        n_theta = l_max + 1
    if n_phi is None:
        n_phi = 2 * l_max + 2
    x, w = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(x)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi

    idx = [(l, m, n) for l in range(l_max + 1) for m in range(-l, l + 1) for n in range(-l, l + 1)]
    dvals = np.empty((len(idx), n_theta))
    tabs = {n: wigner_d_table(l_max, n, theta) for n in range(-l_max, l_max + 1)}
    for row, (l, m, n) in enumerate(idx):
        dvals[row] = tabs[n][l, m + l_max]

    # uniform sums over the periodic phi factors
    orders = np.arange(-l_max, l_max + 1)
    ediff = np.exp(-1j * np.subtract.outer(orders, orders)[..., None] * phi[None, None, :])
    phi_sum = ediff.sum(axis=2) * (2.0 * np.pi / n_phi)

    theta_gram = np.einsum("aj,bj,j->ab", dvals, dvals, w)
    marr = np.array([m for (_, m, _) in idx])
    narr = np.array([n for (_, _, n) in idx])
    gram = (
        theta_gram
        * phi_sum[marr[:, None] + l_max, marr[None, :] + l_max]
        * phi_sum[narr[:, None] + l_max, narr[None, :] + l_max]
    )
    larr = np.array([l for (l, _, _) in idx])
    expected = np.zeros_like(gram)
    same = (larr[:, None] == larr[None, :]) & (marr[:, None] == marr[None, :]) & (
        narr[:, None] == narr[None, :]
    )
    expected[same] = (8.0 * np.pi**2 / (2.0 * larr + 1.0))[np.where(same)[0]]
    return gram, expected
