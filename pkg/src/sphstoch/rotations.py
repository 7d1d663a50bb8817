"""Euler-angle parameterizations of proper rotations and their group operations.

Two conventions are supported: zxz (rotate about z, then the new x, then the
new z) and zyz (middle rotation about the new y). Composition goes through
3x3 matrices so there is a single numerically uniform code path; angle
extraction canonicalizes gimbal-locked rotations by folding the whole
z-rotation into the first angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConventionError

TWO_PI = 2.0 * math.pi

_ANGLE_EPS = 1e-9       # tolerance for clamping theta onto [0, pi]
_GIMBAL_EPS = 1e-12     # sin(theta) below this is treated as a lock


class Convention(Enum):
    ZXZ = "zxz"
    ZYZ = "zyz"


def _wrap(angle: float) -> float:
    """Normalize an angle to [0, 2*pi)."""
    a = math.fmod(float(angle), TWO_PI)
    if a < 0.0:
        a += TWO_PI
    if a >= TWO_PI:  # fmod can land exactly on 2*pi after the add
        a = 0.0
    return a


def _clamp_polar(theta: float, what: str) -> float:
    t = float(theta)
    if -_ANGLE_EPS <= t < 0.0:
        return 0.0
    if math.pi < t <= math.pi + _ANGLE_EPS:
        return math.pi
    if not 0.0 <= t <= math.pi:
        raise ValueError(f"{what} must lie in [0, pi], got {theta!r}")
    return t


@dataclass(frozen=True)
class EulerAngles:
    """A rotation given by three Euler angles plus its convention tag.

    phi1 and phi2 are stored normalized to [0, 2*pi); theta lies in [0, pi].
    """

    phi1: float
    theta: float
    phi2: float
    convention: Convention = Convention.ZXZ

    def __post_init__(self):
        object.__setattr__(self, "phi1", _wrap(self.phi1))
        object.__setattr__(self, "theta", _clamp_polar(self.theta, "theta"))
        object.__setattr__(self, "phi2", _wrap(self.phi2))
        if not isinstance(self.convention, Convention):
            raise ConventionError(f"unknown convention {self.convention!r}")


@dataclass(frozen=True)
class SpherePoint:
    """Point on the unit sphere: colatitude theta in [0, pi], longitude phi."""

    theta: float
    phi: float

    def __post_init__(self):
        object.__setattr__(self, "theta", _clamp_polar(self.theta, "theta"))
        object.__setattr__(self, "phi", _wrap(self.phi))

    def unit_vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array(
            [st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)]
        )


def identity(convention: Convention = Convention.ZXZ) -> EulerAngles:
    return EulerAngles(0.0, 0.0, 0.0, convention)


def _rz(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _rx(t: float) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def _ry(t: float) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rotation_matrix(g: EulerAngles) -> np.ndarray:
    """3x3 proper orthogonal matrix of the rotation (active convention)."""
    mid = _rx if g.convention is Convention.ZXZ else _ry
    return _rz(g.phi1) @ mid(g.theta) @ _rz(g.phi2)


def validate_rotation_matrix(m: np.ndarray, tol: float = 1e-12) -> None:
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise ValueError(f"rotation matrix must be 3x3, got {m.shape}")
    if np.abs(m.T @ m - np.eye(3)).max() > tol:
        raise ValueError("matrix is not orthogonal")
    if abs(np.linalg.det(m) - 1.0) > tol:
        raise ValueError("matrix determinant is not +1")


def angles_from_matrix(m: np.ndarray, convention: Convention = Convention.ZXZ) -> EulerAngles:
    """Extract Euler angles from a rotation matrix.

    At gimbal lock (theta = 0 or pi) the decomposition is not unique; the
    canonical form puts the whole residual z-rotation in phi1 and sets
    phi2 = 0.
    """
    validate_rotation_matrix(m)
    if convention is Convention.ZXZ:
        s_theta = math.hypot(m[2, 0], m[2, 1])
        theta = math.atan2(s_theta, m[2, 2])
        if s_theta > _GIMBAL_EPS:
            phi1 = math.atan2(m[0, 2], -m[1, 2])
            phi2 = math.atan2(m[2, 0], m[2, 1])
        else:
            theta = 0.0 if m[2, 2] > 0.0 else math.pi
            phi1 = math.atan2(m[1, 0], m[0, 0])
            phi2 = 0.0
    elif convention is Convention.ZYZ:
        s_theta = math.hypot(m[0, 2], m[1, 2])
        theta = math.atan2(s_theta, m[2, 2])
        if s_theta > _GIMBAL_EPS:
            phi1 = math.atan2(m[1, 2], m[0, 2])
            phi2 = math.atan2(m[2, 1], -m[2, 0])
        else:
            if m[2, 2] > 0.0:
                theta = 0.0
                phi1 = math.atan2(m[1, 0], m[0, 0])
            else:
                theta = math.pi
                phi1 = math.atan2(-m[0, 1], -m[0, 0])
            phi2 = 0.0
    else:  # pragma: no cover
        raise ConventionError(f"unknown convention {convention!r}")
    return EulerAngles(phi1, theta, phi2, convention)


def compose(g1: EulerAngles, g2: EulerAngles) -> EulerAngles:
    """Group product g1*g2 (apply g2 first, then g1)."""
    if g1.convention is not g2.convention:
        raise ConventionError(
            f"cannot compose {g1.convention.value} with {g2.convention.value}"
        )
    return angles_from_matrix(rotation_matrix(g1) @ rotation_matrix(g2), g1.convention)


def inverse(g: EulerAngles) -> EulerAngles:
    """Inverse rotation; in angles, (phi1, theta, phi2) -> (pi-phi2, theta, pi-phi1)."""
    return EulerAngles(math.pi - g.phi2, g.theta, math.pi - g.phi1, g.convention)


def convert_convention(g: EulerAngles, target: Convention) -> EulerAngles:
    """Re-express the same rotation in the other convention.

    The two parameterizations differ by quarter-turn shifts of the outer
    angles: R_zyz(a, b, c) = R_zxz(a + pi/2, b, c - pi/2).
    """
    if g.convention is target:
        return g
    if g.convention is Convention.ZYZ and target is Convention.ZXZ:
        return EulerAngles(g.phi1 + math.pi / 2, g.theta, g.phi2 - math.pi / 2, target)
    if g.convention is Convention.ZXZ and target is Convention.ZYZ:
        return EulerAngles(g.phi1 - math.pi / 2, g.theta, g.phi2 + math.pi / 2, target)
    raise ConventionError(f"unknown convention {target!r}")  # pragma: no cover


def point_to_rotation(t: SpherePoint, phi2: float = 0.0) -> EulerAngles:
    """A zxz rotation carrying the north pole to t; phi2 fixes the residual
    rotation about t itself."""
    return EulerAngles(t.phi + math.pi / 2, t.theta, phi2, Convention.ZXZ)


def apply_to_point(g: EulerAngles, t: SpherePoint) -> SpherePoint:
    v = rotation_matrix(g) @ t.unit_vector()
    theta = math.acos(max(-1.0, min(1.0, v[2])))
    phi = math.atan2(v[1], v[0])
    return SpherePoint(theta, phi)
