import math

import numpy as np
import pytest

from sphstoch import (
    Convention,
    ConventionError,
    EulerAngles,
    SpherePoint,
    angles_from_matrix,
    compose,
    convert_convention,
    identity,
    inverse,
    point_to_rotation,
    rotation_matrix,
)


def random_angles(rng, convention=Convention.ZXZ):
    return EulerAngles(
        rng.uniform(0, 2 * math.pi),
        rng.uniform(0.01, math.pi - 0.01),
        rng.uniform(0, 2 * math.pi),
        convention,
    )


def mats_close(g1, g2, tol=1e-12):
    return np.abs(rotation_matrix(g1) - rotation_matrix(g2)).max() <= tol


def test_identity_is_neutral():
    g = EulerAngles(0.7, 1.2, 2.5)
    assert mats_close(compose(identity(), g), g)
    assert mats_close(compose(g, identity()), g)


def test_compose_with_inverse_gives_identity():
    rng = np.random.default_rng(0)
    for _ in range(20):
        g = random_angles(rng)
        e = compose(g, inverse(g))
        assert np.abs(rotation_matrix(e) - np.eye(3)).max() < 1e-12


def test_z_rotations_add():
    a = EulerAngles(math.pi / 4, 0.0, 0.0)
    out = compose(a, a)
    assert out.phi1 == pytest.approx(math.pi / 2, abs=1e-14)
    assert out.theta == 0.0
    assert out.phi2 == 0.0


def test_inverse_identity():
    e = inverse(identity())
    assert mats_close(e, identity())


def test_inverse_closed_form():
    g = inverse(EulerAngles(math.pi / 2, math.pi / 3, math.pi / 4))
    assert g.phi1 == pytest.approx(3 * math.pi / 4, abs=1e-15)
    assert g.theta == pytest.approx(math.pi / 3, abs=1e-15)
    assert g.phi2 == pytest.approx(math.pi / 2, abs=1e-15)


@pytest.mark.parametrize("convention", [Convention.ZXZ, Convention.ZYZ])
def test_inverse_matrix_is_transpose(convention):
    rng = np.random.default_rng(1)
    for _ in range(50):
        g = random_angles(rng, convention)
        assert np.abs(
            rotation_matrix(inverse(g)) - rotation_matrix(g).T
        ).max() < 1e-12


def test_associativity():
    rng = np.random.default_rng(2)
    for _ in range(100):
        g1, g2, g3 = (random_angles(rng) for _ in range(3))
        left = compose(compose(g1, g2), g3)
        right = compose(g1, compose(g2, g3))
        assert mats_close(left, right)


@pytest.mark.parametrize("convention", [Convention.ZXZ, Convention.ZYZ])
def test_matrix_round_trip(convention):
    rng = np.random.default_rng(3)
    for _ in range(50):
        g = random_angles(rng, convention)
        back = angles_from_matrix(rotation_matrix(g), convention)
        assert mats_close(g, back)


@pytest.mark.parametrize("theta", [0.0, math.pi])
@pytest.mark.parametrize("convention", [Convention.ZXZ, Convention.ZYZ])
def test_matrix_round_trip_at_gimbal_lock(theta, convention):
    g = EulerAngles(1.1, theta, 2.2, convention)
    back = angles_from_matrix(rotation_matrix(g), convention)
    assert back.phi2 == 0.0
    assert mats_close(g, back)


def test_convention_conversion_preserves_matrix():
    rng = np.random.default_rng(4)
    for _ in range(50):
        g = random_angles(rng, Convention.ZYZ)
        h = convert_convention(g, Convention.ZXZ)
        assert h.convention is Convention.ZXZ
        assert mats_close(g, h)
        assert mats_close(convert_convention(h, Convention.ZYZ), g)


def test_quarter_turn_adjustment():
    # same rotation: zyz(a, b, c) == zxz(a + pi/2, b, c - pi/2)
    a, b, c = 0.8, 1.1, 2.9
    g_zyz = EulerAngles(a, b, c, Convention.ZYZ)
    g_zxz = EulerAngles(a + math.pi / 2, b, c - math.pi / 2, Convention.ZXZ)
    assert mats_close(g_zyz, g_zxz)


def test_identity_converts_to_identity():
    e = convert_convention(identity(Convention.ZXZ), Convention.ZYZ)
    assert mats_close(e, identity(Convention.ZYZ))


def test_mixed_convention_compose_rejected():
    g1 = EulerAngles(0.1, 0.2, 0.3, Convention.ZXZ)
    g2 = EulerAngles(0.1, 0.2, 0.3, Convention.ZYZ)
    with pytest.raises(ConventionError):
        compose(g1, g2)


def test_point_to_rotation_maps_pole_to_point():
    rng = np.random.default_rng(5)
    for _ in range(50):
        t = SpherePoint(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
        g = point_to_rotation(t, phi2=rng.uniform(0, 2 * math.pi))
        image = rotation_matrix(g) @ np.array([0.0, 0.0, 1.0])
        assert np.abs(image - t.unit_vector()).max() < 1e-12


def test_point_to_rotation_angles():
    t = SpherePoint(0.9, 0.4)
    g = point_to_rotation(t)
    assert g.convention is Convention.ZXZ
    assert g.phi1 == pytest.approx(0.4 + math.pi / 2, abs=1e-15)
    assert g.theta == pytest.approx(0.9, abs=1e-15)
    assert g.phi2 == 0.0


def test_pole_rotation_fixes_pole():
    g = point_to_rotation(SpherePoint(0.0, 0.0), phi2=0.0)
    image = rotation_matrix(g) @ np.array([0.0, 0.0, 1.0])
    assert np.abs(image - np.array([0.0, 0.0, 1.0])).max() < 1e-15


def test_angle_normalization():
    g = EulerAngles(2 * math.pi + 0.5, 1.0, -0.5)
    assert g.phi1 == pytest.approx(0.5, abs=1e-12)
    assert g.phi2 == pytest.approx(2 * math.pi - 0.5, abs=1e-12)


def test_theta_out_of_range_rejected():
    with pytest.raises(ValueError):
        EulerAngles(0.0, 3.5, 0.0)
    with pytest.raises(ValueError):
        SpherePoint(-0.2, 0.0)
