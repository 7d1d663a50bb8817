import math

import numpy as np
import pytest

from sphstoch import (
    Convention,
    ConventionError,
    EulerAngles,
    WignerIndex,
    compose,
    eval_D,
    eval_T,
    identity,
    rodrigues_P,
    so3_orthogonality,
    sph_harm,
    SpherePoint,
    wigner_d,
    wigner_d_block,
    wigner_matrix,
    wigner_matrix_stack,
)
from sphstoch.wigner import phase_i


def stripped_oracle(l, m, n, theta):
    """Real d-value from the exact oracle (the i^(m-n) phase removed)."""
    val = phase_i(m - n) * rodrigues_P(l, m, n, math.cos(theta))
    assert abs(val.imag) < 1e-13
    return val.real


def random_angles(rng, convention=Convention.ZXZ):
    return EulerAngles(
        rng.uniform(0, 2 * math.pi),
        rng.uniform(0.01, math.pi - 0.01),
        rng.uniform(0, 2 * math.pi),
        convention,
    )


def test_index_validation():
    with pytest.raises(ValueError):
        WignerIndex(2, 3, 0)
    with pytest.raises(ValueError):
        rodrigues_P(1, 0, 2, 0.5)
    with pytest.raises(ValueError):
        wigner_d(-1, 0, 0, 0.5)


def test_trivial_representation():
    for z in (-1.0, -0.3, 0.0, 0.9, 1.0):
        assert rodrigues_P(0, 0, 0, z) == 1.0


def test_rodrigues_known_values():
    assert rodrigues_P(1, 0, 0, 0.5) == pytest.approx(0.5, abs=1e-15)
    assert rodrigues_P(1, 1, 1, 0.0) == pytest.approx(0.5, abs=1e-15)
    for z in (-0.7, 0.0, 0.4):
        assert rodrigues_P(1, 1, 1, z) == pytest.approx((1 + z) / 2, abs=1e-15)
    # frozen oracle values
    assert rodrigues_P(2, 1, -1, 0.3) == pytest.approx(-0.56, abs=1e-14)
    assert rodrigues_P(4, 3, -2, -0.35) == pytest.approx(
        0.2395446000132498j, abs=1e-14
    )


def test_rodrigues_endpoints_are_finite():
    # the pre-cancelled form reaches z = +-1 without singular division
    for l in range(5):
        for m in range(-l, l + 1):
            for n in range(-l, l + 1):
                hi = rodrigues_P(l, m, n, 1.0)
                assert hi == pytest.approx(1.0 if m == n else 0.0, abs=1e-14)
                lo = rodrigues_P(l, m, n, -1.0)
                assert np.isfinite(lo.real) and np.isfinite(lo.imag)


def test_wigner_d_identity_angle():
    rng = np.random.default_rng(0)
    for _ in range(30):
        l = int(rng.integers(0, 12))
        m = int(rng.integers(-l, l + 1))
        n = int(rng.integers(-l, l + 1))
        assert wigner_d(l, m, n, 0.0) == pytest.approx(float(m == n), abs=1e-15)


def test_wigner_d_known_values():
    assert wigner_d(1, 0, 0, math.pi / 3) == pytest.approx(0.5, abs=1e-15)
    assert wigner_d(1, 1, 1, math.pi) == pytest.approx(0.0, abs=1e-15)
    # frozen against the exact oracle
    assert wigner_d(3, 2, 1, 0.8) == pytest.approx(-0.5244763855031547, abs=1e-13)
    assert wigner_d(5, 3, 2, 1.7) == pytest.approx(-0.32204506241230624, abs=1e-13)
    assert wigner_d(2, 0, -2, math.pi / 2) == pytest.approx(math.sqrt(6) / 4, abs=1e-14)


def test_recursion_matches_oracle():
    thetas = np.linspace(0.0, math.pi, 13)
    for l in range(7):
        for m in range(-l, l + 1):
            for n in range(-l, l + 1):
                for theta in thetas:
                    assert wigner_d(l, m, n, theta) == pytest.approx(
                        stripped_oracle(l, m, n, theta), abs=1e-12
                    )


def test_transpose_symmetry():
    rng = np.random.default_rng(1)
    for _ in range(100):
        l = int(rng.integers(0, 9))
        m = int(rng.integers(-l, l + 1))
        n = int(rng.integers(-l, l + 1))
        theta = rng.uniform(0, math.pi)
        lhs = wigner_d(l, m, n, theta)
        rhs = (-1.0) ** ((m - n) % 2) * wigner_d(l, n, m, theta)
        assert lhs == pytest.approx(rhs, abs=1e-10)


def test_block_identity_and_symmetry():
    blk = wigner_d_block(3, 0.0)
    assert np.abs(blk.values - np.eye(7)).max() < 1e-14
    blk = wigner_d_block(4, 1.3)
    ms = np.arange(-4, 5)
    signs = (-1.0) ** (np.abs(np.subtract.outer(ms, ms)) % 2)
    assert np.abs(blk.values - signs * blk.values.T).max() < 1e-10


@pytest.mark.parametrize("convention", [Convention.ZXZ, Convention.ZYZ])
def test_matrix_unitarity(convention):
    rng = np.random.default_rng(2)
    for _ in range(5):
        g = random_angles(rng, convention)
        for l in (0, 1, 3, 8):
            w = wigner_matrix(l, g)
            assert np.abs(w @ w.conj().T - np.eye(2 * l + 1)).max() < 1e-10


def test_matrix_identity_and_weight_zero():
    assert np.abs(wigner_matrix(3, identity()) - np.eye(7)).max() < 1e-14
    g = EulerAngles(1.0, 2.0, 3.0)
    assert wigner_matrix(0, g).shape == (1, 1)
    assert wigner_matrix(0, g)[0, 0] == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("convention", [Convention.ZXZ, Convention.ZYZ])
def test_matrix_multiplicativity(convention):
    rng = np.random.default_rng(3)
    for _ in range(10):
        g1 = random_angles(rng, convention)
        g2 = random_angles(rng, convention)
        g12 = compose(g1, g2)
        for l in (1, 2, 5):
            resid = np.abs(
                wigner_matrix(l, g1) @ wigner_matrix(l, g2) - wigner_matrix(l, g12)
            ).max()
            assert resid < 1e-10


def test_matrix_stack_matches_single():
    rng = np.random.default_rng(4)
    g = random_angles(rng)
    stack = wigner_matrix_stack(6, g)
    for l in range(7):
        assert np.abs(stack[l] - wigner_matrix(l, g)).max() < 1e-14


def test_eval_T_identity_and_axis_value():
    e = identity()
    for l, m, n in [(0, 0, 0), (2, 1, -1), (3, 3, 3)]:
        assert eval_T(l, m, n, e) == pytest.approx(float(m == n), abs=1e-15)
    rng = np.random.default_rng(5)
    for _ in range(10):
        g = random_angles(rng)
        assert eval_T(1, 0, 0, g) == pytest.approx(math.cos(g.theta), abs=1e-14)
        # modulus equals the real d-function's
        assert abs(eval_T(2, 1, -1, g)) == pytest.approx(
            abs(wigner_d(2, 1, -1, g.theta)), abs=1e-14
        )


def test_addition_formula():
    rng = np.random.default_rng(6)
    for _ in range(10):
        g1 = random_angles(rng)
        g2 = random_angles(rng)
        g12 = compose(g1, g2)
        for l in (1, 2, 4):
            for m in range(-l, l + 1):
                for n in range(-l, l + 1):
                    total = sum(
                        eval_T(l, m, s, g1) * eval_T(l, s, n, g2)
                        for s in range(-l, l + 1)
                    )
                    assert total == pytest.approx(eval_T(l, m, n, g12), abs=1e-11)


def test_row_orthonormality():
    rng = np.random.default_rng(7)
    g = random_angles(rng)
    l = 4
    for m in range(-l, l + 1):
        for n in range(-l, l + 1):
            total = sum(
                eval_T(l, m, s, g) * np.conj(eval_T(l, n, s, g))
                for s in range(-l, l + 1)
            )
            assert total == pytest.approx(float(m == n), abs=1e-11)


def test_phase_relation_equal_angles():
    rng = np.random.default_rng(8)
    for _ in range(10):
        g_zyz = random_angles(rng, Convention.ZYZ)
        g_zxz = EulerAngles(g_zyz.phi1, g_zyz.theta, g_zyz.phi2, Convention.ZXZ)
        for l in (1, 2, 4):
            for m in range(-l, l + 1):
                for n in range(-l, l + 1):
                    lhs = eval_D(l, m, n, g_zyz)
                    rhs = phase_i(-(n - m)) * eval_T(l, m, n, g_zxz)
                    # (-i)^(n-m) = i^(m-n)
                    assert lhs == pytest.approx(rhs, abs=1e-13)


def test_eval_D_reduces_to_spherical_harmonics():
    # D^l_m0(phi, theta, psi) = sqrt(4 pi/(2l+1)) conj(Y_l^m(theta, phi));
    # the trailing angle drops out at n = 0
    rng = np.random.default_rng(9)
    for _ in range(10):
        theta = rng.uniform(0.01, math.pi - 0.01)
        phi = rng.uniform(0, 2 * math.pi)
        psi = rng.uniform(0, 2 * math.pi)
        g = EulerAngles(phi, theta, psi, Convention.ZYZ)
        for l in (0, 1, 3):
            for m in range(-l, l + 1):
                lhs = eval_D(l, m, 0, g)
                rhs = math.sqrt(4 * math.pi / (2 * l + 1)) * np.conj(
                    sph_harm(l, m, SpherePoint(theta, phi))
                )
                assert lhs == pytest.approx(rhs, abs=1e-13)


def test_eval_convention_guards():
    g_zxz = EulerAngles(0.1, 0.2, 0.3, Convention.ZXZ)
    g_zyz = EulerAngles(0.1, 0.2, 0.3, Convention.ZYZ)
    with pytest.raises(ConventionError):
        eval_T(1, 0, 0, g_zyz)
    with pytest.raises(ConventionError):
        eval_D(1, 0, 0, g_zxz)


def test_so3_orthogonality_small():
    gram, expected = so3_orthogonality(4)
    assert np.abs(gram - expected).max() < 1e-10
