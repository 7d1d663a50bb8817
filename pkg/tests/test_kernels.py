import math

import numpy as np
import pytest

from sphstoch import kernels, wigner_d
from sphstoch.kernels import d_table_compiled, d_table_python


def test_active_backend_is_reported():
    assert kernels.BACKEND in ("compiled", "python")
    if kernels.BACKEND == "compiled":
        assert d_table_compiled is not None


def test_python_table_matches_scalar_recursion():
    theta = np.array([0.0, 0.3, 1.1, 2.4, math.pi])
    for n in (-3, 0, 2):
        tab = d_table_python(6, n, theta)
        for l in range(7):
            for m in range(-l, l + 1):
                if abs(n) > l:
                    assert np.all(tab[l, m + 6] == 0)
                    continue
                for j, th in enumerate(theta):
                    assert tab[l, m + 6, j] == pytest.approx(
                        wigner_d(l, m, n, th), abs=1e-13
                    )


@pytest.mark.skipif(d_table_compiled is None, reason="extension not built")
def test_backends_agree():
    rng = np.random.default_rng(0)
    theta = np.sort(rng.uniform(0, math.pi, 9))
    theta[0], theta[-1] = 0.0, math.pi  # include the poles
    for n in (-5, -1, 0, 2, 5):
        a = d_table_python(12, n, theta)
        b = d_table_compiled(12, n, theta)
        assert np.abs(a - b).max() < 1e-13


def test_zero_structure_below_lowest_degree():
    theta = np.array([0.7])
    tab = d_table_python(5, 3, theta)
    for l in range(3):
        assert np.all(tab[l] == 0)
    for l in range(5 + 1):
        for m in range(-5, 6):
            if abs(m) > l:
                assert tab[l, m + 5, 0] == 0


def test_pole_values_are_exact_deltas():
    tab = d_table_python(8, 2, np.array([0.0]))
    for l in range(2, 9):
        for m in range(-l, l + 1):
            assert tab[l, m + 8, 0] == (1.0 if m == 2 else 0.0)
