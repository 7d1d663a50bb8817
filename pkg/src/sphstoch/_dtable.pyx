# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel for Wigner d-function tables (same algorithm as the
pure-numpy twin in ``_dtable_py``: closed-form seeds at the lowest valid
degree, then a three-term recursion in l)."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, exp, lgamma, log, sin, sqrt

cnp.import_array()


cdef double _seed_val(int l0, int m, int n, double c2, double s2) noexcept:
    cdef double sign
    cdef int k, a, b
    if (n if n >= 0 else -n) >= (m if m >= 0 else -m):
        if n == l0:
            sign = 1.0; k = l0 - m; a = l0 + m; b = l0 - m
        else:
            sign = -1.0 if (l0 + m) % 2 else 1.0
            k = l0 + m; a = l0 - m; b = l0 + m
    else:
        if m == l0:
            sign = -1.0 if (l0 - n) % 2 else 1.0
            k = l0 - n; a = l0 + n; b = l0 - n
        else:
            sign = 1.0; k = l0 + n; a = l0 - n; b = l0 + n

    if c2 > 0.0 and s2 > 0.0:
        return sign * exp(
            0.5 * (lgamma(2 * l0 + 1.0) - lgamma(k + 1.0) - lgamma(2 * l0 - k + 1.0))
            + a * log(c2) + b * log(s2)
        )
    if s2 == 0.0:
        return sign if b == 0 else 0.0
    return sign if a == 0 else 0.0  # c2 == 0


def d_table(int l_max, int n, cnp.ndarray[cnp.float64_t, ndim=1] theta):
    """Table of d^l_{m,n}(theta_j), shape (l_max+1, 2*l_max+1, len(theta))."""
    cdef Py_ssize_t nj = theta.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=3] tab = np.zeros(
        (l_max + 1, 2 * l_max + 1, nj)
    )
    cdef int an = n if n >= 0 else -n
    if an > l_max:
        return tab

    cdef cnp.ndarray[cnp.float64_t, ndim=1] z = np.cos(theta)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] c2 = np.cos(theta / 2.0)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] s2 = np.sin(theta / 2.0)

    cdef int m, am, l0, l, lp, row
    cdef Py_ssize_t j
    cdef double coeff_z, coeff_c, prev_c, den, dl, dp, dn

    for m in range(-l_max, l_max + 1):
        am = m if m >= 0 else -m
        l0 = am if am > an else an
        row = m + l_max
        for j in range(nj):
            tab[l0, row, j] = _seed_val(l0, m, n, c2[j], s2[j])
        # ascend the degree; the d^{l-1} coefficient vanishes at l = l0
        for l in range(l0, l_max):
            lp = l + 1
            if l == 0:
                for j in range(nj):
                    tab[1, row, j] = z[j] * tab[0, row, j]
                continue
            den = l * sqrt(
                (<double>(lp * lp - m * m)) * (<double>(lp * lp - n * n))
            )
            coeff_z = (2 * l + 1) * (<double>l) * lp
            coeff_c = (2 * l + 1) * (<double>(m * n))
            prev_c = lp * sqrt(
                (<double>(l * l - m * m)) * (<double>(l * l - n * n))
            )
            for j in range(nj):
                dl = tab[l, row, j]
                dp = tab[l - 1, row, j]
                dn = ((coeff_z * z[j] - coeff_c) * dl - prev_c * dp) / den
                tab[lp, row, j] = dn
    return tab
