"""Pure-numpy kernel for Wigner d-function tables.

Fills d^l_{m,n}(theta) for all degrees l <= l_max and all rows m at a fixed
column n, by a three-term recursion in the degree. Seeds at the lowest valid
degree l0 = max(|m|, |n|) come from the closed product form; the recursion
then ascends in l. Entries with l < max(|m|, |n|) are exactly zero.

The compiled twin in ``_dtable.pyx`` implements the same algorithm; the
active backend is chosen in ``kernels``.
"""

import math

import numpy as np


def _seed_row(l0, m, n, c2, s2):
    """d^{l0}_{m,n} at the lowest valid degree, vectorized over the nodes.

    c2 = cos(theta/2), s2 = sin(theta/2). Log-space evaluation keeps large
    binomials finite; pole nodes (c2 or s2 exactly zero) are handled directly.
    """
    if abs(n) >= abs(m):
        if n == l0:
            sign, k, a, b = 1.0, l0 - m, l0 + m, l0 - m
        else:  # n == -l0
            sign, k, a, b = (-1.0) ** ((l0 + m) % 2), l0 + m, l0 - m, l0 + m
    else:
        if m == l0:
            sign, k, a, b = (-1.0) ** ((l0 - n) % 2), l0 - n, l0 + n, l0 - n
        else:  # m == -l0
            sign, k, a, b = 1.0, l0 + n, l0 - n, l0 + n

    out = np.zeros_like(c2)
    interior = (c2 > 0.0) & (s2 > 0.0)
    if interior.any():
        if l0 <= 500:
            root = math.sqrt(math.comb(2 * l0, k))
            out[interior] = sign * root * c2[interior] ** a * s2[interior] ** b
        else:
            logc = 0.5 * (
                math.lgamma(2 * l0 + 1) - math.lgamma(k + 1) - math.lgamma(2 * l0 - k + 1)
            )
            out[interior] = sign * np.exp(
                logc + a * np.log(c2[interior]) + b * np.log(s2[interior])
            )
    if b == 0:
        pole = s2 == 0.0
        out[pole] = sign * c2[pole] ** a  # c2 = 1 there, binomial is 1
    if a == 0:
        pole = c2 == 0.0
        out[pole] = sign * s2[pole] ** b
    return out


def d_table(l_max, n, theta):
    """Table of d^l_{m,n}(theta_j), shape (l_max+1, 2*l_max+1, len(theta)).

    Index [l, m + l_max, j]; rows outside |m| <= l (or degrees below
    max(|m|, |n|)) hold exact zeros.
    """
    theta = np.ascontiguousarray(theta, dtype=np.float64)
    big_l = int(l_max)
    j = theta.shape[0]
    tab = np.zeros((big_l + 1, 2 * big_l + 1, j))
    if abs(n) > big_l:
        return tab

    z = np.cos(theta)
    c2 = np.cos(theta / 2.0)
    s2 = np.sin(theta / 2.0)
    ms = np.arange(-big_l, big_l + 1)
    l0s = np.maximum(np.abs(ms), abs(n))

    for m in range(-big_l, big_l + 1):
        l0 = max(abs(m), abs(n))
        if l0 <= big_l:
            tab[l0, m + big_l] = _seed_row(l0, m, n, c2, s2)

    n2 = n * n
    for l in range(big_l):
        if l == 0:
            nxt = z[None, :] * tab[0]
        else:
            lp = l + 1
            coeff = (2 * l + 1) * (l * lp * z[None, :] - (ms * n)[:, None])
            prev = (lp * np.sqrt(
                np.clip((l * l - ms * ms) * (l * l - n2), 0.0, None)
            ))[:, None]
            den = (l * np.sqrt(
                np.clip((lp * lp - ms * ms) * (lp * lp - n2), 0.0, None)
            ))[:, None]
            num = coeff * tab[l] - prev * tab[l - 1]
            with np.errstate(invalid="ignore", divide="ignore"):
                nxt = np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), 0.0)
        seeded = l0s == l + 1
        if seeded.any():
            nxt[seeded] = tab[l + 1][seeded]
        tab[l + 1] = nxt
    return tab
