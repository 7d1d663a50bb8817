"""Benchmark the compiled Wigner-d table kernel against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [L ...]
"""

import sys
import time

import numpy as np

from sphstoch.kernels import d_table_compiled, d_table_python


def clock(fn, l_max, n, theta, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(l_max, n, theta)
        best = min(best, time.perf_counter() - start)
    return best


def main(argv):
    sizes = [int(a) for a in argv] or [32, 64, 128, 256]
    print(f"{'L':>5s} {'nodes':>6s} {'python':>10s} {'compiled':>10s} {'speedup':>8s}")
    for l_max in sizes:
        theta = np.linspace(0.0, np.pi, l_max + 1)
        n = min(2, l_max)
        t_py = clock(d_table_python, l_max, n, theta)
        if d_table_compiled is None:
            print(f"{l_max:5d} {len(theta):6d} {t_py*1e3:9.2f}ms {'(not built)':>10s}")
            continue
        t_c = clock(d_table_compiled, l_max, n, theta)
        a = d_table_python(l_max, n, theta)
        b = d_table_compiled(l_max, n, theta)
        assert np.abs(a - b).max() < 1e-12, "backends disagree"
        print(
            f"{l_max:5d} {len(theta):6d} {t_py*1e3:9.2f}ms {t_c*1e3:9.2f}ms "
            f"{t_py/t_c:7.1f}x"
        )


if __name__ == "__main__":
    main(sys.argv[1:])
