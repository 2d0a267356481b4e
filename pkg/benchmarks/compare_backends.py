"""Timing comparison of the compiled and pure-Python stepping kernels.

Runs the same workloads through both implementations and reports wall
time and result agreement.  Usage:

    python benchmarks/compare_backends.py [--repeats N]
"""

import argparse
import time

import numpy as np

from shootbvp import _dopri5_py

try:
    from shootbvp import _dopri5
except ImportError:
    _dopri5 = None


def similarity_rhs(t, x, k=0.71):
    return np.array([x[1], x[2], x[1] ** 2 - x[0] * x[2], x[4], -k * x[4] * x[0]])


def tan_rhs(t, x):
    return np.array([x[1], 2.0 * x[0] * x[1]])


def augmented_tan_rhs(t, z):
    # state + one sensitivity column of y'' = 2 y y'
    x, s = z[:2], z[2:]
    jac = np.array([[0.0, 1.0], [2.0 * x[1], 2.0 * x[0]]])
    return np.concatenate([tan_rhs(t, x), jac @ s])


WORKLOADS = [
    ("similarity system, n=5, [0,5]", similarity_rhs, 0.0, 5.0, [0.0, 1.0, -1.0, 1.0, -0.5]),
    ("tan problem, n=2, [0,1]", tan_rhs, 0.0, 1.0, [0.0, 1.1596576]),
    ("tan + sensitivity column, n=4", augmented_tan_rhs, 0.0, 1.0, [0.0, 1.1596576, 0.0, 1.0]),
]


def run(kernel, rhs, t0, t1, x0, repeats):
    best = np.inf
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = kernel.integrate_raw(
            rhs, t0, t1, np.array(x0, dtype=float), 1e-10, 1e-12, 0.01 * abs(t1 - t0), 1e-14, 10**6
        )
        best = min(best, time.perf_counter() - start)
    assert result[3] == 0, "integration failed"
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=7, help="take the best of N runs")
    args = parser.parse_args()

    if _dopri5 is None:
        print("compiled kernel not built; showing pure-Python timings only\n")

    header = f"{'workload':<36s} {'python':>10s}"
    if _dopri5 is not None:
        header += f" {'cython':>10s} {'speedup':>8s} {'max |diff|':>11s}"
    print(header)
    for label, rhs, t0, t1, x0 in WORKLOADS:
        t_py, res_py = run(_dopri5_py, rhs, t0, t1, x0, args.repeats)
        line = f"{label:<36s} {t_py * 1e3:>8.2f}ms"
        if _dopri5 is not None:
            t_cy, res_cy = run(_dopri5, rhs, t0, t1, x0, args.repeats)
            diff = float(np.max(np.abs(res_py[1][-1] - res_cy[1][-1])))
            line += f" {t_cy * 1e3:>8.2f}ms {t_py / t_cy:>7.1f}x {diff:>11.2e}"
        print(line + f"   ({len(res_py[0])} nodes)")


if __name__ == "__main__":
    main()
