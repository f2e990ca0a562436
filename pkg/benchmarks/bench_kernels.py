"""Time the compiled kernels against their pure-Python twins.

    python benchmarks/bench_kernels.py [--repeat N]

Reports the median wall time per call for each backend and the speedup. The
compiled module must have been built (``pip install -e . --no-build-isolation``);
if it is missing only the Python timings are shown.
"""

import argparse
import importlib
import math
import statistics
import time

import numpy as np

from tfdens import _kernels_py

try:
    _kernels_c = importlib.import_module("tfdens._kernels")
except ImportError:
    _kernels_c = None


def _median_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def _cases():
    n = 4000
    t0, t1 = math.log(1e-6), math.log(1e5)
    dt = (t1 - t0) / (n - 1)
    x0 = 1e-6
    s = -1.588071022611375
    phi0 = 1.0 + s * x0 + 4.0 / 3.0 * x0**1.5
    p0 = s + 2.0 * math.sqrt(x0)

    def rk4(mod):
        phi, dphi = np.empty(n), np.empty(n)
        return lambda: mod.tf_rk4_log(t0, dt, 0, phi0, p0, phi, dphi)

    r = np.geomspace(1e-4, 200.0, 2000)

    def shells(mod, K):
        out = np.empty_like(r)
        Z = float(K * (K + 1) * (2 * K + 1) // 3)
        return lambda: mod.bohr_shell_sum(r, Z, K, out)

    yield "tf_rk4_log (4000 nodes)", rk4
    yield "bohr_shell_sum K=4, 2000 radii", lambda mod: shells(mod, 4)
    yield "bohr_shell_sum K=12, 2000 radii", lambda mod: shells(mod, 12)


def _check_parity():
    if _kernels_c is None:
        return
    r = np.geomspace(1e-4, 50.0, 300)
    a, b = np.empty_like(r), np.empty_like(r)
    _kernels_py.bohr_shell_sum(r, 28.0, 3, a)
    _kernels_c.bohr_shell_sum(r, 28.0, 3, b)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=0)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    _check_parity()
    print(f"{'kernel':36s} {'python [s]':>12s} {'cython [s]':>12s} {'speedup':>9s}")
    for name, make in _cases():
        t_py = _median_time(make(_kernels_py), args.repeat)
        if _kernels_c is None:
            print(f"{name:36s} {t_py:12.5f} {'n/a':>12s} {'n/a':>9s}")
            continue
        t_c = _median_time(make(_kernels_c), args.repeat)
        print(f"{name:36s} {t_py:12.5f} {t_c:12.5f} {t_py / t_c:8.1f}x")


if __name__ == "__main__":
    main()
