import math
import os
import subprocess
import sys

import numpy as np
import pytest

from tfdens import _kernels_py, kernels

compiled = pytest.importorskip("tfdens._kernels")


def _shoot(mod, s, n=3000):
    t = np.linspace(math.log(1e-6), math.log(50.0), n)
    phi, dphi = np.empty(n), np.empty(n)
    x0 = 1e-6
    st = mod.tf_rk4_log(t[0], t[1] - t[0], 0, 1 + s * x0 + 4 / 3 * x0**1.5, s + 2 * math.sqrt(x0), phi, dphi)
    return st, phi[: st[1] + 1], dphi[: st[1] + 1]


@pytest.mark.parametrize("s", [-1.7, -1.5880710, -1.5880711, -1.5])
def test_rk4_backends_agree(s):
    st_c, phi_c, dphi_c = _shoot(compiled, s)
    st_p, phi_p, dphi_p = _shoot(_kernels_py, s)
    assert st_c == st_p
    np.testing.assert_allclose(phi_c, phi_p, rtol=1e-13, atol=0)
    np.testing.assert_allclose(dphi_c, dphi_p, rtol=1e-13, atol=1e-300)


def test_rk4_status_codes():
    assert _shoot(_kernels_py, -1.7)[0][0] == -1
    assert _shoot(_kernels_py, -1.5)[0][0] == 1


@pytest.mark.parametrize("K,Z", [(1, 1.0), (5, 3.0), (16, 2992.0), (60, 60.0)])
def test_shell_sum_backends_agree(K, Z):
    r = np.concatenate([[0.0], np.geomspace(1e-6, 1e5, 500)])
    out_c, out_p = np.empty_like(r), np.empty_like(r)
    compiled.bohr_shell_sum(r, Z, K, out_c)
    _kernels_py.bohr_shell_sum(r, Z, K, out_p)
    assert np.all(np.isfinite(out_c))
    np.testing.assert_allclose(out_c, out_p, rtol=1e-11, atol=1e-300)


@pytest.mark.skipif(os.environ.get("TFDENS_PURE_PYTHON", "") not in ("", "0"), reason="fallback forced")
def test_backend_is_compiled_when_built():
    assert kernels.BACKEND == "cython"


def test_pure_python_backend_selectable():
    env = dict(os.environ, TFDENS_PURE_PYTHON="1")
    code = "from tfdens import kernels, tf_core; print(kernels.BACKEND, tf_core.solve_tf_universal().slope0)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    backend, slope = out.stdout.split()
    assert backend == "python"
    assert abs(float(slope) + 1.588071) < 1e-4
