"""Pure-Python fallback for the compiled kernels in ``_kernels.pyx``.

Signatures and results match the Cython module; only speed differs.
"""

import math

import numpy as np
from scipy.special import gammaln


def _rhs_p(x, phi):
    if phi <= 0.0:
        return 0.0
    return math.sqrt(x) * phi * math.sqrt(phi)


def tf_rk4_log(t0, dt, i0, phi0, p0, phi, dphi):
    """Classical RK4 for Phi'' = Phi^{3/2}/sqrt(x) in t = ln x, starting at node i0.

    Writes Phi and Phi' into ``phi``/``dphi`` and returns ``(status, last)``:
    status -1 when Phi crosses zero, +1 when Phi' turns positive, 0 when the
    grid end is reached. ``last`` is the index of the last valid node.
    """
    n = phi.shape[0]
    exp = math.exp
    y, p = phi0, p0
    phi[i0] = y
    dphi[i0] = p
    for i in range(i0, n - 1):
        t = t0 + i * dt
        x = exp(t)
        xh = exp(t + 0.5 * dt)
        x1 = exp(t + dt)
        k1y = x * p
        k1p = _rhs_p(x, y)
        k2y = xh * (p + 0.5 * dt * k1p)
        k2p = _rhs_p(xh, y + 0.5 * dt * k1y)
        k3y = xh * (p + 0.5 * dt * k2p)
        k3p = _rhs_p(xh, y + 0.5 * dt * k2y)
        k4y = x1 * (p + dt * k3p)
        k4p = _rhs_p(x1, y + dt * k3y)
        y = y + dt * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0
        p = p + dt * (k1p + 2.0 * k2p + 2.0 * k3p + k4p) / 6.0
        if y <= 0.0:
            return -1, i
        phi[i + 1] = y
        dphi[i + 1] = p
        if p > 0.0:
            return 1, i + 1
    return 0, n - 1


def bohr_shell_sum(r, Z, K, out):
    """out[j] = sum_{n<=K} sum_{l<n} (2l+1) R_nl(r_j)^2, vectorized over r."""
    r = np.asarray(r, dtype=float)
    acc = np.zeros_like(r)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        _accumulate(r, Z, K, acc)
    out[:] = acc


def _accumulate(r, Z, K, acc):
    for n in range(1, K + 1):
        rho = Z * r / n
        live = rho <= 4000.0
        logrho = np.log(rho)
        for l in range(n):
            deg = n - l - 1
            alpha = 2.0 * l + 1.0
            L0 = np.ones_like(rho)
            if deg == 0:
                L1 = L0
            else:
                L1 = 1.0 + alpha - rho
                for k in range(1, deg):
                    L0, L1 = L1, ((2.0 * k + 1.0 + alpha - rho) * L1 - (k + alpha) * L0) / (k + 1.0)
            lnorm = 0.5 * (3.0 * math.log(Z / n) + gammaln(n - l) - math.log(2.0 * n) - gammaln(n + l + 1.0))
            if l > 0:
                expo = np.where(rho > 0.0, lnorm + l * logrho - 0.5 * rho, -np.inf)
            else:
                expo = lnorm - 0.5 * rho
            val = np.where(live, np.exp(expo) * L1, 0.0)
            acc += (2.0 * l + 1.0) * val * val
