# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: the Thomas-Fermi shooting integrator and the closed-shell
hydrogenic density sum. Mirrors ``_kernels_py`` call for call."""

from cython.view cimport array as cvarray
from libc.math cimport exp, log, sqrt, lgamma

cdef inline double _rhs_p(double x, double phi) nogil:
    # dp/dt with t = ln x: sqrt(x) * phi_+^{3/2}
    if phi <= 0.0:
        return 0.0
    return sqrt(x) * phi * sqrt(phi)


def tf_rk4_log(double t0, double dt, Py_ssize_t i0, double phi0, double p0,
               double[::1] phi, double[::1] dphi):
    cdef Py_ssize_t n = phi.shape[0]
    cdef Py_ssize_t i
    cdef double t, x, xh, x1, y, p, k1y, k1p, k2y, k2p, k3y, k3p, k4y, k4p
    cdef int status = 0
    y = phi0
    p = p0
    phi[i0] = y
    dphi[i0] = p
    with nogil:
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
                status = -1
                break
            phi[i + 1] = y
            dphi[i + 1] = p
            if p > 0.0:
                status = 1
                break
    if status == 0:
        return 0, n - 1
    if status == -1:
        return -1, i
    return 1, i + 1


def bohr_shell_sum(double[::1] r, double Z, int K, double[::1] out):
    cdef Py_ssize_t m = r.shape[0]
    cdef Py_ssize_t j
    cdef int n, l, k, deg
    cdef double rho, logrho, alpha, L0, L1, L2, val, acc
    # log normalization of R_nl, indexed [n-1, l]; independent of r
    cdef double[:, ::1] lnorm = cvarray(shape=(max(K, 1), max(K, 1)), itemsize=sizeof(double), format="d")
    for n in range(1, K + 1):
        for l in range(n):
            lnorm[n - 1, l] = 0.5 * (3.0 * log(Z / n) + lgamma(n - l) - log(2.0 * n) - lgamma(n + l + 1.0))
    with nogil:
        for j in range(m):
            acc = 0.0
            for n in range(1, K + 1):
                rho = Z * r[j] / n
                if rho > 4000.0:
                    continue
                logrho = log(rho) if rho > 0.0 else 0.0
                for l in range(n):
                    if rho == 0.0 and l > 0:
                        continue
                    deg = n - l - 1
                    alpha = 2.0 * l + 1.0
                    L0 = 1.0
                    L1 = 1.0 + alpha - rho
                    if deg == 0:
                        L1 = L0
                    else:
                        for k in range(1, deg):
                            L2 = ((2.0 * k + 1.0 + alpha - rho) * L1 - (k + alpha) * L0) / (k + 1.0)
                            L0 = L1
                            L1 = L2
                    val = exp(lnorm[n - 1, l] + l * logrho - 0.5 * rho) * L1
                    acc += (2.0 * l + 1.0) * val * val
            out[j] = acc
