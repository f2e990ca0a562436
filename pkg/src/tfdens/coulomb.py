"""Non-interacting ("Bohr") atom: hydrogenic orbitals of ``-Delta - Z/r``.

With mass 1/2 the levels are ``-Z^2 / (4 n^2)`` and the length unit is
``2/Z`` (the usual hydrogen atom with charge ``Z/2``, energies doubled).
Closed-shell fillings only.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from . import kernels
from .errors import OrbitalRangeError
from .tf_core import RadialDensity

N_CAP = 60


def shell_count(K, q=2):
    """Electrons in K closed shells: q K (K+1) (2K+1) / 6."""
    return q * K * (K + 1) * (2 * K + 1) // 6


@dataclass(frozen=True)
class ShellFilling:
    K: int
    q: int = 2
    Z: float = None

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise ValueError(f"K must be a positive integer, got {self.K}")
        if self.K > N_CAP:
            raise OrbitalRangeError(f"K={self.K} exceeds the orbital cap n <= {N_CAP}")
        if int(self.q) != self.q or self.q < 1:
            raise ValueError(f"q must be a positive integer, got {self.q}")
        if self.Z is None:
            object.__setattr__(self, "Z", float(self.N))
        elif not self.Z > 0:
            raise ValueError(f"Z must be positive, got {self.Z}")

    @property
    def N(self):
        return shell_count(self.K, self.q)

    @classmethod
    def for_electrons(cls, N, q=2, Z=None):
        """Closed-shell filling holding exactly N electrons; partial shells are rejected."""
        K = 1
        while shell_count(K, q) < N:
            K += 1
        if shell_count(K, q) != N:
            raise ValueError(f"N={N} is not a closed-shell count for q={q}")
        return cls(K, q, Z)


def _check_nl(n, l):
    if n < 1 or not 0 <= l < n:
        raise ValueError(f"need n >= 1 and 0 <= l < n, got n={n}, l={l}")
    if n > N_CAP:
        raise OrbitalRangeError(f"n={n} exceeds the orbital cap n <= {N_CAP}")


def hydrogenic_radial(n, l, Z, r):
    """Normalized R_nl(r) for -Delta - Z/r: int R^2 r^2 dr = 1.

    R_nl = N_nl rho^l e^{-rho/2} L^{(2l+1)}_{n-l-1}(rho), rho = Z r / n, with the
    normalization kept in log form so large n does not overflow.
    """
    _check_nl(n, l)
    r = np.asarray(r, dtype=float)
    rho = Z * r / n
    alpha = 2.0 * l + 1.0
    deg = n - l - 1
    L0 = np.ones_like(rho)
    L1 = L0 if deg == 0 else 1.0 + alpha - rho
    for k in range(1, deg):
        L0, L1 = L1, ((2.0 * k + 1.0 + alpha - rho) * L1 - (k + alpha) * L0) / (k + 1.0)
    lnorm = 0.5 * (3.0 * math.log(Z / n) + gammaln(n - l) - math.log(2.0 * n) - gammaln(n + l + 1.0))
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        if l > 0:
            expo = np.where(rho > 0.0, lnorm + l * np.log(rho) - 0.5 * rho, -np.inf)
        else:
            expo = lnorm - 0.5 * rho
        out = np.where(rho <= 4000.0, np.exp(expo) * L1, 0.0)
    return out


def hydrogenic_energy(n, Z):
    return -Z * Z / (4.0 * n * n)


def bohr_density(filling):
    """rho_B(r) = (q / 4 pi) sum_{n<=K} sum_{l<n} (2l+1) R_nl(r)^2."""
    Z, K, q = float(filling.Z), int(filling.K), filling.q

    def rho(r):
        r = np.ascontiguousarray(r, dtype=float)
        flat = r.ravel()
        out = np.empty_like(flat)
        kernels.bohr_shell_sum(flat, Z, K, out)
        return (q / (4.0 * math.pi)) * out.reshape(r.shape)

    return RadialDensity(rho, math.inf, float(filling.N), (), f"bohr(K={K},q={q},Z={Z:g})")


def coulomb_chemical_potential(filling):
    """nu = -(q Z^3 / (24 N))^{2/3}, fixing int (q/6pi^2)(Z/r + nu)_+^{3/2} = N."""
    return -((filling.q * filling.Z**3 / (24.0 * filling.N)) ** (2.0 / 3.0))


def semiclassical_norm(Z, nu, q=2):
    """Closed form of int rho_sc d^3x: q Z^3 / (24 |nu|^{3/2})."""
    return q * Z**3 / (24.0 * abs(nu) ** 1.5) if nu < 0 else math.inf


def semiclassical_density(Z, nu, q=2):
    """rho_sc(r) = (q / 6 pi^2) (Z/r + nu)_+^{3/2}, supported on r <= Z/|nu|."""
    if nu > 0:
        raise ValueError(f"nu must be <= 0, got {nu}")
    R = Z / -nu if nu < 0 else math.inf
    c = q / (6.0 * math.pi**2)

    def rho(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            w = np.maximum(Z / r + nu, 0.0)
        return c * w * np.sqrt(w)

    return RadialDensity(rho, R, semiclassical_norm(Z, nu, q), (), f"sc(Z={Z:g},nu={nu:.6g},q={q})")


def write_density_csv(path, r, **columns):
    """CSV with an ``r`` column followed by one column per keyword density."""
    r = np.asarray(r, dtype=float)
    vals = [np.asarray(d(r) if callable(d) else d, dtype=float) for d in columns.values()]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["r", *columns])
        for i, ri in enumerate(r):
            w.writerow([repr(float(ri)), *(repr(float(v[i])) for v in vals)])
