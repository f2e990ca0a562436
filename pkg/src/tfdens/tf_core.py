"""Universal Thomas-Fermi function and the neutral-atom potential and density.

Units follow ``H = -Delta - V`` (mass 1/2, hbar = 1). The neutral-atom
Thomas-Fermi potential is ``W(r) = (Z/r) Phi(r/b)`` with

    b = (3 pi / (2 q))**(2/3) * Z**(-1/3),

where ``Phi`` solves ``Phi'' = Phi**1.5 / sqrt(x)``, ``Phi(0) = 1``,
``Phi(inf) = 0``. The density is ``rho = (q / 6 pi^2) W**1.5``.

Derivation of ``b``: Poisson's equation for ``W = V - |x|^{-1} * rho`` reads
``Delta W = 4 pi rho = (2q / 3 pi) W**1.5`` away from the nucleus. With
``W = (Z/r) Phi(r/b)`` one gets ``Delta W = Z Phi''/(b^2 r)`` and
``W**1.5 = Z**1.5 r**-1.5 Phi**1.5``; matching against ``Phi'' = Phi**1.5/sqrt(x)``
forces ``b**1.5 = (3 pi / 2q) Z**-0.5``.
"""

import csv
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline

from . import kernels
from .errors import ShootingError, UnsupportedConfiguration

log = logging.getLogger(__name__)

SOMMERFELD = 144.0
# exponent of the leading correction to 144/x^3 at large x
SOMMERFELD_LAMBDA = (math.sqrt(73.0) - 7.0) / 2.0

_SLOPE_BRACKET = (-1.70, -1.50)
# relative gap at which the two bracketing trajectories are considered split
_SPLIT_RTOL = 1e-10
_OVERSHOOT = 1e3


@dataclass(frozen=True)
class AtomSpec:
    Z: float
    N: float = None
    q: int = 2

    def __post_init__(self):
        if self.N is None:
            object.__setattr__(self, "N", float(self.Z))
        if not self.Z > 0 or not self.N > 0:
            raise ValueError(f"charges must be positive, got Z={self.Z}, N={self.N}")
        if int(self.q) != self.q or self.q < 1:
            raise ValueError(f"q must be a positive integer, got {self.q}")

    @property
    def neutral(self):
        return self.N == self.Z


@dataclass(frozen=True)
class RadialDensity:
    """Spherically symmetric density ``r -> rho(r)`` in particles per unit volume.

    ``edges`` lists radii where the density is not smooth (support edges);
    quadrature splits there.
    """

    eval: object
    support_radius: float = math.inf
    norm_hint: float = None
    edges: tuple = ()
    label: str = ""

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.asarray(self.eval(r), dtype=float)
        if math.isfinite(self.support_radius):
            out = np.where(r > self.support_radius, 0.0, out)
        return out

    def scaled(self, c):
        return RadialDensity(
            lambda r: c * self.eval(r),
            self.support_radius,
            None if self.norm_hint is None else c * self.norm_hint,
            self.edges,
            f"{c}*{self.label}",
        )


@dataclass(frozen=True)
class TFUniversal:
    """Tabulated universal Thomas-Fermi function on a logarithmic grid."""

    grid: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    slope0: float
    xmax: float
    tail_mode: str = "matched"
    restarts: tuple = ()
    tail_coeff: float = field(init=False)
    _spline: object = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.tail_mode not in ("matched", "sommerfeld"):
            raise ValueError(f"unknown tail_mode {self.tail_mode!r}")
        for a in (self.grid, self.phi, self.dphi):
            a.setflags(write=False)
        t = np.log(self.grid)
        object.__setattr__(self, "_spline", CubicHermiteSpline(t, self.phi, self.grid * self.dphi))
        X, P = self.grid[-1], self.phi[-1]
        ratio = X**3 * P / SOMMERFELD
        A = X**SOMMERFELD_LAMBDA * (ratio ** (-SOMMERFELD_LAMBDA / 3.0) - 1.0)
        object.__setattr__(self, "tail_coeff", A)
        log.info("Sommerfeld continuity mismatch at x=%g: x^3 Phi/144 = %.6f", X, ratio)

    @property
    def x0(self):
        return self.grid[0]

    def _series(self, x):
        return _series(self.slope0, x)

    def _tail(self, x):
        base = SOMMERFELD / x**3
        if self.tail_mode == "sommerfeld":
            return base, -3.0 * base / x
        u = 1.0 + self.tail_coeff * x ** (-SOMMERFELD_LAMBDA)
        val = base * u ** (-3.0 / SOMMERFELD_LAMBDA)
        return val, -3.0 * val / (x * u)

    def _eval(self, x):
        x = np.asarray(x, dtype=float)
        val = np.empty_like(x)
        der = np.empty_like(x)
        lo = x < self.x0
        hi = x > self.xmax
        mid = ~(lo | hi)
        if lo.any():
            val[lo], der[lo] = self._series(x[lo])
        if hi.any():
            val[hi], der[hi] = self._tail(x[hi])
        if mid.any():
            xm = x[mid]
            tm = np.log(xm)
            val[mid] = self._spline(tm)
            der[mid] = self._spline(tm, 1) / xm
        return val, der

    def __call__(self, x):
        return self._eval(x)[0]

    def derivative(self, x):
        return self._eval(x)[1]

    def second_derivative(self, x):
        """Phi'' taken from the differential equation itself."""
        x = np.asarray(x, dtype=float)
        v = np.maximum(self(x), 0.0)
        with np.errstate(divide="ignore"):
            return v * np.sqrt(v) / np.sqrt(x)

    def residual(self):
        """Max relative ODE residual at interior nodes (4th-order differences of Phi')."""
        return float(np.max(_residual_profile(self.grid, self.dphi, self.phi)))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "phi", "dphi"])
            for row in zip(self.grid, self.phi, self.dphi):
                w.writerow([repr(float(v)) for v in row])


def _residual_profile(grid, dphi, phi):
    dt = math.log(grid[1] / grid[0])
    p = dphi
    dpdt = (p[:-4] - 8.0 * p[1:-3] + 8.0 * p[3:-1] - p[4:]) / (12.0 * dt)
    x = grid[2:-2]
    f = phi[2:-2]
    rhs = f * np.sqrt(f) / np.sqrt(x)
    return np.abs(dpdt / x - rhs) / rhs


def _series(s, x):
    """Small-x expansion 1 + s x + 4/3 x^{3/2} + 2/5 s x^{5/2} + 1/3 x^3 and its derivative."""
    rx = np.sqrt(x)
    val = 1.0 + s * x + (4.0 / 3.0) * x * rx + 0.4 * s * x * x * rx + x**3 / 3.0
    der = s + 2.0 * rx + s * x * rx + x * x
    return val, der


def _series_init(s, x0):
    return tuple(float(v) for v in _series(s, x0))


class _Shooter:
    def __init__(self, t0, dt, n, max_iter):
        self.t0, self.dt, self.n, self.max_iter = t0, dt, n, max_iter
        self.buf = (np.empty(n), np.empty(n))

    def run(self, i0, phi0, p0, out=None):
        phi, dphi = out if out is not None else self.buf
        return kernels.tf_rk4_log(self.t0, self.dt, i0, phi0, p0, phi, dphi)

    def bisect(self, i0, init, lo, hi):
        """Bisect ``param`` between lo (Phi hits zero) and hi (Phi' turns up)."""
        st_lo = self.run(i0, *init(lo))[0]
        st_hi = self.run(i0, *init(hi))[0]
        if st_lo == 0:
            return lo, lo
        if st_hi == 0:
            return hi, hi
        if st_lo != -1 or st_hi != 1:
            raise ShootingError(f"bracket does not straddle the separatrix at node {i0}", (lo, hi))
        for _ in range(self.max_iter):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                return lo, hi
            st = self.run(i0, *init(mid))[0]
            if st == 0:
                return mid, mid
            if st < 0:
                lo = mid
            else:
                hi = mid
        raise ShootingError(f"bisection did not converge in {self.max_iter} iterations", (lo, hi))


def solve_tf_universal(tol=1e-8, xmax=100.0, n_nodes=4000, x0=1e-6, max_iter=200, tail_mode="matched"):
    """Solve the universal Thomas-Fermi problem by bisection shooting.

    The initial slope is bisected on the dichotomy "Phi reaches 0" versus
    "Phi' becomes positive" down to float resolution. The bracketing
    trajectories agree only up to the point where the unstable mode has
    amplified the residual gap, so the shot is restarted there with Phi
    frozen and Phi' re-bisected; this repeats until ``xmax``.

    ``tol`` bounds the relative ODE residual on the grid; the node count is
    doubled (at most three times) until the residual meets it.
    """
    if not 0 < tol <= 1e-3:
        raise ValueError(f"tol must lie in (0, 1e-3], got {tol}")
    if xmax < 10:
        raise ValueError(f"xmax must be >= 10, got {xmax}")
    for _ in range(4):
        u = _solve_on_grid(xmax, n_nodes, x0, max_iter, tail_mode)
        res = u.residual()
        if res <= tol:
            return u
        log.info("residual %.3g above tol %.3g with %d nodes; refining", res, tol, n_nodes)
        n_nodes = 2 * n_nodes - 1
    raise ShootingError(f"ODE residual {res:.3g} above tol {tol:.3g} at {n_nodes} nodes", (u.slope0, u.slope0))


def _solve_on_grid(xmax, n_nodes, x0, max_iter, tail_mode):
    t = np.linspace(math.log(x0), math.log(xmax), n_nodes)
    t0, dt = t[0], t[1] - t[0]
    n_keep = n_nodes
    # shoot well past xmax so that every trial trajectory declares itself
    n_nodes += int(math.ceil(math.log(_OVERSHOOT) / dt))
    grid = np.exp(t0 + dt * np.arange(n_nodes))
    grid[n_keep - 1] = xmax
    phi = np.empty(n_nodes)
    dphi = np.empty(n_nodes)
    sh = _Shooter(t0, dt, n_nodes, max_iter)
    A = (np.empty(n_nodes), np.empty(n_nodes))
    B = (np.empty(n_nodes), np.empty(n_nodes))

    def init0(s):
        return _series_init(s, x0)

    i0, init, lo, hi = 0, init0, *_SLOPE_BRACKET
    slope0 = None
    restarts = []
    while True:
        lo, hi = sh.bisect(i0, init, lo, hi)
        if slope0 is None:
            slope0 = 0.5 * (lo + hi)
        _, last_a = sh.run(i0, *init(lo), out=A)
        _, last_b = sh.run(i0, *init(hi), out=B)
        last = min(last_a, last_b)
        seg = slice(i0, last + 1)
        pa, pb = A[0][seg], B[0][seg]
        apart = np.nonzero(np.abs(pa - pb) > _SPLIT_RTOL * np.abs(0.5 * (pa + pb)))[0]
        split = last if apart.size == 0 else i0 + apart[0] - 1
        if last == n_nodes - 1 and apart.size == 0:
            split = n_nodes - 1
        # back off so the restart happens well before the trajectories separate
        if split < n_nodes - 1:
            split = max(i0 + 1, i0 + int(0.9 * (split - i0)))
        if split <= i0:
            raise ShootingError(f"no progress past node {i0} (x={grid[i0]:.4g})", (lo, hi))
        phi[i0 : split + 1] = 0.5 * (A[0][i0 : split + 1] + B[0][i0 : split + 1])
        dphi[i0 : split + 1] = 0.5 * (A[1][i0 : split + 1] + B[1][i0 : split + 1])
        if split == n_nodes - 1:
            break
        restarts.append(float(grid[split]))
        i0 = split
        phi_fix = float(phi[i0])
        p_mid = float(dphi[i0])
        w = abs(A[1][i0] - B[1][i0]) + 1e-13 * abs(p_mid)

        def init(p, _phi=phi_fix):
            return _phi, p

        lo, hi = _expand_bracket(sh, i0, init, p_mid, w)
    keep = slice(0, n_keep)
    restarts = tuple(x for x in restarts if x < xmax)
    return TFUniversal(grid[keep].copy(), phi[keep].copy(), dphi[keep].copy(), slope0, float(xmax), tail_mode, restarts)


def _expand_bracket(sh, i0, init, center, w):
    for _ in range(60):
        lo, hi = center - w, center + w
        st_lo = sh.run(i0, *init(lo))[0]
        st_hi = sh.run(i0, *init(hi))[0]
        if st_lo in (-1, 0) and st_hi in (1, 0):
            return lo, hi
        w *= 4.0
    raise ShootingError(f"could not bracket Phi' at node {i0}", (center - w, center + w))


def slope_dop853(rtol=1e-12, x_end=1e4, x0=1e-6, max_step=np.inf, max_iter=200):
    """Initial slope by bisection with an adaptive Dormand-Prince 8(5,3) integrator.

    Independent of the RK4 kernel: integrates in x (not ln x) with terminal
    events on Phi = 0 and Phi' = 0.
    """

    def rhs(x, y):
        f = max(y[0], 0.0)
        return [y[1], f * math.sqrt(f) / math.sqrt(x)]

    def hit_zero(x, y):
        return y[0]

    def turn_up(x, y):
        return y[1]

    hit_zero.terminal = True
    turn_up.terminal = True

    def status(s):
        sol = solve_ivp(
            rhs, (x0, x_end), list(_series_init(s, x0)), method="DOP853",
            rtol=rtol, atol=1e-15, events=(hit_zero, turn_up), max_step=max_step,
        )
        if sol.t_events[0].size:
            return -1
        if sol.t_events[1].size:
            return 1
        return 0

    lo, hi = _SLOPE_BRACKET
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo < 1e-13:
            return mid
        st = status(mid)
        if st == 0:
            return mid
        if st < 0:
            lo = mid
        else:
            hi = mid
    raise ShootingError("DOP853 bisection did not converge", (lo, hi))


def tf_length(Z, q=2):
    """Thomas-Fermi length b = (3 pi / 2q)^{2/3} Z^{-1/3}."""
    return (3.0 * math.pi / (2.0 * q)) ** (2.0 / 3.0) * Z ** (-1.0 / 3.0)


def _require_neutral(atom):
    if not atom.neutral:
        raise UnsupportedConfiguration(
            f"Thomas-Fermi ions are not supported (Z={atom.Z}, N={atom.N}); use coulomb_model for N < Z"
        )


def tf_potential(atom, u, r):
    """W^TF(r) = (Z/r) Phi(r/b); +inf at r = 0."""
    _require_neutral(atom)
    r = np.asarray(r, dtype=float)
    b = tf_length(atom.Z, atom.q)
    with np.errstate(divide="ignore"):
        w = atom.Z / r * u(r / b)
    return np.where(r == 0.0, np.inf, w)


def tf_density(atom, u):
    """Thomas-Fermi density of a neutral atom.

    Evaluated through Poisson's equation, ``rho = Delta W / 4 pi =
    Z Phi''(r/b) / (4 pi b^2 r)``, which is a separate route from
    ``(q / 6 pi^2) W**1.5``; the two agree only if the length scale is right.
    """
    _require_neutral(atom)
    Z = float(atom.Z)
    b = tf_length(Z, atom.q)

    def rho(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = Z * u.second_derivative(r / b) / (4.0 * math.pi * b * b * r)
        return np.where(r == 0.0, np.inf, out)

    return RadialDensity(rho, math.inf, Z, (), f"tf(Z={Z:g},q={atom.q})")
