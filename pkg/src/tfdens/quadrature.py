"""Adaptive radial quadrature, L^p norms of density differences and pairings.

All integrals are over spherically symmetric regions, so ``d^3x`` becomes
``4 pi r^2 dr``. Integrands are vectorized callables.
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import legendre
from scipy.optimize import brentq

from .errors import BoundViolation

# Kronrod 15-point abscissae (nonnegative half); weights are recomputed below
_XK_HALF = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])


def _kronrod15():
    x = np.concatenate([-_XK_HALF[:-1], _XK_HALF[::-1]])
    # weights from the moment conditions; exact for polynomials of degree <= 14
    V = legendre.legvander(x, 14).T
    rhs = np.zeros(15)
    rhs[0] = 2.0
    w = np.linalg.solve(V, rhs)
    return x, w


_XK, _WK = _kronrod15()
_G7_IDX = np.arange(1, 15, 2)
_, _WG = legendre.leggauss(7)
_NODES_PER_PANEL = 15
SCAN_POINTS = 256


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    nodes_used: int
    converged: bool = True


@dataclass(frozen=True)
class RadialRegion:
    kind: str
    r_inner: float
    r_outer: float

    def __post_init__(self):
        if self.kind not in ("ball", "annulus", "interval"):
            raise ValueError(f"unknown region kind {self.kind!r}")
        if self.kind == "ball" and self.r_inner != 0.0:
            raise ValueError("a ball has r_inner = 0")
        if not 0.0 <= self.r_inner < self.r_outer:
            raise ValueError(f"need 0 <= r_inner < r_outer, got {self.r_inner}, {self.r_outer}")

    @classmethod
    def ball(cls, R=math.inf):
        return cls("ball", 0.0, R)

    @classmethod
    def annulus(cls, r_inner, r_outer):
        return cls("annulus", r_inner, r_outer)

    @property
    def mes(self):
        return 4.0 * math.pi / 3.0 * (self.r_outer**3 - self.r_inner**3)

    def contains(self, r):
        r = np.asarray(r, dtype=float)
        return (r >= self.r_inner) & (r <= self.r_outer)


def _panels(f, lo, hi):
    """Kronrod-15 value and |K15 - G7| for each panel [lo_i, hi_i]."""
    c = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo)
    x = c[:, None] + h[:, None] * _XK[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    k = h * (fx @ _WK)
    g = h * (fx[:, _G7_IDX] @ _WG)
    return k, np.abs(k - g)


def integrate(f, a, b, rtol=1e-8, atol=0.0, max_nodes=10**6, scale=1.0):
    """Globally adaptive integral of ``f`` over [a, b]; ``b`` may be +inf.

    Each round bisects every panel whose error exceeds its fair share of the
    target ``max(atol, rtol*|I|)``. A semi-infinite range is mapped by
    ``r = a + scale * s / (1 - s)``.
    """
    if b == a:
        return QuadratureResult(0.0, 0.0, 0)
    if math.isinf(b):
        g = f

        def f(s, _g=g, _a=a):
            s = np.asarray(s)
            one = 1.0 - s
            return _g(_a + scale * s / one) * scale / (one * one)

        a, b = 0.0, 1.0
    lo = np.array([float(a)])
    hi = np.array([float(b)])
    val, err = _panels(f, lo, hi)
    used = _NODES_PER_PANEL
    width0 = b - a
    while True:
        total = float(np.sum(val))
        E = float(np.sum(err))
        target = max(atol, rtol * abs(total))
        if E <= target:
            return QuadratureResult(total, E, used, True)
        pick = err > target / err.size
        # panels at the floating-point width floor cannot be refined further
        pick &= (hi - lo) > 1e-14 * width0
        n_split = int(np.count_nonzero(pick))
        if n_split == 0 or used + 2 * _NODES_PER_PANEL * n_split > max_nodes:
            return QuadratureResult(total, E, used, False)
        mid = 0.5 * (lo[pick] + hi[pick])
        new_lo = np.concatenate([lo[pick], mid])
        new_hi = np.concatenate([mid, hi[pick]])
        v_new, e_new = _panels(f, new_lo, new_hi)
        keep = ~pick
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        val = np.concatenate([val[keep], v_new])
        err = np.concatenate([err[keep], e_new])
        used += 2 * _NODES_PER_PANEL * n_split


def _scan_points(region, scale):
    if math.isinf(region.r_outer):
        s = np.linspace(0.0, 1.0, SCAN_POINTS + 2)[1:-1]
        return region.r_inner + scale * s / (1.0 - s)
    return np.linspace(region.r_inner, region.r_outer, SCAN_POINTS)


def _default_scale(*densities):
    radii = [d.support_radius for d in densities if math.isfinite(d.support_radius)]
    return min(radii) if radii else 1.0


def breakpoints(rho1, rho2, region, scale=None):
    """Support edges and sign changes of rho1 - rho2 inside ``region``, sorted."""
    scale = _default_scale(rho1, rho2) if scale is None else scale
    pts = set()
    for d in (rho1, rho2):
        for e in (d.support_radius, *d.edges):
            if region.r_inner < e < region.r_outer:
                pts.add(float(e))

    def diff(r):
        return float(rho1(np.array([r]))[0] - rho2(np.array([r]))[0])

    r = _scan_points(region, scale)
    r = r[r > 0.0] if region.r_inner == 0.0 else r
    d = rho1(r) - rho2(r)
    sgn = np.sign(d)
    for i in np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]:
        pts.add(brentq(diff, r[i], r[i + 1], xtol=1e-300, rtol=1e-15))
    return sorted(pts)


def _piecewise(integrand, region, cuts, rtol, max_nodes, scale):
    knots = [region.r_inner, *cuts, region.r_outer]
    value = err = 0.0
    used = 0
    ok = True
    budget = max_nodes
    for a, b in zip(knots[:-1], knots[1:]):
        res = integrate(integrand, a, b, rtol=rtol, max_nodes=budget, scale=scale)
        value += res.value
        err += res.abs_error_estimate
        used += res.nodes_used
        budget = max(budget - res.nodes_used, 2 * _NODES_PER_PANEL)
        ok &= res.converged
    return QuadratureResult(value, err, used, ok)


def lp_diff(rho1, rho2, region, p=1.0, tol=1e-8, max_nodes=10**6, scale=None):
    """(int_region |rho1 - rho2|^p d^3x)^(1/p)."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if not 0 < tol <= 1e-2:
        raise ValueError(f"tol must lie in (0, 1e-2], got {tol}")
    scale = _default_scale(rho1, rho2) if scale is None else scale
    cuts = breakpoints(rho1, rho2, region, scale)

    def integrand(r):
        return 4.0 * math.pi * r * r * np.abs(rho1(r) - rho2(r)) ** p

    res = _piecewise(integrand, region, cuts, tol, max_nodes, scale)
    if res.value <= 0.0:
        return QuadratureResult(0.0, res.abs_error_estimate ** (1.0 / p), res.nodes_used, res.converged)
    val = res.value ** (1.0 / p)
    err = val * res.abs_error_estimate / (p * res.value)
    return QuadratureResult(val, err, res.nodes_used, res.converged and math.isfinite(val))


def integrate_density(rho, region, tol=1e-8, max_nodes=10**6, scale=None):
    """int_region rho d^3x, split at the density's declared edges."""
    scale = _default_scale(rho) if scale is None else scale
    cuts = sorted(e for e in {rho.support_radius, *rho.edges} if region.r_inner < e < region.r_outer)
    return _piecewise(lambda r: 4.0 * math.pi * r * r * rho(r), region, cuts, tol, max_nodes, scale)


def pair_test_function(U, rho1, rho2, region, tol=1e-8, max_nodes=10**6, scale=None):
    """int_region U (rho1 - rho2) d^3x for a radial profile U with |U| <= 1."""
    scale = _default_scale(rho1, rho2) if scale is None else scale
    cuts = set(breakpoints(rho1, rho2, region, scale))
    cuts.update(e for e in getattr(U, "edges", ()) if region.r_inner < e < region.r_outer)

    def integrand(r):
        return 4.0 * math.pi * r * r * U(r) * (rho1(r) - rho2(r))

    return _piecewise(integrand, region, sorted(cuts), tol, max_nodes, scale)


class RadialProfile:
    """Radial test function restricted to a region (zero outside)."""

    def __init__(self, fn, region, edges=()):
        self.fn = fn
        self.region = region
        self.edges = tuple(edges)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return np.where(self.region.contains(r), self.fn(r), 0.0)


def sign_profile(rho1, rho2, region):
    """U = sign(rho1 - rho2) on the region: the L^1 extremal test function."""
    return RadialProfile(lambda r: np.sign(rho1(r) - rho2(r)), region)


def holder_extremal_U(rho1, rho2, region, p, omega, samples=1000, scale=None):
    """U = omega^{1-p} sign(d) |d|^{p-1} on the region, d = rho1 - rho2.

    Pairing it with d gives omega^{1-p} ||d||_p^p. Requires |d| <= omega,
    checked on ``samples`` radii.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    scale = _default_scale(rho1, rho2) if scale is None else scale
    if math.isinf(region.r_outer):
        s = np.linspace(0.0, 1.0, samples + 2)[1:-1]
        r = region.r_inner + scale * s / (1.0 - s)
    else:
        r = np.linspace(region.r_inner, region.r_outer, samples)
        r = r[r > 0.0]
    d = np.abs(rho1(r) - rho2(r))
    bad = np.nonzero(~(d <= omega))[0]
    if bad.size:
        r_bad = float(r[bad[0]])
        raise BoundViolation(f"|rho1 - rho2| = {d[bad[0]]:.6g} exceeds omega = {omega:.6g} at r = {r_bad:.6g}", r_bad)

    def fn(r):
        d = rho1(r) - rho2(r)
        return omega ** (1.0 - p) * np.sign(d) * np.abs(d) ** (p - 1.0)

    return RadialProfile(fn, region)
