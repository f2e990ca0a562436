"""Fast invariant suite behind ``tfdens selfcheck``.

Each check yields ``(name, ok, detail)``. Kept small enough to run in a few
seconds; the pytest suite covers the same ground more thoroughly.
"""

import math

import numpy as np

from . import coulomb, envelopes, kernels, quadrature, tf_core


def _tf_checks():
    u = tf_core.solve_tf_universal()
    x = u.grid
    x3phi = x**3 * u.phi
    yield "tf: slope0 = -1.588071 +- 1e-4", abs(u.slope0 + 1.588071) < 1e-4, f"{u.slope0!r}"
    yield "tf: ODE residual <= 1e-8", u.residual() <= 1e-8, f"{u.residual():.3g}"
    yield "tf: Phi strictly decreasing and positive", bool(np.all(np.diff(u.phi) < 0) and np.all(u.phi > 0)), ""
    yield "tf: x^3 Phi nondecreasing, <= 144", bool(np.all(np.diff(x3phi) >= 0) and x3phi.max() <= 144), f"max {x3phi.max():.4f}"
    for Z in (1.0, 10.0, 100.0):
        atom = tf_core.AtomSpec(Z)
        res = quadrature.integrate_density(tf_core.tf_density(atom, u), quadrature.RadialRegion.ball(),
                                           tol=1e-10, scale=tf_core.tf_length(Z))
        err = abs(res.value - Z) / Z
        yield f"tf: normalization Z={Z:g}", err < 1e-6, f"{err:.3g}"
        l = np.geomspace(1e-4, 0.1, 20) * Z ** (-1.0 / 3.0)
        ratio = tf_core.tf_potential(atom, u, l) * l / Z
        yield f"tf: near-field W l/Z in [0.5,1] Z={Z:g}", bool(np.all((ratio >= 0.5) & (ratio <= 1))), ""


def _coulomb_checks():
    r = np.geomspace(1e-6, 200.0, 4000)
    worst = 0.0
    for n in range(1, 11):
        for l in (0, n - 1):
            f = lambda s, n=n, l=l: coulomb.hydrogenic_radial(n, l, 1.0, s) ** 2 * s * s
            v = quadrature.integrate(f, 0.0, math.inf, rtol=1e-12, scale=2.0 * n * n).value
            worst = max(worst, abs(v - 1))
    yield "coulomb: orbital normalization n <= 10", worst < 1e-8, f"{worst:.3g}"
    for K in (1, 3, 10):
        fill = coulomb.ShellFilling(K)
        res = quadrature.integrate_density(coulomb.bohr_density(fill), quadrature.RadialRegion.ball(),
                                           tol=1e-11, scale=2.0 * K * K / fill.Z)
        yield f"coulomb: sum rule K={K}", abs(res.value / fill.N - 1) < 1e-8, f"{res.value!r}"
        nu = coulomb.coulomb_chemical_potential(fill)
        res = quadrature.integrate_density(coulomb.semiclassical_density(fill.Z, nu), quadrature.RadialRegion.ball(), tol=1e-11)
        yield f"coulomb: semiclassical norm K={K}", abs(res.value / fill.N - 1) < 1e-8, f"{res.value!r}"
        terms = sum(2 * l + 1 for n in range(1, K + 1) for l in range(n))
        yield f"coulomb: shell count K={K}", terms == K * (K + 1) * (2 * K + 1) // 6, ""
    rho = coulomb.bohr_density(coulomb.ShellFilling(4))(r)
    yield "coulomb: rho_B > 0", bool(np.all(rho[r < 50] > 0)), ""


def _envelope_checks():
    for Z in (1.0, 10.0, 1e3):
        l0 = Z ** (-1.0 / 3.0)
        a, b = envelopes.zeta(l0 * (1 - 1e-12), Z), envelopes.zeta(l0 * (1 + 1e-12), Z)
        yield f"envelopes: zeta continuity Z={Z:g}", abs(a - b) / a < 1e-9, ""
    for Z in (10.0, 100.0, 1e4):
        br = envelopes.omega_breakpoints(Z)
        ok = True
        for i, a in enumerate(br):
            vals = envelopes.omega_branches(a, Z)
            ok &= abs(vals[i] / vals[i + 1] - 1) < 1e-10
        yield f"envelopes: omega continuity Z={Z:g}", ok, ""
        hs = [envelopes.h_semiclassical(a, Z)[0] for a in np.geomspace(1 / Z, 1.0, 50)]
        yield f"envelopes: h <= 1 in window Z={Z:g}", max(hs) <= 1 + 1e-15, f"{float(max(hs))!r}"
    yield "envelopes: h = 1 at a = 1/Z", envelopes.h_semiclassical(1 / 64, 64.0)[0] == 1.0, ""
    rng = np.random.default_rng(0)
    p = envelopes.EnvelopeParams(0.05, 500.0)
    rep = envelopes.varsigma_min(1e-3, p)
    samples = [envelopes.varsigma_objective(s, 1e-3, p) for s in rng.uniform(0, 1, 100) + 1e-12]
    yield "envelopes: varsigma minimum below random samples", rep.min_numeric <= min(samples), ""
    yield "envelopes: theorem_rhs deterministic", envelopes.theorem_rhs(0.3, p) == envelopes.theorem_rhs(0.3, p), ""


def _quadrature_checks():
    fill = coulomb.ShellFilling(5)
    rb = coulomb.bohr_density(fill)
    rs = coulomb.semiclassical_density(fill.Z, coulomb.coulomb_chemical_potential(fill))
    a = fill.Z ** (-1.0 / 3.0)
    whole = quadrature.integrate_density(rb, quadrature.RadialRegion.annulus(a, 2 * a), tol=1e-10)
    parts = [quadrature.integrate_density(rb, quadrature.RadialRegion.annulus(x, y), tol=1e-10)
             for x, y in ((a, 1.3 * a), (1.3 * a, 2 * a))]
    tot = sum(p.value for p in parts)
    yield "quadrature: region additivity", abs(tot - whole.value) <= 1e-9 * whole.value, ""
    reg = quadrature.RadialRegion.annulus(a, 2 * a)
    n1 = quadrature.lp_diff(rb, rs, reg, 1.0, 1e-10).value
    n2 = quadrature.lp_diff(rb, rs, reg, 2.0, 1e-10).value
    yield "quadrature: Hoelder chain p=1,2", n1 <= reg.mes**0.5 * n2 * (1 + 1e-8), ""


def run_all():
    yield "backend", True, kernels.BACKEND
    for group in (_tf_checks, _coulomb_checks, _envelope_checks, _quadrature_checks):
        yield from group()
