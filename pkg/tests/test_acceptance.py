"""Acceptance criteria, one test each; every test records a PASS/FAIL line
that is printed in the terminal summary."""

import itertools
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from tfdens import coulomb, envelopes, harness, tf_core
from tfdens.quadrature import RadialRegion, holder_extremal_U, integrate, integrate_density, lp_diff, pair_test_function


def verdict(label, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_1_tf_slope():
    t0 = time.perf_counter()
    u = tf_core.solve_tf_universal()
    elapsed = time.perf_counter() - t0
    fine = tf_core.solve_tf_universal(n_nodes=2 * u.grid.size - 1)
    s_rk, s_rk2 = u.slope0, fine.slope0
    s_dp = tf_core.slope_dop853()
    s_dp2 = tf_core.slope_dop853(max_step=0.5)
    checks = [
        abs(s_rk + 1.588071) <= 1e-4,
        abs(s_rk2 / s_rk - 1) <= 1e-5,
        abs(s_dp2 / s_dp - 1) <= 1e-5,
        abs(s_dp / s_rk - 1) <= 1e-5,
        elapsed < 1.0,
    ]
    verdict("1 TF slope", all(checks),
            f"rk4={s_rk:.9f} rk4/2={s_rk2:.9f} dop853={s_dp:.9f} dop853(h<=0.5)={s_dp2:.9f} solve={elapsed:.3f}s")


def test_criterion_2_tf_identity_normalization_scaling(tf_universal):
    u = tf_universal
    rng = np.random.default_rng(2)
    atom = tf_core.AtomSpec(26.0)
    b = tf_core.tf_length(26.0)
    r = b * 10 ** rng.uniform(-4, 2.5, 100)
    rho = tf_core.tf_density(atom, u)(r)
    ident = float(np.max(np.abs(rho / (2 / (6 * math.pi**2) * tf_core.tf_potential(atom, u, r) ** 1.5) - 1)))
    norm_err = []
    for Z in (1.0, 10.0, 100.0):
        res = integrate_density(tf_core.tf_density(tf_core.AtomSpec(Z), u), RadialRegion.ball(), tol=1e-10,
                                scale=tf_core.tf_length(Z))
        norm_err.append(abs(res.value - Z) / Z)
    rr = 10 ** rng.uniform(-3, 1, 20)
    Zs = 10 ** rng.uniform(0, 3, 20)
    scal = max(
        abs(tf_core.tf_density(tf_core.AtomSpec(Z), u)(x)
            / (Z**2 * tf_core.tf_density(tf_core.AtomSpec(1.0), u)(Z ** (1 / 3) * x)) - 1)
        for Z, x in zip(Zs, rr)
    )
    ok = ident <= 1e-8 and max(norm_err) < 1e-6 and scal <= 1e-6
    verdict("2 TF identity/normalization/scaling", ok,
            f"identity {ident:.2e}, norm errors {', '.join(f'{e:.2e}' for e in norm_err)}, scaling {scal:.2e}")


def test_criterion_3_coulomb():
    worst_orth = 0.0
    for l in range(10):
        for n in range(l + 1, 11):
            for m in range(n, 11):
                v = integrate(lambda r: coulomb.hydrogenic_radial(n, l, 1.0, r) * coulomb.hydrogenic_radial(m, l, 1.0, r) * r * r,
                              0.0, math.inf, rtol=1e-12, atol=1e-14, scale=2.0 * m * m).value
                worst_orth = max(worst_orth, abs(v - (n == m)))
    worst_sum = 0.0
    for K in range(1, 11):
        fill = coulomb.ShellFilling(K)
        v = integrate_density(coulomb.bohr_density(fill), RadialRegion.ball(), tol=1e-12, scale=2.0 * K * K / fill.Z).value
        worst_sum = max(worst_sum, abs(v / (2 * K * (K + 1) * (2 * K + 1) / 6) - 1))
    worst_nu = 0.0
    for N in (2, 10, 28, 60):
        fill = coulomb.ShellFilling.for_electrons(N)
        nu = coulomb.coulomb_chemical_potential(fill)
        assert nu == pytest.approx(-((2 * fill.Z**3 / (24 * N)) ** (2 / 3)), rel=1e-15)
        v = integrate_density(coulomb.semiclassical_density(fill.Z, nu), RadialRegion.ball(), tol=1e-12).value
        worst_nu = max(worst_nu, abs(v / N - 1))
    ok = worst_orth <= 1e-8 and worst_sum <= 1e-8 and worst_nu <= 1e-8
    verdict("3 Coulomb model", ok,
            f"orthonormality {worst_orth:.2e}, shell sum rule {worst_sum:.2e}, nu normalization {worst_nu:.2e}")


def test_criterion_4_envelope_continuity():
    zeta_err = max(
        abs(envelopes.zeta(Z ** (-1 / 3) * (1 - 1e-12), Z) / envelopes.zeta(Z ** (-1 / 3) * (1 + 1e-12), Z) - 1)
        for Z in (1.0, 10.0, 1e3)
    )
    omega_err = 0.0
    for Z in (2.0, 10.0, 1e3, 1e6):
        for i, a in enumerate(envelopes.omega_breakpoints(Z)):
            br = envelopes.omega_branches(a, Z)
            omega_err = max(omega_err, abs(br[i] / br[i + 1] - 1))
    h_exact = all(envelopes.h_semiclassical(1 / Z, Z)[0] == 1.0 for Z in (1.0, 2.0, 64.0, 1e3, 1e6))
    ok = zeta_err < 1e-9 and omega_err <= 1e-10 and h_exact
    verdict("4 envelope continuity", ok, f"zeta {zeta_err:.2e}, omega {omega_err:.2e}, h(1/Z)==1: {h_exact}")


GRID_U = np.geomspace(1e-6, 1e2, 5)
GRID_A = np.geomspace(1e-3, 1.0, 5)
GRID_Z = np.geomspace(10.0, 1e4, 5)


def _varsigma_grid():
    for U, a, Z in itertools.product(GRID_U, GRID_A, GRID_Z):
        yield (U, a, Z), envelopes.varsigma_min(float(U), envelopes.EnvelopeParams(float(a), float(Z)))


def test_criterion_5a_varsigma_stationary_point():
    worst, n = 0.0, 0
    for _, rep in _varsigma_grid():
        if not rep.clamped:
            n += 1
            worst = max(worst, abs(rep.min_numeric / rep.min_closed - 1))
    verdict("5a varsigma numeric vs closed form", n > 0 and worst <= 1e-6,
            f"{n} unclamped grid points, max relative gap {worst:.2e}")


def test_criterion_5b_varsigma_domination():
    cons, paper = [], []
    worst_point = None
    for pt, rep in _varsigma_grid():
        cons.append(rep.ratio_consistent)
        paper.append(rep.ratio_paper)
        if rep.ratio_consistent == min(cons):
            worst_point = pt
    lo, hi = min(cons), max(cons)
    ok = 1.0 <= lo and hi <= 4.0
    verdict("5b theorem_rhs(consistent)/numeric-min in [1,4]", ok,
            f"consistent ratio [{lo:.4f}, {hi:.4f}] (min at U,a,Z={tuple(float(f'{v:.3g}') for v in worst_point)}); "
            f"paper-variant ratio [{min(paper):.4f}, {max(paper):.4f}] (reported only)")


def test_criterion_6_jp_recurrence():
    rng = np.random.default_rng(6)
    params = envelopes.EnvelopeParams(0.1, 10.0)
    exact = True
    for _ in range(100):
        omega, mes, E, F, G = 10 ** rng.uniform([0, -4, -2, -2, -2], [8, 2, 5, 8, 5])
        J1 = envelopes.jp_recurrence(1, omega, mes, params, E=E, F=F, G=G).values[1]
        J0 = omega * mes
        hand = omega ** -1 * E * J0 + (omega ** -2 * F) ** (1 / 3) * J0 ** (2 / 3) + G
        exact &= J1 == hand
    monotone = True
    for _ in range(100):
        p = int(rng.integers(1, 7))
        omega = 10 ** rng.uniform(0, 8)
        base = dict(zip(("E", "F", "G", "mes"), 10 ** rng.uniform([-2, -2, -2, -4], [4, 6, 4, 1])))

        def J(kw):
            kw = dict(kw)
            return envelopes.jp_recurrence(p, omega, kw.pop("mes"), params, **kw)

        ref = J(base)
        for key in base:
            bumped = J({**base, key: base[key] * (1 + rng.uniform(1e-6, 1.0))})
            monotone &= all(b >= a for a, b in zip(ref.values, bumped.values)) and bumped.bound >= ref.bound
    verdict("6 J_p recurrence", exact and monotone, f"J1 bit-exact on 100 points: {exact}; monotone on 100 points: {monotone}")


def test_criterion_7a_surrogate_decrease():
    t0 = time.perf_counter()
    recs = harness.run_sweep(harness.SweepSpec(list(range(4, 17)), 2, "tf:1.0", "annulus", [1.0]))
    elapsed = time.perf_counter() - t0
    factor = recs[0].rel_diff / recs[-1].rel_diff
    verdict("7a rel_diff decrease K=4 -> 16", factor >= 1.5 and elapsed < 120 and all(r.converged for r in recs),
            f"factor {factor:.2f}, sweep {elapsed:.2f}s")


def test_criterion_7b_surrogate_slope():
    recs = harness.run_sweep(harness.SweepSpec(list(range(4, 17)), 2, "tf:1.0", "annulus", [1.0]))
    fit = harness.fit_slope(recs, "Z", "rel_diff")
    verdict("7b fit_slope(rel_diff vs Z) in [-0.6, -0.1]", -0.6 <= fit.slope <= -0.1,
            f"slope {fit.slope:.4f} (rms residual {fit.residual:.3f})")


def test_criterion_8_holder_identity():
    fill = coulomb.ShellFilling(6)
    nu = coulomb.coulomb_chemical_potential(fill)
    rb, rs = coulomb.bohr_density(fill), coulomb.semiclassical_density(fill.Z, nu)
    a = fill.Z ** (-1 / 3)
    region = RadialRegion.annulus(a, 2 * a)
    r = np.linspace(a, 2 * a, 10001)
    omega = float(np.max(np.abs(rb(r) - rs(r)))) * 1.05
    errs = []
    for p in (2.0, 3.0):
        U = holder_extremal_U(rb, rs, region, p, omega)
        pair = pair_test_function(U, rb, rs, region, tol=1e-11).value
        ref = omega ** (1 - p) * lp_diff(rb, rs, region, p, tol=1e-11).value ** p
        errs.append(abs(pair / ref - 1))
    verdict("8 Hoelder extremal pairing", max(errs) <= 1e-6, f"p=2: {errs[0]:.2e}, p=3: {errs[1]:.2e}")


def test_criterion_9_determinism(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text('{"K_list": [2, 4, 6, 8, 10], "p_list": [1, 2, 3], "radius_rule": "tf:1.0"}')
    outs = []
    for threads in ("1", "4"):
        out = tmp_path / f"run{threads}.csv"
        res = subprocess.run([sys.executable, "-m", "tfdens", "sweep", "--spec", str(spec), "-o", str(out)],
                             env={**os.environ, "TFDENS_THREADS": threads}, capture_output=True)
        assert res.returncode == 0, res.stderr
        outs.append(out.read_bytes())
    sc = subprocess.run([sys.executable, "-m", "tfdens", "selfcheck"], capture_output=True, text=True)
    identical = outs[0] == outs[1]
    verdict("9 determinism", identical and sc.returncode == 0,
            f"sweep byte-identical: {identical}; selfcheck exit {sc.returncode}")
