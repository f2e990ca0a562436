import csv
import io
import json
import math

import numpy as np
import pytest

from tfdens import coulomb, harness
from tfdens.quadrature import RadialRegion, lp_diff


def test_k1_ball_difference_in_triangle_bounds():
    fill = coulomb.ShellFilling(1)
    nu = coulomb.coulomb_chemical_potential(fill)
    rb, rs = coulomb.bohr_density(fill), coulomb.semiclassical_density(fill.Z, nu)
    d = lp_diff(rb, rs, RadialRegion.ball(), 1.0, 1e-10)
    assert d.converged
    assert 0 < d.value < 4


def test_radius_rules():
    assert harness.radius_for("fixed:0.25", 1000.0) == 0.25
    assert harness.radius_for("tf:2", 1000.0) == pytest.approx(0.2)
    assert harness.radius_for("nuclear:5", 1000.0) == pytest.approx(0.005)
    assert harness.radius_for({"kind": "tf", "value": 1.0}, 8.0) == pytest.approx(0.5)
    for bad in ("nope:1", "tf:-1", "tf:0"):
        with pytest.raises(ValueError):
            harness.parse_radius_rule(bad)


def test_regions():
    assert harness.region_for("annulus", 0.3) == RadialRegion.annulus(0.3, 0.6)
    assert harness.region_for("shell", 0.3) == RadialRegion.annulus(0.15, 0.3)
    with pytest.raises(ValueError):
        harness.region_for("ball", 0.3)


def test_spec_validation(tmp_path):
    for kw in ({"K_list": []}, {"K_list": [3, 2]}, {"K_list": [0, 1]}, {"K_list": [1], "p_list": [0.5]},
               {"K_list": [1], "region_kind": "x"}, {"K_list": [1], "tol": 0.5}):
        with pytest.raises(ValueError):
            harness.SweepSpec(**kw)
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"K_list": [1, 2], "bogus": 1}))
    with pytest.raises(ValueError):
        harness.SweepSpec.from_json(path)


def test_csv_header_matches_record_fields():
    recs = harness.run_sweep(harness.SweepSpec([1, 2], p_list=[1.0, 2.0]))
    text = harness.records_to_csv(recs)
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == harness.CSV_FIELDS
    assert harness.CSV_FIELDS[:16] == ("K", "Z", "N", "a", "region", "p", "diff_norm", "rel_diff", "h", "E",
                                       "F_paper", "F_consistent", "G", "bound_l1", "omega", "jp_bound")
    assert all(r[-1] == "bohr" for r in rows[1:])
    # shortest round-trip floats
    for rec, row in zip(recs, rows[1:]):
        assert float(row[6]) == rec.diff_norm
        assert row[6] == repr(rec.diff_norm)


def test_sweep_ordering_and_determinism(monkeypatch):
    spec = harness.SweepSpec([2, 5, 7, 9], p_list=[3.0, 1.0, 2.0])
    monkeypatch.setenv("TFDENS_THREADS", "1")
    serial = harness.records_to_csv(harness.run_sweep(spec))
    monkeypatch.setenv("TFDENS_THREADS", "4")
    threaded = harness.records_to_csv(harness.run_sweep(spec))
    assert serial == threaded
    recs = harness.run_sweep(spec)
    assert [(r.K, r.p) for r in recs] == sorted((r.K, r.p) for r in recs)


def test_bad_thread_env(monkeypatch):
    monkeypatch.setenv("TFDENS_THREADS", "0")
    with pytest.raises(ValueError):
        harness.run_sweep(harness.SweepSpec([1]))


def test_output_file(tmp_path):
    out = tmp_path / "o.csv"
    recs = harness.run_sweep(harness.SweepSpec([1, 2], output_path=str(out)))
    assert out.read_text() == harness.records_to_csv(recs)


@pytest.mark.parametrize("rule", ["fixed:0.1", "tf:1.0", "nuclear:2.0"])
def test_validation_matrix(rule):
    for K in range(1, 21):
        for rec in harness.compare(K, 2, rule, "annulus", (1.0, 2.0, 3.0)):
            assert rec.converged
            assert math.isfinite(rec.rel_diff)
            for name in ("diff_norm", "rel_diff", "h", "E", "F_paper", "F_consistent", "G", "bound_l1", "omega",
                         "jp_bound"):
                assert getattr(rec, name) >= 0, name


def test_h_at_most_one_when_a_ge_inverse_Z():
    for rule in ("tf:1.0", "nuclear:1.0", "nuclear:3.0", "fixed:0.5"):
        for rec in harness.compare(8, 2, rule):
            if rec.a >= 1 / rec.Z:
                assert rec.h <= 1 + 1e-15


def test_jp_bound_only_for_integer_p():
    r1, r15 = harness.compare(3, 2, "tf:1.0", "shell", (1.0, 1.5))
    assert r1.jp_bound > 0
    assert math.isnan(r15.jp_bound)


def test_neutral_atoms_only():
    for K in (1, 4, 9):
        rec = harness.compare(K)[0]
        assert rec.Z == rec.N == coulomb.shell_count(K, 2)


def test_rel_diff_trend_pairwise_average():
    recs = harness.run_sweep(harness.SweepSpec(list(range(4, 17))))
    v = [r.rel_diff for r in recs]
    avg = [(x + y) / 2 for x, y in zip(v, v[1:])]
    assert all(b <= a for a, b in zip(avg, avg[1:]))


# --- fit_slope -------------------------------------------------------------


def test_fit_exact_power():
    recs = [{"x": x, "y": x**2} for x in (1.0, 2.0, 5.0, 11.0)]
    fit = harness.fit_slope(recs, "x", "y")
    assert fit.slope == pytest.approx(2.0, abs=1e-10)
    assert fit.residual < 1e-12


def test_fit_constant():
    recs = [{"x": x, "y": 3.0} for x in (1.0, 2.0, 5.0)]
    fit = harness.fit_slope(recs, "x", "y")
    assert fit.slope == pytest.approx(0.0, abs=1e-12)
    assert math.exp(fit.intercept) == pytest.approx(3.0)


def test_fit_errors():
    with pytest.raises(ValueError):
        harness.fit_slope([{"x": 1.0, "y": 1.0}] * 2, "x", "y")
    with pytest.raises(ValueError):
        harness.fit_slope([{"x": 2.0, "y": v} for v in (1.0, 2.0, 3.0)], "x", "y")
    with pytest.raises(ValueError):
        harness.fit_slope([{"x": v, "y": -1.0} for v in (1.0, 2.0, 3.0)], "x", "y")


def test_fit_on_records():
    recs = harness.run_sweep(harness.SweepSpec([2, 3, 4]))
    fit = harness.fit_slope(recs, "Z", "h")
    # at a = Z^{-1/3}, h = Z^{-1/3} exactly
    assert fit.slope == pytest.approx(-1 / 3, abs=1e-12)
    assert np.isfinite(fit.residual)
