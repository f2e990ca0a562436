"""Z-sweeps comparing the non-interacting atom with its semiclassical density.

The interacting ground-state density is out of reach, so experiments use the
Bohr atom (closed shells, no electron-electron repulsion) as the quantum
density; every output says so via ``surrogate = "bohr"``.
"""

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import coulomb, envelopes
from .quadrature import RadialRegion, integrate_density, lp_diff

RADIUS_RULES = ("fixed", "tf", "nuclear")
REGION_KINDS = ("annulus", "shell")
SURROGATE = "bohr"


def parse_radius_rule(rule):
    """'fixed:0.1' -> a = 0.1; 'tf:s' -> a = s Z^{-1/3}; 'nuclear:t' -> a = t / Z."""
    if isinstance(rule, dict):
        kind, value = rule["kind"], rule["value"]
    else:
        kind, _, value = str(rule).partition(":")
        value = value or "1.0"
    if kind not in RADIUS_RULES:
        raise ValueError(f"radius rule must be one of {RADIUS_RULES}, got {kind!r}")
    value = float(value)
    if not value > 0:
        raise ValueError(f"radius rule parameter must be positive, got {value}")
    return kind, value


def radius_for(rule, Z):
    kind, value = parse_radius_rule(rule)
    if kind == "fixed":
        return value
    if kind == "tf":
        return value * Z ** (-1.0 / 3.0)
    return value / Z


def region_for(kind, a):
    if kind == "annulus":
        return RadialRegion.annulus(a, 2.0 * a)
    if kind == "shell":
        return RadialRegion.annulus(0.5 * a, a)
    raise ValueError(f"region kind must be one of {REGION_KINDS}, got {kind!r}")


@dataclass(frozen=True)
class SweepSpec:
    K_list: tuple
    q: int = 2
    radius_rule: str = "tf:1.0"
    region_kind: str = "annulus"
    p_list: tuple = (1.0,)
    tol: float = 1e-8
    output_path: str = None
    seed: int = 0

    def __post_init__(self):
        K = tuple(int(k) for k in self.K_list)
        if not K or any(k < 1 for k in K) or any(b <= a for a, b in zip(K, K[1:])):
            raise ValueError(f"K_list must be a nonempty increasing list of positive integers, got {self.K_list}")
        p = tuple(float(v) for v in self.p_list)
        if not p or any(not v >= 1 for v in p):
            raise ValueError(f"p_list entries must be >= 1, got {self.p_list}")
        parse_radius_rule(self.radius_rule)
        if self.region_kind not in REGION_KINDS:
            raise ValueError(f"region_kind must be one of {REGION_KINDS}, got {self.region_kind!r}")
        if not 0 < self.tol <= 1e-2:
            raise ValueError(f"tol must lie in (0, 1e-2], got {self.tol}")
        object.__setattr__(self, "K_list", K)
        object.__setattr__(self, "p_list", p)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            raw = json.load(fh)
        known = {f.name for f in fields(cls)}
        extra = set(raw) - known
        if extra:
            raise ValueError(f"unknown sweep spec fields: {sorted(extra)}")
        return cls(**raw)


@dataclass(frozen=True)
class SweepRecord:
    K: int
    Z: float
    N: int
    a: float
    region: str
    p: float
    diff_norm: float
    rel_diff: float
    h: float
    E: float
    F_paper: float
    F_consistent: float
    G: float
    bound_l1: float
    omega: float
    jp_bound: float
    converged: bool
    surrogate: str = SURROGATE


CSV_FIELDS = tuple(f.name for f in fields(SweepRecord))


def compare(K, q=2, radius_rule="tf:1.0", region_kind="annulus", p_list=(1.0,), tol=1e-8):
    """One Bohr atom (Z = N(K)) against its semiclassical density; one record per p."""
    filling = coulomb.ShellFilling(K, q)
    Z = float(filling.Z)
    nu = coulomb.coulomb_chemical_potential(filling)
    rho_b = coulomb.bohr_density(filling)
    rho_sc = coulomb.semiclassical_density(Z, nu, q)
    a = radius_for(radius_rule, Z)
    region = region_for(region_kind, a)
    params = envelopes.EnvelopeParams(a, Z)
    e = envelopes.efg(params)
    h, _ = envelopes.h_semiclassical(a, Z)
    omega = envelopes.omega_apriori(a, Z)
    bound_l1 = envelopes.l1_bound(region.mes, params)
    out = []
    for p in p_list:
        d = lp_diff(rho_b, rho_sc, region, p, tol)
        ref = lp_diff(rho_sc, _ZERO, region, p, tol)
        ok = d.converged and ref.converged and ref.value > 0
        rel = d.value / ref.value if ref.value > 0 else math.inf
        jp = envelopes.jp_recurrence(int(p), omega, region.mes, params).bound if float(p).is_integer() else math.nan
        out.append(SweepRecord(
            K, Z, filling.N, a, region_kind, p, d.value, rel, h,
            e.E, e.F_paper, e.F_consistent, e.G, bound_l1, omega, jp, bool(ok),
        ))
    return out


class _Zero:
    support_radius = math.inf
    edges = ()

    def __call__(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))


_ZERO = _Zero()


def _workers():
    env = os.environ.get("TFDENS_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError(f"TFDENS_THREADS must be >= 1, got {env!r}")
        return n
    return min(8, os.cpu_count() or 1)


def run_sweep(spec):
    """Records for every (K, p), sorted by (K, p); written as CSV if ``output_path`` is set."""
    def one(K):
        return compare(K, spec.q, spec.radius_rule, spec.region_kind, spec.p_list, spec.tol)

    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        chunks = list(pool.map(one, spec.K_list))
    records = sorted((r for chunk in chunks for r in chunk), key=lambda r: (r.K, r.p))
    if spec.output_path:
        with open(spec.output_path, "w", newline="", encoding="utf-8") as fh:
            fh.write(records_to_csv(records))
    return records


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def records_to_csv(records):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for rec in records:
        w.writerow([_fmt(v) for v in asdict(rec).values()])
    return buf.getvalue()


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    residual: float


def fit_slope(records, x_field, y_field):
    """Least-squares fit of log(y) against log(x); residual is the RMS misfit."""
    def get(r, f):
        return float(r[f] if isinstance(r, dict) else getattr(r, f))

    if len(records) < 3:
        raise ValueError(f"need at least 3 records, got {len(records)}")
    x = np.array([get(r, x_field) for r in records])
    y = np.array([get(r, y_field) for r in records])
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("fit_slope needs strictly positive fields")
    lx, ly = np.log(x), np.log(y)
    if np.ptp(lx) <= 1e-12 * max(1.0, np.max(np.abs(lx))):
        raise ValueError(f"no spread in {x_field}")
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
    return SlopeFit(float(slope), float(intercept), resid)
