"""Geometry, semiclassical scales and the explicit error envelopes.

Every bound is reported modulo unspecified constants; those constants are
parameters here and default to 1.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

F_VARIANTS = ("paper", "consistent")


@dataclass(frozen=True)
class NucleiConfig:
    positions: np.ndarray
    charges: np.ndarray

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        chg = np.atleast_1d(np.asarray(self.charges, dtype=float))
        if pos.size == 0 or chg.size == 0:
            raise ValueError("a nuclei configuration needs at least one nucleus")
        if pos.shape != (chg.size, 3):
            raise ValueError(f"positions must be ({chg.size}, 3), got {pos.shape}")
        if np.any(chg <= 0):
            raise ValueError("nuclear charges must be positive")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "charges", chg)

    @classmethod
    def single(cls, Z, at=(0.0, 0.0, 0.0)):
        return cls([at], [Z])

    @property
    def M(self):
        return self.charges.size

    @property
    def Z(self):
        return float(self.charges.sum())

    def potential(self, x):
        """V(x) = sum_m Z_m / |x - y_m|."""
        x = np.asarray(x, dtype=float)
        d = np.linalg.norm(x[..., None, :] - self.positions, axis=-1)
        with np.errstate(divide="ignore"):
            return np.sum(self.charges / d, axis=-1)


def ell(x, cfg):
    """Distance from x (shape (..., 3)) to the nearest nucleus."""
    if not isinstance(cfg, NucleiConfig):
        cfg = NucleiConfig(*cfg)
    x = np.asarray(x, dtype=float)
    d = np.linalg.norm(x[..., None, :] - cfg.positions, axis=-1)
    out = d.min(axis=-1)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SeparationCheck:
    min_distance: float
    threshold: float
    passed: bool

    @property
    def margin(self):
        return self.min_distance - self.threshold


def check_separation(cfg, Z, sigma=0.0):
    """Pairwise nuclear distance against Z^{-1/3 + sigma}."""
    threshold = Z ** (-1.0 / 3.0 + sigma)
    if cfg.M < 2:
        return SeparationCheck(math.inf, threshold, True)
    diff = cfg.positions[:, None, :] - cfg.positions[None, :, :]
    d = np.linalg.norm(diff, axis=-1)
    dmin = float(d[np.triu_indices(cfg.M, 1)].min())
    return SeparationCheck(dmin, threshold, dmin >= threshold)


def zeta(l, Z):
    """Z^{1/2} l^{-1/2} for l <= Z^{-1/3}, l^{-2} beyond; +inf at l = 0."""
    l = float(l)
    if l < 0:
        raise ValueError(f"distance must be nonnegative, got {l}")
    if l == 0.0:
        return math.inf
    if l <= Z ** (-1.0 / 3.0):
        return math.sqrt(Z / l)
    return l**-2


def in_window(a, Z, eps=1.0):
    return eps / Z <= a <= eps


def h_semiclassical(a, Z, eps=1.0):
    """Effective semiclassical parameter 1/(zeta a) and whether a lies in [eps/Z, eps]."""
    return 1.0 / (zeta(a, Z) * a), in_window(a, Z, eps)


@dataclass(frozen=True)
class EnvelopeParams:
    a: float
    Z: float
    delta: float = 0.0
    eps: float = 1.0
    C: float = 1.0
    f_variant: str = "paper"

    def __post_init__(self):
        if not self.a > 0 or not self.Z > 0:
            raise ValueError(f"a and Z must be positive, got a={self.a}, Z={self.Z}")
        if not 0.0 <= self.delta <= 1.0 / 3.0:
            raise ValueError(f"delta must lie in [0, 1/3], got {self.delta}")
        if not 0.0 < self.eps <= 1.0:
            raise ValueError(f"eps must lie in (0, 1], got {self.eps}")
        if self.f_variant not in F_VARIANTS:
            raise ValueError(f"f_variant must be one of {F_VARIANTS}, got {self.f_variant!r}")

    @property
    def zeta(self):
        # ell ranges over [a, 2a] in the annulus; a is the inner-regime worst case
        return zeta(self.a, self.Z)

    @property
    def window_ok(self):
        return in_window(self.a, self.Z, self.eps)

    def replace(self, **kw):
        return EnvelopeParams(**{**self.__dict__, **kw})


@dataclass(frozen=True)
class EFG:
    E: float
    F: float
    G: float
    F_paper: float
    F_consistent: float


def efg(params):
    z = params.zeta
    zpow = params.Z ** (5.0 / 3.0 - params.delta)
    E = z * z / params.a
    G = zpow / (z * z)
    F_paper = z ** (4.0 / 3.0) * zpow
    F_cons = z**4 * zpow
    F = F_paper if params.f_variant == "paper" else F_cons
    return EFG(E, F, G, F_paper, F_cons)


def theorem_rhs(U_l1, params):
    """C (E |U|_1 + F^{1/3} |U|_1^{2/3} + G)."""
    if U_l1 < 0:
        raise ValueError(f"L1 mass must be nonnegative, got {U_l1}")
    e = efg(params)
    return params.C * (e.E * U_l1 + e.F ** (1.0 / 3.0) * U_l1 ** (2.0 / 3.0) + e.G)


def l1_bound(mes_X, params):
    """L^1 bound on a set of measure mes_X (the sign test function has |U|_1 = mes_X)."""
    return theorem_rhs(mes_X, params)


# breakpoints of the a-priori density bound, as exponents of Z: a = Z**(-k)
_OMEGA_BREAKS = (8.0 / 9.0, 7.0 / 9.0, 1.0 / 3.0, 5.0 / 18.0)


def omega_apriori(a, Z):
    """Pointwise a-priori bound on the density at distance ~a from a nucleus."""
    if not a > 0:
        raise ValueError(f"a must be positive, got {a}")
    if Z < 1:
        raise ValueError(f"Z must be >= 1, got {Z}")
    b1, b2, b3, b4 = (Z**-k for k in _OMEGA_BREAKS)
    if a <= b1:
        return Z**3
    if a <= b2:
        return Z ** (19.0 / 9.0) / a
    if a <= b3:
        return Z ** (197.0 / 90.0) * a ** (-9.0 / 10.0)
    if a <= b4:
        return Z ** (17.0 / 9.0) * a ** (-9.0 / 5.0)
    return Z ** (19.0 / 9.0) / a


def omega_breakpoints(Z):
    return tuple(Z**-k for k in _OMEGA_BREAKS)


def omega_branches(a, Z):
    """All five branch formulas at ``a``, for continuity checks."""
    return (
        Z**3,
        Z ** (19.0 / 9.0) / a,
        Z ** (197.0 / 90.0) * a ** (-9.0 / 10.0),
        Z ** (17.0 / 9.0) * a ** (-9.0 / 5.0),
        Z ** (19.0 / 9.0) / a,
    )


@dataclass(frozen=True)
class JpState:
    p: int
    values: tuple
    bound: float = None
    omega_ok: bool = True


def jp_recurrence(p, omega, mes_X, params, E=None, F=None, G=None):
    """Iterate J_k = E J_{k-1}/omega + (F/omega^2)^{1/3} J_{k-1}^{2/3} + G from J_0 = omega mes_X.

    Returns all J_0..J_p and, for p >= 1, the L^p bound C omega^{1-1/p} J_p^{1/p}.
    E, F, G default to ``efg(params)``; passing them explicitly overrides.
    """
    if int(p) != p or p < 0:
        raise ValueError(f"p must be a nonnegative integer, got {p}")
    e = efg(params)
    E = e.E if E is None else E
    F = e.F if F is None else F
    G = e.G if G is None else G
    omega_ok = omega >= params.Z**1.5 * params.a**-1.5
    J = [omega * mes_X]
    # evaluated in the written order so J_1 is reproducible term by term
    cE = omega**-1 * E
    cF = (omega**-2 * F) ** (1.0 / 3.0)
    for _ in range(int(p)):
        prev = J[-1]
        J.append(cE * prev + cF * prev ** (2.0 / 3.0) + G)
    if p == 0:
        return JpState(0, tuple(J), None, omega_ok)
    bound = params.C * omega ** (1.0 - 1.0 / p) * J[-1] ** (1.0 / p)
    return JpState(int(p), tuple(J), bound, omega_ok)


@dataclass(frozen=True)
class VarsigmaReport:
    varsigma_numeric: float
    min_numeric: float
    varsigma_closed: float
    min_closed: float
    clamped: bool
    ratio_paper: float
    ratio_consistent: float
    extra: dict = field(default_factory=dict)


def varsigma_objective(s, U_l1, params):
    """C U (s^{1/2} zeta^3 + zeta^2/a) + zeta^{-2} Z^{5/3-delta} / s."""
    z = params.zeta
    g0 = params.Z ** (5.0 / 3.0 - params.delta) / (z * z)
    return params.C * U_l1 * (math.sqrt(s) * z**3 + z * z / params.a) + g0 / s


def varsigma_stationary(U_l1, params):
    """Interior stationary point (2 zeta^{-5} Z^{5/3-delta} / (C U))^{2/3}."""
    z = params.zeta
    return (2.0 * z**-5 * params.Z ** (5.0 / 3.0 - params.delta) / (params.C * U_l1)) ** (2.0 / 3.0)


def varsigma_min(U_l1, params, rtol=1e-9):
    """Minimize the pre-optimization bound over varsigma in (0, eps].

    The objective is convex in log(varsigma), so a bounded scalar search in
    log-space is unimodal. The closed-form stationary point (clamped to eps)
    is returned alongside for cross-checking.
    """
    if not U_l1 > 0:
        raise ValueError(f"U_l1 must be positive, got {U_l1}")
    s_star = varsigma_stationary(U_l1, params)
    clamped = s_star >= params.eps
    s_closed = min(s_star, params.eps)
    g_closed = varsigma_objective(s_closed, U_l1, params)

    def obj(t):
        return varsigma_objective(math.exp(t), U_l1, params)

    hi = math.log(params.eps)
    lo = min(hi, math.log(s_star)) - 40.0
    res = minimize_scalar(obj, bounds=(lo, hi), method="bounded", options={"xatol": rtol * 1e-3})
    s_num, g_num = math.exp(res.x), float(res.fun)
    # the bounded search never evaluates the endpoint itself
    g_end = obj(hi)
    if g_end <= g_num:
        s_num, g_num = params.eps, g_end
    r_paper = theorem_rhs(U_l1, params.replace(f_variant="paper")) / g_num
    r_cons = theorem_rhs(U_l1, params.replace(f_variant="consistent")) / g_num
    return VarsigmaReport(s_num, g_num, s_closed, g_closed, clamped, r_paper, r_cons)


def envelope_record(a, Z, delta=0.0, eps=1.0, C=1.0, f_variant="paper", U_l1=None, mes=None):
    """Every envelope quantity at (a, Z) as a JSON-ready dict."""
    params = EnvelopeParams(a, Z, delta, eps, C, f_variant)
    e = efg(params)
    h, ok = h_semiclassical(a, Z, eps)
    if not ok:
        warnings.warn(f"a={a} outside [eps/Z, eps] = [{eps / Z}, {eps}]", stacklevel=2)
    U = U_l1 if U_l1 is not None else (mes if mes is not None else 4.0 * math.pi / 3.0 * 7.0 * a**3)
    rec = {
        "inputs": {"a": a, "Z": Z, "delta": delta, "eps": eps, "C": C, "f_variant": f_variant,
                   "U_l1": U, "mes": mes},
        "window": "ok" if ok else "violated",
        "zeta": params.zeta,
        "E": e.E,
        "F_paper": e.F_paper,
        "F_consistent": e.F_consistent,
        "G": e.G,
        "rhs": theorem_rhs(U, params),
        "h": h,
        "omega": omega_apriori(a, Z) if Z >= 1 else None,
    }
    if mes is not None:
        rec["l1_bound"] = l1_bound(mes, params)
    if U > 0:
        rep = varsigma_min(U, params)
        rec["varsigma"] = {
            "numeric": rep.varsigma_numeric,
            "min_numeric": rep.min_numeric,
            "closed_form": rep.varsigma_closed,
            "min_closed_form": rep.min_closed,
            "clamped": rep.clamped,
            "ratio_paper": rep.ratio_paper,
            "ratio_consistent": rep.ratio_consistent,
        }
    return rec
