"""Isoperimetric lower bound under CDD(rho, n+q, D).

For finite D the bound is

    inf_H 1 / integral_{-a_H}^{D-a_H} J_{H,rho,m}(t) dt,    m = n+q-1,

where the window position a_H is fixed by the balance condition
(1-v) * mass(J on [-a_H, 0]) = v * mass(J on [0, D-a_H]). For D = inf and
rho > 0 the window is the whole support and H itself is fixed by the
analogous full-line balance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from ._minimize import golden_section, local_minima, scan_minimize
from .model_density import INF, ModelParams, SupportInterval, eval_j, log_eval_j, support_j
from .profile1d import Density1D, gaussian_profile, profile_flat
from .quadrature import DEFAULT_ABS_TOL, DEFAULT_REL_TOL, CumulativeTable, integrate

SCAN_POINTS = 129
MAX_DOUBLINGS = 60
GROWTH_FACTOR = 10.0
H_TOL = 1e-8
# log J above this is treated as unbounded mass; exp(600) is still a finite double
LOG_CUT = 600.0
HUGE = 1e300


class InvalidParameterError(ValueError):
    """Parameters outside the range where the bound is defined (e.g. m <= 0)."""


class NumericalFailure(RuntimeError):
    """A search or root-find failed to converge."""


class CaseId(Enum):
    CASE1 = 1
    CASE2 = 2
    CASE3 = 3
    CASE4 = 4
    CASE5 = 5
    CASE6 = 6
    CASE7 = 7
    TRIVIAL = "trivial"


@dataclass(frozen=True)
class CDDParams:
    """Curvature lower bound rho, dimension n+q and diameter D (q and D may be inf)."""

    rho: float
    n: int
    q: float
    D: float

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InvalidParameterError(f"n must be an integer >= 1, got {self.n!r}")
        if not math.isfinite(self.rho):
            raise InvalidParameterError(f"rho must be finite, got {self.rho!r}")
        if math.isnan(self.q) or self.q < 0:
            raise InvalidParameterError(f"q must lie in [0, inf], got {self.q!r}")
        if math.isnan(self.D) or self.D <= 0:
            raise InvalidParameterError(f"D must be positive (or inf), got {self.D!r}")
        if not self.m > 0:
            raise InvalidParameterError("m = n+q-1 must be positive (n >= 2, or n = 1 with q > 0)")

    @property
    def m(self) -> float:
        return self.n + self.q - 1

    @property
    def delta(self) -> float:
        if math.isinf(self.m):
            raise ValueError("delta is undefined for q = inf")
        return self.rho / self.m

    def model(self, H: float) -> ModelParams:
        return ModelParams(H, self.rho, self.m)

    def scaled(self, lam: float) -> "CDDParams":
        """Parameters of the metric scaled by lam^2: (rho/lam^2, n, q, lam*D)."""
        return CDDParams(self.rho / lam**2, self.n, self.q, self.D * lam)


@dataclass(frozen=True)
class BoundResult:
    """Bound value with its witness; h_star and a_star are nan when no witness exists."""

    value: float
    h_star: float
    a_star: float
    case_id: CaseId


def bonnet_myers_diameter(rho: float, n: int, q: float) -> float:
    """pi / sqrt(delta), the largest diameter allowed by positive curvature."""
    m = n + q - 1
    if not rho > 0 or math.isinf(q) or not m > 0:
        raise ValueError("need rho > 0, q < inf and n+q-1 > 0")
    return math.pi / math.sqrt(rho / m)


def case_dispatch(cdd: CDDParams) -> CaseId:
    rho, D = cdd.rho, cdd.D
    if math.isinf(D) and rho <= 0:
        return CaseId.TRIVIAL
    if math.isinf(cdd.q):
        if rho == 0:
            return CaseId.CASE7
        return CaseId.CASE6 if math.isinf(D) else CaseId.CASE5
    if rho > 0:
        return CaseId.CASE1 if D < bonnet_myers_diameter(rho, cdd.n, cdd.q) else CaseId.CASE2
    return CaseId.CASE3 if rho == 0 else CaseId.CASE4


# --- window masses -----------------------------------------------------------

class _Side:
    """Mass of J on [0, s] (or on [-s, 0] when mirrored), for 0 <= s <= reach."""

    def __init__(self, params: ModelParams, sign: float, reach: float, rel_tol: float):
        self.sign = sign
        f = lambda s: eval_j(params, sign * np.asarray(s))
        logf = lambda s: log_eval_j(params, sign * np.asarray(s))
        self.cut = INF
        end = reach
        if reach > 0:
            grid = np.linspace(0.0, reach, 257)
            above = np.nonzero(logf(grid) > LOG_CUT)[0]
            if above.size:
                i = int(above[0])
                self.cut = brentq(lambda s: logf(s) - LOG_CUT, grid[i - 1], grid[i], xtol=1e-15 * reach)
                end = self.cut
        self.end = end
        self.table = CumulativeTable(f, 0.0, end, rel_tol, DEFAULT_ABS_TOL) if end > 0 else None
        self.total = self.table.total if self.table is not None else 0.0

    def masses(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        if self.table is not None:
            out = self.table.evaluate(np.clip(s, 0.0, self.end))
            out = np.where(s >= self.end, self.total, np.where(s <= 0.0, 0.0, out))
        return np.where(s > self.cut, HUGE, out)

    def mass(self, s: float) -> float:
        if s > self.cut:
            return HUGE
        if s >= self.end:
            return self.total
        if s <= 0.0:
            return 0.0
        return self.table(s)


class _Window:
    """Left and right mass tables of J for windows [-a, D-a] with 0 <= a <= D."""

    def __init__(self, params: ModelParams, D: float, rel_tol: float = DEFAULT_REL_TOL):
        sup = support_j(params)
        self.D = D
        self.left = _Side(params, -1.0, min(D, -sup.lo), rel_tol)
        self.right = _Side(params, 1.0, min(D, sup.hi), rel_tol)

    def balance(self, v: float) -> tuple[float, float, float]:
        """(a, left mass, right mass) solving (1-v) L(a) = v R(D-a)."""
        D = self.D
        left_full = self.left.mass(D)
        right_full = self.right.mass(D)
        if left_full <= 0.0:
            raise ValueError("left side of the window carries no mass")
        if right_full <= 0.0:
            raise ValueError("right side of the window carries no mass")
        if self.left.cut < D and self.right.cut < D:
            raise NumericalFailure("window mass overflows on both sides")
        g = lambda a: (1.0 - v) * self.left.mass(a) - v * self.right.mass(D - a)
        a = brentq(g, 0.0, D, xtol=1e-14 * D, maxiter=200)
        return a, self.left.mass(a), self.right.mass(D - a)


def _scale(cdd: CDDParams) -> float:
    """Natural size of the H range for these parameters."""
    rho, m, D = cdd.rho, cdd.m, cdd.D
    if math.isinf(m):
        terms = [math.sqrt(abs(rho)), 1.0]
        if math.isfinite(D):
            terms += [abs(rho) * D, 1.0 / D]
        return max(terms)
    terms = [math.sqrt(abs(rho) * m), 1.0]
    if math.isfinite(D):
        terms.append(m / D)
    return max(terms)


def solve_balance(params: ModelParams, D: float, v: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """Window position a in [0, D] with (1-v) * mass[-a, 0] = v * mass[0, D-a]."""
    if not (0.0 < v < 1.0):
        raise ValueError("v must lie in (0, 1)")
    if not (0.0 < D < INF):
        raise ValueError("D must be finite and positive")
    return _Window(params, D, rel_tol).balance(v)[0]


def balanced_objective(cdd: CDDParams, H: float, v: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """1 / mass of J_H on its balanced window (inf when the window is degenerate)."""
    try:
        _, L, R = _Window(cdd.model(H), cdd.D, rel_tol).balance(v)
    except ValueError:
        return INF
    return 1.0 / (L + R)


def _minimize_h(f: Callable[[float], float], scale: float) -> tuple[float, float]:
    lo, hi = -scale, scale
    xs = np.linspace(lo, hi, SCAN_POINTS)
    fs = [f(float(x)) for x in xs]
    fmin = min(fs)
    if not math.isfinite(fmin):
        raise NumericalFailure("objective is infinite on the whole initial bracket")
    f_lo, f_hi = fs[0], fs[-1]
    grown = [0, 0]
    while f_lo < GROWTH_FACTOR * fmin or f_hi < GROWTH_FACTOR * fmin:
        if f_lo < GROWTH_FACTOR * fmin:
            grown[0] += 1
            lo *= 2.0
            f_lo = f(lo)
            fmin = min(fmin, f_lo)
        if f_hi < GROWTH_FACTOR * fmin:
            grown[1] += 1
            hi *= 2.0
            f_hi = f(hi)
            fmin = min(fmin, f_hi)
        if max(grown) > MAX_DOUBLINGS:
            raise NumericalFailure(f"H bracket still growing after {MAX_DOUBLINGS} doublings")
    if any(grown):
        xs = np.linspace(lo, hi, SCAN_POINTS)
        fs = [f(float(x)) for x in xs]
    h, val, _ = scan_minimize(f, xs, H_TOL * scale)
    if not lo < h < hi:
        raise NumericalFailure("minimizing H landed on the bracket boundary")
    return h, val


def _full_line(cdd: CDDParams, v: float, rel_tol: float) -> BoundResult:
    """D = inf, rho > 0: H_v balances the masses on either side of 0."""

    def masses(H):
        p = cdd.model(H)
        sup = support_j(p)
        f = lambda t: eval_j(p, t)
        L = integrate(f, sup.lo, 0.0, rel_tol).value if sup.lo < 0 else 0.0
        R = integrate(f, 0.0, sup.hi, rel_tol).value if sup.hi > 0 else 0.0
        return L, R

    def psi(H):
        L, R = masses(H)
        if L <= 0.0:
            return -INF
        if R <= 0.0:
            return INF
        return math.log((1.0 - v) * L) - math.log(v * R)

    scale = _scale(cdd)
    lo, hi = -scale, scale
    for _ in range(MAX_DOUBLINGS):
        if psi(lo) > 0 and psi(hi) < 0:
            break
        lo, hi = 2 * lo, 2 * hi
    else:
        raise NumericalFailure("no sign change for the full-line balance")
    h = brentq(psi, lo, hi, xtol=1e-13 * scale, rtol=4 * np.finfo(float).eps, maxiter=300)
    L, R = masses(h)
    return BoundResult(1.0 / (L + R), h, INF, case_dispatch(cdd))


def bound_at(cdd: CDDParams, v: float, rel_tol: float = DEFAULT_REL_TOL) -> BoundResult:
    """Sharp lower bound on the isoperimetric profile at v with its minimizing (H, a)."""
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"v must lie in [0, 1], got {v}")
    case = case_dispatch(cdd)
    if case is CaseId.TRIVIAL or v in (0.0, 1.0):
        return BoundResult(0.0, math.nan, math.nan, case)
    if math.isinf(cdd.D):
        return _full_line(cdd, v, rel_tol)
    h, val = _minimize_h(lambda H: balanced_objective(cdd, H, v, rel_tol), _scale(cdd))
    a, L, R = _Window(cdd.model(h), cdd.D, rel_tol).balance(v)
    return BoundResult(1.0 / (L + R), h, a, case)


# --- grid oracle -------------------------------------------------------------

def _oracle_row(cdd: CDDParams, v: float, H: float, a_grid: int, a_levels: int,
                rel_tol: float) -> float:
    """Grid minimum over a of the two-ratio objective for one H, zooming in a."""
    D = cdd.D
    w = _Window(cdd.model(H), D, rel_tol)
    lo, hi = 0.0, D
    best = INF
    for _ in range(a_levels + 1):
        a = np.linspace(lo, hi, a_grid)
        L = w.left.masses(a)
        R = w.right.masses(D - a)
        with np.errstate(divide="ignore"):
            vals = np.maximum(np.where(L > 0, v / L, INF), np.where(R > 0, (1.0 - v) / R, INF))
        j = int(np.argmin(vals))
        best = min(best, float(vals[j]))
        da = a[1] - a[0]
        lo, hi = max(a[j] - 2 * da, 0.0), min(a[j] + 2 * da, D)
    return best


def bound_oracle_grid(cdd: CDDParams, v: float, h_grid: int = 64, a_grid: int = 64,
                      refinements: int = 4, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """Grid minimum over (H, a) of max(v / mass[-a, 0], (1-v) / mass[0, D-a]).

    Every grid value is an upper bound on the infimum. For each H row the
    a-grid over [0, D] is re-centred ``refinements`` times on its best cell
    (the objective is unimodal in a); the H-grid is then re-centred
    ``refinements`` times on +-3 cells around its best row.
    """
    if math.isinf(cdd.D):
        raise ValueError("the grid oracle needs a finite D")
    if h_grid < 64 or a_grid < 64:
        raise ValueError("grids need at least 64 points")
    if v in (0.0, 1.0):
        return 0.0
    scale = _scale(cdd)
    row = lambda H: _oracle_row(cdd, v, float(H), a_grid, refinements, rel_tol)
    h_lo, h_hi = -4.0 * scale, 4.0 * scale
    for _ in range(MAX_DOUBLINGS):
        hs = np.linspace(h_lo, h_hi, h_grid)
        vals = np.array([row(H) for H in hs])
        i = int(np.argmin(vals))
        if 0 < i < h_grid - 1:
            break
        h_lo, h_hi = (2 * h_lo, h_hi) if i == 0 else (h_lo, 2 * h_hi)
    else:
        raise NumericalFailure("oracle H range did not capture the minimum")
    best = float(vals[i])
    for _ in range(refinements):
        dh = hs[1] - hs[0]
        hs = np.linspace(hs[i] - 3 * dh, hs[i] + 3 * dh, h_grid)
        vals = np.array([row(H) for H in hs])
        i = int(np.argmin(vals))
        best = min(best, float(vals[i]))
    return best


# --- closed forms --------------------------------------------------------------

def _min_over_unit(g: Callable[[float], float], points: int = 1025) -> float:
    xs = np.linspace(0.0, 1.0, points)
    return scan_minimize(g, xs, 1e-12)[1]


def case3_closed_form(n: int, q: float, D: float, v: float) -> float:
    """(k/D) inf_{xi >= 0} (lo (xi+1)^k + hi xi^k)^((k-1)/k) / ((xi+1)^k - xi^k), k = n+q.

    Written in r = xi/(xi+1) in [0, 1], where the objective is bounded and
    tends to 1/D as r -> 1.
    """
    k = n + q
    if math.isinf(q) or not k > 1 or not 0 < D < INF:
        raise ValueError("need q < inf, n+q > 1 and finite D > 0")
    lo, hi = min(v, 1.0 - v), max(v, 1.0 - v)

    def g(r):
        if r >= 1.0:
            return 1.0 / D
        if r <= 0.0:
            return (k / D) * lo ** ((k - 1) / k)
        one_minus = -math.expm1(k * math.log(r))
        return (k / D) * (1.0 - r) * (lo + hi * r**k) ** ((k - 1) / k) / one_minus

    return _min_over_unit(g)


def case7_closed_form(D: float, v: float) -> float:
    """(1/D) inf_{w > 0} (min(v, 1-v) + w) log(1 + 1/w)."""
    if not 0 < D < INF:
        raise ValueError("D must be finite and positive")
    lo = min(v, 1.0 - v)
    if lo <= 0.0:
        return 0.0
    g = lambda s: (lo + math.exp(s)) * math.log1p(math.exp(-s))
    _, val, _ = scan_minimize(g, np.linspace(-14.0, 14.0, 1025), 1e-10)
    return min(val, 1.0) / D


# --- per-case family evaluation -------------------------------------------------

def _log_density(logf: Callable, lo: float, hi: float) -> Density1D:
    """exp(logf) on [lo, hi], normalised by its largest sampled value."""
    with np.errstate(divide="ignore"):
        ref = float(np.max(logf(np.linspace(lo, hi, 65))))

    def f(t):
        with np.errstate(divide="ignore"):
            return np.exp(logf(np.asarray(t, dtype=float)) - ref)

    return Density1D(f, SupportInterval(lo, hi))


def _family_inf(profile: Callable[[float], float], lo: float, hi: float, tol: float,
                points: int = 65) -> float:
    """inf of ``profile`` over [lo, hi], extending hi while the best point sits on it."""
    for _ in range(20):
        xs = np.linspace(lo, hi, points)
        fs = [profile(float(x)) for x in xs]
        if local_minima(fs)[0] != points - 1:
            break
        lo, hi = float(xs[-2]), hi + 2 * (hi - lo)
    best = INF
    for i in local_minima(fs)[:3]:
        a = float(xs[max(i - 1, 0)])
        b = float(xs[min(i + 1, points - 1)])
        best = min(best, golden_section(profile, a, b, tol)[1])
    return best


def case_family_bound(cdd: CDDParams, v: float) -> float:
    """The bound evaluated directly on the reduced one-parameter family of each case.

    Each case is an infimum of half-line profiles of a fixed shape (sin, power,
    sinh, cosh, exp, Gaussian) over windows [xi, xi+D], computed with
    profile_flat. Independent of the balance solver.
    """
    case = case_dispatch(cdd)
    if case is CaseId.TRIVIAL or v in (0.0, 1.0):
        return 0.0
    rho, m, D = cdd.rho, cdd.m, cdd.D
    if case is CaseId.CASE6:
        return gaussian_profile(rho, v)
    if case in (CaseId.CASE1, CaseId.CASE2):
        k = math.sqrt(rho / m)
        logf = lambda t: m * np.log(np.maximum(np.sin(k * t), 0.0))
        length = math.pi / k
        if case is CaseId.CASE2:
            return profile_flat(_log_density(logf, 0.0, length), v)
        slack = length - D
        prof = lambda xi: profile_flat(_log_density(logf, xi, xi + D), v)
        # sin is symmetric about length/2, so windows with xi > slack/2 repeat
        xs = np.linspace(0.0, slack / 2, 65)
        return scan_minimize(prof, xs, 1e-9 * length)[1]
    if case is CaseId.CASE7:
        prof = lambda s: profile_flat(_log_density(lambda t: (math.exp(s) / D) * t, 0.0, D), v)
        return min(1.0 / D, _family_inf(prof, -8.0, 6.0, 1e-9))
    if case is CaseId.CASE3:
        # xi = D r / (1 - r); r -> 1 recovers the uniform density
        def prof(r):
            xi = D * r / (1.0 - r)
            return profile_flat(_log_density(lambda t: m * np.log(t), xi, xi + D), v)
        return min(1.0 / D, scan_minimize(prof, np.linspace(0.0, 0.999, 129), 1e-10)[1])
    if case is CaseId.CASE5:
        logf = lambda t: -0.5 * rho * t * t
        prof = lambda xi: profile_flat(_log_density(logf, xi, xi + D), v)
        # reflection t -> -t maps xi to -xi-D and v to 1-v, which leaves profile_flat unchanged
        width = D + 1.0 / math.sqrt(abs(rho))
        return _family_inf(prof, -D / 2, -D / 2 + 4 * width, 1e-9 * width)
    # case 4
    k = math.sqrt(-rho / m)
    exp_value = profile_flat(_log_density(lambda t: k * m * t, 0.0, D), v)
    xi_max = 20.0 / k

    def sinh_prof(r):
        xi = xi_max * r
        return profile_flat(_log_density(lambda t: m * np.log(np.sinh(k * t)), xi, xi + D), v)

    def cosh_prof(xi):
        lc = lambda t: m * (np.abs(k * t) + np.log1p(np.exp(-2 * np.abs(k * t))))
        return profile_flat(_log_density(lc, xi, xi + D), v)

    sinh_value = scan_minimize(sinh_prof, np.linspace(0.0, 1.0, 129), 1e-10)[1]
    cosh_value = scan_minimize(cosh_prof, np.linspace(-D / 2, xi_max, 129), 1e-9 * xi_max)[1]
    return min(exp_value, sinh_value, cosh_value)
