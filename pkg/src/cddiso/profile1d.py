"""One-dimensional isoperimetric profiles of weighted densities."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np
from scipy.special import erfcinv

from .model_density import (INF, ModelParams, SupportInterval, eval_j, log_derivative_j,
                            support_j)
from .quadrature import DEFAULT_ABS_TOL, DEFAULT_REL_TOL, CumulativeTable, cdf_inverse


class InfeasibleMassError(ValueError):
    """No grid-aligned union of intervals reaches the requested mass."""


@dataclass(frozen=True)
class Density1D:
    """A non-negative weight on a (possibly infinite) interval.

    ``evaluator`` must accept numpy arrays. It is masked to zero outside
    ``support`` when the density is called. ``total_mass`` may be given to
    skip integration (e.g. ``math.inf`` for a non-integrable weight).
    """

    evaluator: Callable
    support: SupportInterval
    smooth_log_derivative: Optional[Callable] = None
    mass: Optional[float] = None
    rel_tol: float = DEFAULT_REL_TOL
    abs_tol: float = DEFAULT_ABS_TOL
    name: str = field(default="", compare=False)

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        inside = (t_arr >= self.support.lo) & (t_arr <= self.support.hi)
        with np.errstate(over="ignore", invalid="ignore"):
            vals = np.where(inside, self.evaluator(np.where(inside, t_arr, self._anchor)), 0.0)
        return float(vals) if np.ndim(vals) == 0 else vals

    @property
    def _anchor(self) -> float:
        lo, hi = self.support.lo, self.support.hi
        if math.isinf(lo) and math.isinf(hi):
            return 0.0
        return hi if math.isinf(lo) else lo

    @cached_property
    def table(self) -> CumulativeTable:
        return CumulativeTable(self, self.support.lo, self.support.hi, self.rel_tol, self.abs_tol)

    @property
    def total_mass(self) -> float:
        if self.mass is not None:
            return self.mass
        if self.support.lo == self.support.hi:
            return 0.0
        return self.table.total

    def value_at(self, t: float) -> float:
        """Density value, with the limit 0 at an infinite endpoint."""
        if math.isinf(t):
            return 0.0
        return self(t)

    def restricted(self, lo: float, hi: float) -> "Density1D":
        return Density1D(self.evaluator, self.support.intersect(lo, hi),
                         self.smooth_log_derivative, None, self.rel_tol, self.abs_tol, self.name)

    def reflected(self) -> "Density1D":
        ev = self.evaluator
        dl = self.smooth_log_derivative
        return Density1D(lambda t: ev(-np.asarray(t)),
                         SupportInterval(-self.support.hi, -self.support.lo),
                         None if dl is None else (lambda t: -dl(-np.asarray(t))),
                         self.mass, self.rel_tol, self.abs_tol, self.name)

    @classmethod
    def model(cls, params: ModelParams, lo: float = -INF, hi: float = INF, **kw) -> "Density1D":
        """J_{H,rho,m} restricted to [lo, hi]."""
        sup = support_j(params).intersect(lo, hi)
        return cls(lambda t: eval_j(params, t), sup,
                   lambda t: log_derivative_j(params, t), name=f"J{params}", **kw)

    @classmethod
    def uniform(cls, lo: float, hi: float) -> "Density1D":
        return cls(lambda t: np.ones_like(np.asarray(t, dtype=float)), SupportInterval(lo, hi),
                   lambda t: np.zeros_like(np.asarray(t, dtype=float)), name="uniform")


def profile_flat(density: Density1D, v: float) -> float:
    """Half-line profile: the smaller boundary weight of the two half-lines of mass v."""
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"v must lie in [0, 1], got {v}")
    Z = density.total_mass
    if Z == 0.0:
        return INF
    if math.isinf(Z):
        return 0.0
    small = min(v, 1.0 - v) * Z
    t1 = cdf_inverse(density, small)
    t2 = cdf_inverse(density, Z - small)
    return min(density.value_at(t1), density.value_at(t2)) / Z


def profile_bruteforce(density: Density1D, v: float, max_intervals: int = 2,
                       grid_points: int = 2000) -> float:
    """Least boundary weight over unions of at most ``max_intervals`` grid-aligned intervals.

    The grid is placed at equal-mass quantiles, so every cell carries Z/N and
    the mass condition becomes an integer one: a union of c cells is accepted
    when |c - vN| <= 1 (one grid cell). Endpoints at the ends of the support
    are free; every other endpoint costs f(x)/Z. Solved exactly by dynamic
    programming over (grid node, intervals used, inside/outside, cells covered).
    """
    if max_intervals not in (1, 2, 3):
        raise ValueError("max_intervals must be 1, 2 or 3")
    if grid_points < 100:
        raise ValueError("grid_points must be at least 100")
    if not density.support.is_finite:
        raise ValueError("brute force needs a finite support")
    Z = density.total_mass
    N = grid_points
    nodes = np.array([cdf_inverse(density, Z * i / N) for i in range(N + 1)])
    cost = density(nodes) / Z
    cost[0] = cost[-1] = 0.0
    target = v * N
    lo_c = max(0, math.ceil(target - 1.0 - 1e-9))
    hi_c = min(N, math.floor(target + 1.0 + 1e-9))
    if lo_c > hi_c:
        raise InfeasibleMassError(f"achievable masses are [0, {Z}]; target {v * Z} is outside")

    k = max_intervals
    size = N + 1
    out = np.full((k + 1, size), INF)   # outside after closing j intervals, by cells covered
    inside = np.full((k + 1, size), INF)  # inside interval j
    out[0, 0] = 0.0
    best = INF
    for i in range(N + 1):
        c = cost[i]
        # boundary events at node i: close, then open
        closed = np.minimum(out[1:], inside[1:] + c)
        out[1:] = closed
        inside[1:] = np.minimum(inside[1:], out[:-1] + c)
        if lo_c <= hi_c:
            best = min(best, float(out[:, lo_c:hi_c + 1].min()))
        if i == N:
            break
        # advance across cell i: inside states cover one more cell
        inside[:, 1:] = inside[:, :-1]
        inside[:, 0] = INF
    if math.isinf(best):
        raise InfeasibleMassError(f"no union of <= {k} intervals has mass in "
                                  f"[{lo_c * Z / N}, {hi_c * Z / N}]")
    return best


def _h_step(density: Density1D) -> float:
    length = density.support.length
    return 1e-5 * max(1.0, length if math.isfinite(length) else 1.0)


def _log_derivatives(density: Density1D, t: np.ndarray):
    """First and second derivatives of log(density) at t via central differences."""
    sup = density.support
    if density.smooth_log_derivative is not None:
        h = _h_step(density)
        _require_inside(sup, t, h)
        d = density.smooth_log_derivative
        d1 = np.asarray(d(t), dtype=float)
        d2 = (np.asarray(d(t + h)) - np.asarray(d(t - h))) / (2 * h)
        return d1, d2
    # second differences of log f need a larger step to keep roundoff below truncation
    h = 1e-4 * max(1.0, sup.length if math.isfinite(sup.length) else 1.0)
    _require_inside(sup, t, h)
    lm = np.log(density(t - h))
    l0 = np.log(density(t))
    lp = np.log(density(t + h))
    return (lp - lm) / (2 * h), (lp - 2 * l0 + lm) / (h * h)


def _require_inside(sup: SupportInterval, t: np.ndarray, h: float) -> None:
    if np.any(t - h <= sup.lo) or np.any(t + h >= sup.hi):
        raise ValueError("grid point at or outside the support boundary")


def check_cdd_1d(density: Density1D, rho: float, q: float, grid) -> float:
    """Worst margin of -(log f)'' - ((log f)')^2/q - rho over ``grid``.

    A non-negative result certifies the one-dimensional curvature-dimension
    condition at the grid points.
    """
    t = np.atleast_1d(np.asarray(grid, dtype=float))
    d1, d2 = _log_derivatives(density, t)
    gradient = 0.0 if math.isinf(q) else d1 * d1 / q
    return float(np.min(-d2 - gradient - rho))


def domination_check(density: Density1D, rho: float, q: float, x: float, t: float,
                     tol: float = 1e-8) -> bool:
    """Whether f(x+t) <= f(x) J_{(log f)'(x), rho, q}(t), up to relative ``tol``."""
    if not q > 0:
        raise ValueError("q must be positive")
    lo, hi = min(x, x + t), max(x, x + t)
    xs = np.array([x])
    d1, _ = _log_derivatives(density, xs)
    sup = density.support
    if lo <= sup.lo or hi >= sup.hi:
        raise ValueError("[x, x+t] must lie inside the support")
    model = eval_j(ModelParams(float(d1[0]), rho, q), t)
    return bool(density(x + t) <= density(x) * model * (1.0 + tol))


def gaussian_profile(rho: float, v: float) -> float:
    """sqrt(rho) * phi(Phi^{-1}(v)): the half-line profile of N(0, 1/rho)."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"v must lie in [0, 1], got {v}")
    if v in (0.0, 1.0):
        return 0.0
    x = -math.sqrt(2.0) * float(erfcinv(2.0 * min(v, 1.0 - v)))
    return math.sqrt(rho) * math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def sphere_density(n: int, q: float, rho: float) -> Density1D:
    m = n + q - 1
    if m <= 0 or math.isinf(m) or rho <= 0:
        raise ValueError("need 0 < n+q-1 < inf and rho > 0")
    k = math.sqrt(rho / m)
    return Density1D(lambda t: np.sin(k * np.asarray(t)) ** m,
                     SupportInterval(0.0, math.pi / k),
                     lambda t: m * k / np.tan(k * np.asarray(t)), name="sphere")


def sphere_profile(n: int, q: float, rho: float, v: float) -> float:
    """Half-line profile of sin(sqrt(delta) t)^{n+q-1} on [0, pi/sqrt(delta)]."""
    return profile_flat(sphere_density(n, q, rho), v)
