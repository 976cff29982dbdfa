"""Model Jacobian densities J_{H,rho,m}.

For 0 < m < inf, J = (c_delta(t) + (H/m) s_delta(t))_+^m with delta = rho/m,
cut off at the first roots on either side of the origin. For m = inf,
J = exp(H t - rho t^2 / 2). J solves

    -(log J)'' - ((log J)')^2 / m = rho,   J(0) = 1,  J'(0) = H.

Infinite values of m and of support endpoints are carried as ``math.inf``;
every code path branches on them before doing arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

INF = math.inf
# |delta| below this (times max(1, H^2/m^2)) is evaluated on the rho = 0 branch
FLAT_DELTA = 1e-12
_LOG2 = math.log(2.0)


class DegenerateRegimeError(ValueError):
    """The m = 0 indicator densities carry no mass and have no support interval."""


@dataclass(frozen=True)
class SupportInterval:
    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi) or self.lo > self.hi:
            raise ValueError(f"invalid support [{self.lo}, {self.hi}]")

    @property
    def is_finite(self) -> bool:
        return not (math.isinf(self.lo) or math.isinf(self.hi))

    @property
    def length(self) -> float:
        return INF if not self.is_finite else self.hi - self.lo

    def contains(self, t: float) -> bool:
        return self.lo <= t <= self.hi

    def intersect(self, lo: float, hi: float) -> "SupportInterval":
        return SupportInterval(max(self.lo, lo), min(self.hi, hi))


@dataclass(frozen=True)
class ModelParams:
    H: float
    rho: float
    m: float

    def __post_init__(self):
        if math.isnan(self.m) or self.m < 0:
            raise ValueError(f"m must lie in [0, inf], got {self.m}")
        if not (math.isfinite(self.H) and math.isfinite(self.rho)):
            raise ValueError("H and rho must be finite")

    @property
    def is_gaussian(self) -> bool:
        return math.isinf(self.m)

    @property
    def delta(self) -> float:
        if self.m == 0 or math.isinf(self.m):
            raise ValueError("delta = rho/m is only defined for 0 < m < inf")
        return self.rho / self.m

    @cached_property
    def _branch(self) -> tuple:
        """Regime tag plus the constants its formulas need."""
        if self.m == 0:
            return ("indicator",)
        if math.isinf(self.m):
            return ("gauss",)
        m, H = self.m, self.H
        delta = self.rho / m
        if abs(delta) < FLAT_DELTA * max(1.0, H * H / (m * m)):
            return ("flat", H / m)
        k = math.sqrt(abs(delta))
        beta = H / (m * k)
        if delta > 0:
            # cos + beta sin = sin(alpha + k t) / sin(alpha), alpha = arccot(beta)
            return ("trig", k, math.pi / 2 - math.atan(beta))
        if beta == 1.0:
            return ("exp", k, 1.0)
        if beta == -1.0:
            return ("exp", k, -1.0)
        if abs(beta) > 1.0:
            # cosh + beta sinh = sinh(alpha + k t) / sinh(alpha), alpha = arcoth(beta)
            return ("sinh", k, math.atanh(1.0 / beta))
        # cosh + beta sinh = cosh(alpha + k t) / cosh(alpha), alpha = artanh(beta)
        return ("cosh", k, math.atanh(beta))


def _log_sinh(y):
    y = np.asarray(y, dtype=float)
    with np.errstate(over="ignore"):
        small = np.log(np.sinh(np.minimum(y, 30.0)))
    return np.where(y < 30.0, small, y - _LOG2 + np.log1p(-np.exp(-2.0 * np.maximum(y, 30.0))))


def _log_cosh(y):
    a = np.abs(np.asarray(y, dtype=float))
    return a - _LOG2 + np.log1p(np.exp(-2.0 * a))


def support_j(params: ModelParams) -> SupportInterval:
    """Closed support [xi_-, xi_+] of J (endpoints may be infinite)."""
    br = params._branch
    kind = br[0]
    if kind == "indicator":
        raise DegenerateRegimeError("m = 0: J is an indicator and has no support interval")
    if kind in ("gauss", "exp", "cosh"):
        return SupportInterval(-INF, INF)
    if kind == "flat":
        slope = br[1]
        if slope > 0:
            return SupportInterval(-1.0 / slope, INF)
        if slope < 0:
            return SupportInterval(-INF, -1.0 / slope)
        return SupportInterval(-INF, INF)
    if kind == "trig":
        _, k, alpha = br
        return SupportInterval(-alpha / k, (math.pi - alpha) / k)
    _, k, alpha = br  # sinh form: single root at -alpha/k
    if alpha > 0:
        return SupportInterval(-alpha / k, INF)
    return SupportInterval(-INF, -alpha / k)


def log_eval_j(params: ModelParams, t):
    """log J(t); -inf outside the support. Vectorized over ``t`` (m > 0 only)."""
    br = params._branch
    kind = br[0]
    t_arr = np.asarray(t, dtype=float)
    if kind == "indicator":
        raise DegenerateRegimeError("log J is undefined for m = 0")
    if kind == "gauss":
        out = params.H * t_arr - 0.5 * params.rho * t_arr * t_arr
    else:
        m = params.m
        with np.errstate(divide="ignore", invalid="ignore"):
            if kind == "flat":
                x = br[1] * t_arr
                inside = x > -1.0
                logbase = np.log1p(np.where(inside, x, 0.0))
            elif kind == "trig":
                _, k, alpha = br
                x = alpha + k * t_arr
                inside = (x > 0.0) & (x < math.pi)
                logbase = np.log(np.sin(np.where(inside, x, 1.0))) - math.log(math.sin(alpha))
            elif kind == "exp":
                _, k, sign = br
                inside = np.ones_like(t_arr, dtype=bool)
                logbase = sign * k * t_arr
            elif kind == "cosh":
                _, k, alpha = br
                inside = np.ones_like(t_arr, dtype=bool)
                logbase = _log_cosh(alpha + k * t_arr) - float(_log_cosh(alpha))
            else:
                _, k, alpha = br
                s = math.copysign(1.0, alpha)
                x = s * (alpha + k * t_arr)
                inside = x > 0.0
                logbase = _log_sinh(np.where(inside, x, 1.0)) - float(_log_sinh(abs(alpha)))
            out = np.where(inside, m * logbase, -np.inf)
    return float(out) if np.ndim(out) == 0 else out


def eval_j(params: ModelParams, t):
    """J_{H,rho,m}(t), vectorized over ``t``."""
    if params.m == 0:
        t_arr = np.asarray(t, dtype=float)
        if params.rho > 0:
            out = (t_arr == 0.0).astype(float)
        else:
            out = (params.H * t_arr >= 0.0).astype(float)
        return float(out) if np.ndim(out) == 0 else out
    with np.errstate(over="ignore"):
        out = np.exp(log_eval_j(params, t))
    return float(out) if np.ndim(out) == 0 else out


def root_and_slope(params: ModelParams, t):
    """J^{1/m} and its derivative for finite m > 0, valid inside the support.

    J^{1/m} solves y'' = -delta y, so its second derivative is -delta times
    the first returned value.
    """
    br = params._branch
    kind = br[0]
    t = np.asarray(t, dtype=float)
    if kind in ("indicator", "gauss"):
        raise ValueError("J^{1/m} needs 0 < m < inf")
    if kind == "flat":
        return 1.0 + br[1] * t, br[1] * np.ones_like(t)
    if kind == "trig":
        _, k, alpha = br
        sa = math.sin(alpha)
        return np.sin(alpha + k * t) / sa, k * np.cos(alpha + k * t) / sa
    if kind == "exp":
        _, k, sign = br
        y = np.exp(sign * k * t)
        return y, sign * k * y
    if kind == "cosh":
        _, k, alpha = br
        ca = math.cosh(alpha)
        return np.cosh(alpha + k * t) / ca, k * np.sinh(alpha + k * t) / ca
    _, k, alpha = br
    sa = math.sinh(alpha)
    return np.sinh(alpha + k * t) / sa, k * np.cosh(alpha + k * t) / sa


def log_derivative_j(params: ModelParams, t):
    """(log J)'(t) inside the support."""
    br = params._branch
    kind = br[0]
    t_arr = np.asarray(t, dtype=float)
    if kind == "indicator":
        raise DegenerateRegimeError("(log J)' is undefined for m = 0")
    if kind == "gauss":
        out = params.H - params.rho * t_arr
    elif kind == "flat":
        out = params.H / (1.0 + br[1] * t_arr)
    elif kind == "exp":
        out = params.m * br[2] * br[1] * np.ones_like(t_arr)
    else:
        _, k, alpha = br
        x = alpha + k * t_arr
        if kind == "trig":
            out = params.m * k / np.tan(x)
        elif kind == "cosh":
            out = params.m * k * np.tanh(x)
        else:
            out = params.m * k / np.tanh(x)
    return float(out) if np.ndim(out) == 0 else out


def check_ode_residual(params: ModelParams, t: float, h: float) -> float:
    """Central-difference estimate of -(log J)'' - ((log J)')^2/m - rho at t.

    The error is O(h^2) on the smooth branches. Raises ``ValueError`` if t is
    within 2h of a support endpoint.
    """
    if params.m == 0:
        raise DegenerateRegimeError("the ODE is only defined for m > 0")
    if h <= 0:
        raise ValueError("step must be positive")
    sup = support_j(params)
    if not (sup.lo + 2 * h < t < sup.hi - 2 * h):
        raise ValueError(f"t={t} is within 2h of the support [{sup.lo}, {sup.hi}]")
    lm, l0, lp = log_eval_j(params, np.array([t - h, t, t + h]))
    d1 = (lp - lm) / (2 * h)
    d2 = (lp - 2 * l0 + lm) / (h * h)
    gradient_term = 0.0 if params.is_gaussian else d1 * d1 / params.m
    return float(-d2 - gradient_term - params.rho)
