"""Warped products dt^2 + (eps f(t))^2 g_sphere with density p(t)^q.

Built on a model density J = J0^m, the choice f = c_J J0, p = J0 makes the
radial generalized Ricci curvature equal to rho identically, while the
spherical directions pick up a (n-2)/(eps f)^2 term that dominates as eps -> 0.
The slab {t < t0} then has boundary measure given by the half-line profile of
f^(n-1) p^q, which is proportional to J.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .model_density import ModelParams, SupportInterval, root_and_slope, support_j
from .profile1d import Density1D, profile_flat

# A warp maps t to (value, first derivative, second derivative).
Warp = Callable[[np.ndarray], tuple]


def constant_warp(c: float) -> Warp:
    return lambda t: (c * np.ones_like(t), np.zeros_like(t), np.zeros_like(t))


@dataclass(frozen=True)
class WarpedProduct:
    n: int
    q: float
    eps: float
    a: float
    b: float
    f: Warp
    p: Warp
    base: Optional[ModelParams] = None

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("n must be at least 3")
        if not 0 < self.q < math.inf:
            raise ValueError("q must lie in (0, inf)")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if not -self.a < self.b:
            raise ValueError("need -a < b")

    @classmethod
    def canonical(cls, rho: float, n: int, q: float, H: float, a: float, b: float,
                  eps: float, c_j: float = 1.0) -> "WarpedProduct":
        """f = c_J J0, p = J0 with J0 = J_{H,rho,n+q-1}^(1/(n+q-1)).

        The interval is clipped to the support of J, so a window reaching past
        a root of J is replaced by the part where J > 0.
        """
        m = n + q - 1
        base = ModelParams(H, rho, m)
        sup = support_j(base)
        a = min(a, -sup.lo)
        b = min(b, sup.hi)
        delta = rho / m

        def root(t):
            y, dy = root_and_slope(base, np.asarray(t, dtype=float))
            return y, dy, -delta * y

        def f(t):
            y, dy, d2y = root(t)
            return c_j * y, c_j * dy, c_j * d2y

        return cls(n, q, eps, a, b, f, root, base)

    @property
    def interval(self) -> SupportInterval:
        return SupportInterval(-self.a, self.b)

    def _check(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if np.any(t <= -self.a) or np.any(t >= self.b):
            raise ValueError(f"t must lie in the open interval ({-self.a}, {self.b})")
        return t


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def ricci_radial(wp: WarpedProduct, t):
    """-(n-1) f''/f - q p''/p."""
    t = wp._check(t)
    f, _, f2 = wp.f(t)
    p, _, p2 = wp.p(t)
    return _scalar(-(wp.n - 1) * f2 / f - wp.q * p2 / p)


def ricci_spherical(wp: WarpedProduct, t):
    """-f''/f + (n-2)(1 - eps^2 f'^2)/(eps^2 f^2) - q (f'/f)(p'/p)."""
    t = wp._check(t)
    f, f1, f2 = wp.f(t)
    p, p1, _ = wp.p(t)
    e2 = wp.eps**2
    return _scalar(-f2 / f + (wp.n - 2) * (1.0 - e2 * f1 * f1) / (e2 * f * f) - wp.q * (f1 / f) * (p1 / p))


def check_cdd(wp: WarpedProduct, rho: float, grid_points: int = 1000) -> float:
    """Worst margin of both curvature directions over rho, at cell midpoints of [-a, b]."""
    t = -wp.a + (np.arange(grid_points) + 0.5) * (wp.a + wp.b) / grid_points
    radial = ricci_radial(wp, t) - rho
    spherical = ricci_spherical(wp, t) - rho
    return float(min(np.min(radial), np.min(spherical)))


def slab_density(wp: WarpedProduct) -> Density1D:
    n, q = wp.n, wp.q

    def weight(t):
        t = np.asarray(t, dtype=float)
        f = wp.f(t)[0]
        p = wp.p(t)[0]
        return np.maximum(f, 0.0) ** (n - 1) * np.maximum(p, 0.0) ** q

    return Density1D(weight, wp.interval)


def slab_profile(wp: WarpedProduct, v: float) -> float:
    """Half-line profile of f^(n-1) p^q on [-a, b] (boundary measure of slabs)."""
    if not 0.0 < v < 1.0:
        raise ValueError("v must lie in (0, 1)")
    return profile_flat(slab_density(wp), v)
