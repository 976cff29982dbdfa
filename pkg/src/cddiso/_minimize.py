"""Scalar minimization: grid scan followed by golden-section refinement."""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f: Callable[[float], float], lo: float, hi: float, tol: float,
                   max_iter: int = 200) -> tuple[float, float]:
    """Best evaluated (x, f(x)) after shrinking [lo, hi] to width ``tol``.

    Ties between evaluated points go to the smaller x.
    """
    best = [(f(lo), lo), (f(hi), hi)]
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    best += [(f1, x1), (f2, x2)]
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = f(x1)
            best.append((f1, x1))
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = f(x2)
            best.append((f2, x2))
    fx, x = min(best)
    return x, fx


def local_minima(fs) -> list[int]:
    """Indices of discrete local minima of a scanned sequence, best first."""
    n = len(fs)
    idx = []
    for i in range(n):
        left = fs[i - 1] if i > 0 else math.inf
        right = fs[i + 1] if i < n - 1 else math.inf
        if fs[i] <= left and fs[i] <= right:
            idx.append(i)
    return sorted(idx, key=lambda i: (fs[i], i))


def scan_minimize(f: Callable[[float], float], xs, tol: float,
                  max_refinements: int = 3) -> tuple[float, float, list[float]]:
    """Minimize ``f`` over [xs[0], xs[-1]]: scan ``xs``, then golden-refine the best local minima.

    Returns (argmin, min, scanned values).
    """
    xs = np.asarray(xs, dtype=float)
    fs = [f(float(x)) for x in xs]
    n = len(xs)
    candidates = []
    for i in local_minima(fs)[:max_refinements]:
        a = float(xs[max(i - 1, 0)])
        b = float(xs[min(i + 1, n - 1)])
        candidates.append(golden_section(f, a, b, tol))
    x, fx = min(candidates, key=lambda c: (c[1], c[0]))
    return x, fx, fs
